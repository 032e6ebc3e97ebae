"""
Escritura de reportes: JSON determinista y tablas CSV.
"""

from __future__ import annotations

import csv
import json
import logging
from pathlib import Path
from typing import Any, Iterable, List, Sequence

from app.domain.spectral_model import EigenPair
from app.schemas.escenario import Report
from app.schemas.espectral import EigenSummary
from app.schemas.logistica import SolveReport
from app.services.errors import ReportIOError

logger = logging.getLogger(__name__)


def to_json(payload: Any) -> str:
    """JSON con claves ordenadas y salto de línea final."""
    return json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def write_json(path: Path, payload: Any) -> Path:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(to_json(payload), encoding="utf-8")
    except OSError as exc:
        raise ReportIOError(f"No se pudo escribir {path}", details={"path": str(path), "error": str(exc)})
    return path


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            for row in rows:
                writer.writerow(["" if v is None else (repr(v) if isinstance(v, float) else v) for v in row])
    except OSError as exc:
        raise ReportIOError(f"No se pudo escribir {path}", details={"path": str(path), "error": str(exc)})
    return path


def emit_report(report: Report, path: Path | str) -> List[Path]:
    """Escribe <path>/<kind>/report.json, eigenvalues.csv y profiles.csv."""
    target = Path(path) / report.kind.value
    written = [write_json(target / "report.json", report.model_dump(mode="json"))]
    written.append(
        write_csv(
            target / "eigenvalues.csv",
            ["label", "domain", "measure", "r", "lambda", "residual", "gap"],
            (
                [row.label, row.domain, row.measure, row.r, row.eigenvalue, row.residual, row.gap]
                for row in report.eigen_rows
            ),
        )
    )
    if report.profiles:
        written.append(
            write_csv(
                target / "profiles.csv",
                ["label", "x", "u"],
                ([label, x, u] for label in sorted(report.profiles) for x, u in report.profiles[label]),
            )
        )
    logger.info("Reporte escrito", extra={"directorio": str(target), "archivos": len(written)})
    return written


def export_eigenpair(pair: EigenPair, summary: EigenSummary, path: Path | str) -> List[Path]:
    """eigenfunction.csv (x, e(x)) y eigen.json con el resumen."""
    target = Path(path)
    grid = pair.e.grid
    return [
        write_csv(target / "eigenfunction.csv", ["x", "e"], zip(grid.nodes.tolist(), pair.e.values.tolist())),
        write_json(target / "eigen.json", summary.model_dump(mode="json", by_alias=True)),
    ]


def export_solution(report: SolveReport, path: Path | str) -> List[Path]:
    """solution.csv (x, u(x)) y solve.json con el SolveReport."""
    target = Path(path)
    grid = report.u.grid
    return [
        write_csv(target / "solution.csv", ["x", "u"], zip(grid.nodes.tolist(), report.u.values.tolist())),
        write_json(target / "solve.json", report.model_dump(mode="json")),
    ]
