import csv
import json

import pytest

from app.schemas.escenario import EigenRow, Report, ReportStatus, ScenarioKind
from app.services.errors import ReportIOError
from app.services.export_service import emit_report, export_eigenpair, export_solution, to_json, write_json
from app.services.logistic_service import build_problem, minimize_E
from app.services.spectral_service import solve_on, summarize


def _report(**extra) -> Report:
    data = dict(
        kind=ScenarioKind.APPENDIX_CHECK,
        params={"n_per_unit": 32, "seed": 1},
        eigenvalues={"lambda": 12.5},
        checks={"coercivo": True},
        status=ReportStatus.CONSISTENT,
        paper_consistent=True,
        eigen_rows=[
            EigenRow(label="lambda", domain="(0,1)", measure="d1", eigenvalue=12.5, residual=1e-14, gap=20.0)
        ],
    )
    data.update(extra)
    return Report(**data)


class TestReporte:
    """Pruebas de emit_report"""

    def test_archivos_escritos(self, tmp_path):
        written = emit_report(_report(), tmp_path)
        names = sorted(p.name for p in written)
        assert names == ["eigenvalues.csv", "report.json"]
        assert all(p.parent == tmp_path / "appendix_check" for p in written)

    def test_json_ordenado_sin_campos_internos(self, tmp_path):
        emit_report(_report(), tmp_path)
        text = (tmp_path / "appendix_check" / "report.json").read_text(encoding="utf-8")
        data = json.loads(text)
        assert list(data) == sorted(data)
        assert "eigen_rows" not in data
        assert "profiles" not in data
        assert data["paper_consistent"] is True
        assert text.endswith("}\n")

    def test_csv_de_autovalores(self, tmp_path):
        emit_report(_report(), tmp_path)
        with (tmp_path / "appendix_check" / "eigenvalues.csv").open(encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["label", "domain", "measure", "r", "lambda", "residual", "gap"]
        assert rows[1][0] == "lambda"
        assert rows[1][3] == ""
        assert float(rows[1][4]) == 12.5

    def test_perfiles(self, tmp_path):
        emit_report(_report(profiles={"union": [(0.25, 0.5), (0.75, 0.125)]}), tmp_path)
        with (tmp_path / "appendix_check" / "profiles.csv").open(encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["label", "x", "u"]
        assert len(rows) == 3

    def test_bytes_identicos(self, tmp_path):
        emit_report(_report(), tmp_path / "a")
        emit_report(_report(), tmp_path / "b")
        for name in ("report.json", "eigenvalues.csv"):
            assert (tmp_path / "a" / "appendix_check" / name).read_bytes() == (
                tmp_path / "b" / "appendix_check" / name
            ).read_bytes()

    def test_error_de_escritura(self, tmp_path):
        blocker = tmp_path / "archivo"
        blocker.write_text("x")
        with pytest.raises(ReportIOError) as exc:
            write_json(blocker / "sub" / "r.json", {"a": 1})
        assert exc.value.code == "ERROR_ESCRITURA"
        assert exc.value.exit_code == 1

    def test_to_json_determinista(self):
        assert to_json({"b": 1, "a": "ñ"}) == '{\n  "a": "ñ",\n  "b": 1\n}\n'


class TestExportaciones:
    """Autopar y solución a disco"""

    def test_autopar(self, tmp_path, unit_domain, delta1):
        op, pair = solve_on(unit_domain, delta1, 16)
        written = export_eigenpair(pair, summarize(pair, op), tmp_path)
        data = json.loads((tmp_path / "eigen.json").read_text(encoding="utf-8"))
        assert data["lambda"] == pytest.approx(pair.eigenvalue)
        lines = (tmp_path / "eigenfunction.csv").read_text(encoding="utf-8").splitlines()
        assert lines[0] == "x,e"
        assert len(lines) == 17
        assert len(written) == 2

    def test_solucion(self, tmp_path, unit_domain, delta1):
        op, pair = solve_on(unit_domain, delta1, 16)
        report = minimize_E(build_problem(op.grid, 12.0, 1.0), op, pair=pair)
        export_solution(report, tmp_path)
        data = json.loads((tmp_path / "solve.json").read_text(encoding="utf-8"))
        assert data["classification"] == report.classification.value
        assert "u" not in data
        assert (tmp_path / "solution.csv").exists()
