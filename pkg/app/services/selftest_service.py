"""
Suite de aceptación ejecutable desde la CLI (`selftest`).

Cada criterio devuelve un CriterionResult con su detalle numérico; un
error del solver dentro de un criterio lo marca como fallido sin cortar
el resto de la suite.
"""

from __future__ import annotations

import logging
import math
from pathlib import Path
from typing import Callable, Dict, List, Tuple

import numpy as np

from app.config.settings import settings
from app.domain.grid_model import Domain1D, GridFunction, KernelKind
from app.domain.logistic_model import LogisticProblem
from app.domain.measure_model import SignedMeasure
from app.domain.operator_model import SuperposedOperator
from app.schemas.escenario import CriterionResult, ReportStatus, ScenarioKind, SelftestSummary
from app.services.errors import SolverError
from app.services.experiments_service import appendix_measure, default_scenario, run_scenario
from app.services.export_service import emit_report, write_json
from app.services.grid_service import build_grid, convolve, inner, l2_norm, make_kernel
from app.services.logistic_service import build_problem, energy_E, grad_E, minimize_E
from app.services.config_service import build_measure
from app.services.measure_service import c_bounds, c_ns
from app.services.operator_service import assemble_superposition
from app.services.spectral_service import principal_eigen, solve_on

logger = logging.getLogger(__name__)

UNIT = Domain1D(((0.0, 1.0),))

Check = Callable[[Path, int], Tuple[bool, str]]


def _delta(s: float, s_bar: float) -> SignedMeasure:
    return SignedMeasure.from_atoms([(s, 1.0)], s_bar)


def _laplace_reference(out: Path, seed: int) -> Tuple[bool, str]:
    _, pair = solve_on(UNIT, _delta(1.0, 0.5), 512)
    err = abs(pair.eigenvalue - math.pi**2) / math.pi**2
    ok = err <= 0.01 and pair.residual <= settings.eigen_residual_tol
    return ok, f"lambda={pair.eigenvalue:.6f} err_rel={err:.2e} residuo={pair.residual:.1e}"


def _constant_formula(out: Path, seed: int) -> Tuple[bool, str]:
    err = abs(c_ns(1, 0.5) - 1.0 / (2.0 * math.pi))
    zeros = all(c_ns(N, 0.0) == 0.0 and c_ns(N, 1.0) == 0.0 for N in (1, 2, 3))
    for N in (1, 2, 3):
        c_bounds(N, 0.5, 0.25, samples=1000)
    return err <= 1e-12 and zeros, f"|c(1,1/2)-1/(2π)|={err:.1e} extremos_cero={zeros}"


def _scaling_law(out: Path, seed: int) -> Tuple[bool, str]:
    mu = _delta(0.5, 0.5)
    _, base = solve_on(UNIT, mu, 256)
    parts = []
    ok = True
    for r in (0.5, 2.0):
        _, scaled = solve_on(UNIT.scaled(r), mu, 256)
        dev = abs(scaled.eigenvalue * r / base.eigenvalue - 1.0)
        ok = ok and dev <= settings.scaling_rel_tol
        parts.append(f"r={r:g}:{dev:.2e}")
    return ok, " ".join(parts)


def _scenario(kind: ScenarioKind) -> Check:
    def check(out: Path, seed: int) -> Tuple[bool, str]:
        report = run_scenario(default_scenario(kind, seed))
        emit_report(report, out / "escenarios")
        failed = sorted(k for k, v in report.checks.items() if not v)
        detail = f"estado={report.status.value}"
        if failed:
            detail += " fallidos=" + ",".join(failed)
        return report.status is ReportStatus.CONSISTENT, detail

    return check


def _gradient_states(seed: int) -> List[Tuple[LogisticProblem, SuperposedOperator, int]]:
    grid = build_grid(UNIT, 32)
    cases = [
        (_delta(1.0, 0.5), 12.0, 0.0, 7),
        (build_measure(appendix_measure(0.05)), 20.0, 0.5, 7),
        (_delta(0.5, 0.5), 1.0, 0.5, 6),
    ]
    states = []
    for mu, sigma, tau, count in cases:
        op = assemble_superposition(grid, mu)
        kernel = make_kernel(KernelKind.TOPHAT, 0.25, grid)
        states.append((build_problem(grid, sigma, 1.0, tau, kernel), op, count))
    return states


def _gradient_check(out: Path, seed: int) -> Tuple[bool, str]:
    rng = np.random.default_rng(seed)
    eps = 1e-5
    worst = 0.0
    for problem, op, count in _gradient_states(seed):
        n = op.grid.n
        for _ in range(count):
            u = GridFunction(op.grid, rng.standard_normal(n))
            g = grad_E(problem, op, u).values
            fd = np.empty(n)
            for i in range(n):
                step = np.zeros(n)
                step[i] = eps
                fd[i] = (
                    energy_E(problem, op, u.with_values(u.values + step))
                    - energy_E(problem, op, u.with_values(u.values - step))
                ) / (2.0 * eps)
            worst = max(worst, float(np.linalg.norm(fd - g) / np.linalg.norm(g)))
    return worst <= 1e-5, f"error_rel_max={worst:.2e}"


def _residuals(out: Path, seed: int) -> Tuple[bool, str]:
    op, pair = solve_on(UNIT, _delta(1.0, 0.5), 64)
    problem = build_problem(op.grid, 12.0, 1.0)
    report = minimize_E(problem, op, pair=pair)
    ok = (
        pair.residual <= settings.eigen_residual_tol
        and pair.euler_lagrange_residual <= settings.euler_lagrange_tol
        and report.converged
        and report.weak_residual <= 1e-8
    )
    return ok, (
        f"autopar={pair.residual:.1e} euler_lagrange={pair.euler_lagrange_residual:.1e} "
        f"debil={report.weak_residual:.1e} convergio={report.converged}"
    )


def _convolution_bound(out: Path, seed: int) -> Tuple[bool, str]:
    rng = np.random.default_rng(seed)
    grid = build_grid(UNIT, 64)
    kernels = [make_kernel(KernelKind.TOPHAT, 0.25, grid), make_kernel(KernelKind.GAUSSIAN, 0.25, grid)]
    exact = all(
        math.isclose(J.mass, 1.0, rel_tol=1e-14) and np.array_equal(J.weights, J.weights[::-1]) for J in kernels
    )
    worst = -math.inf
    for k in range(100):
        J = kernels[k % 2]
        u = GridFunction(grid, rng.standard_normal(grid.n))
        v = GridFunction(grid, rng.standard_normal(grid.n))
        bound = l2_norm(u) * l2_norm(v)
        worst = max(worst, (inner(v, convolve(J, u)) - bound) / bound)
    return exact and worst <= 1e-12, f"masa_simetria={exact} exceso_max={worst:.2e}"


def _tree(root: Path) -> Dict[str, bytes]:
    return {p.relative_to(root).as_posix(): p.read_bytes() for p in sorted(root.rglob("*")) if p.is_file()}


def _determinism(out: Path, seed: int) -> Tuple[bool, str]:
    """Repite cada escenario ya emitido y compara el árbol completo byte a byte."""
    reference = out / "escenarios"
    kinds = sorted(d.name for d in reference.iterdir() if d.is_dir()) if reference.is_dir() else []
    if not kinds:
        return False, "sin_reportes_previos"
    rerun = out / "determinismo"
    for kind in kinds:
        emit_report(run_scenario(default_scenario(kind, seed)), rerun)
    distintos = []
    for kind in kinds:
        before, after = _tree(reference / kind), _tree(rerun / kind)
        if before.keys() != after.keys():
            distintos.append(f"{kind}:archivos")
            continue
        distintos += [f"{kind}/{name}" for name in before if before[name] != after[name]]
    detail = f"escenarios={len(kinds)}"
    if distintos:
        detail += " distintos=" + ",".join(distintos)
    return not distintos, detail


CRITERIA: List[Tuple[str, Check]] = [
    ("autovalor_laplaciano", _laplace_reference),
    ("constante_c_ns", _constant_formula),
    ("ley_de_escala", _scaling_law),
    ("dicotomia_extincion_supervivencia", _scenario(ScenarioKind.EXTINCTION_SURVIVAL)),
    ("componente_negativa", _scenario(ScenarioKind.NEGATIVE_COMPONENT)),
    ("fragmentacion", _scenario(ScenarioKind.FRAGMENTATION)),
    ("cruce_de_medidas", _scenario(ScenarioKind.TWO_MEASURES)),
    ("modulo_y_contraejemplo", _scenario(ScenarioKind.MODULUS_COUNTEREXAMPLE)),
    ("gradiente_diferencias_centrales", _gradient_check),
    ("residuos", _residuals),
    ("convolucion_y_nucleo", _convolution_bound),
    ("determinismo", _determinism),
]


def run_selftest(out_dir: Path | str, seed: int | None = None) -> SelftestSummary:
    """Corre los criterios en orden y escribe <out_dir>/selftest.json."""
    out = Path(out_dir)
    seed = settings.default_seed if seed is None else seed
    results: List[CriterionResult] = []
    for idx, (name, check) in enumerate(CRITERIA, start=1):
        try:
            ok, detail = check(out, seed)
        except SolverError as exc:
            ok, detail = False, f"{exc.code}: {exc.message}"
        results.append(CriterionResult(id=idx, name=name, ok=ok, detail=detail))
        logger.info("Criterio %d %s: %s", idx, name, "OK" if ok else "FALLA")
    summary = SelftestSummary(seed=seed, ok=all(r.ok for r in results), criteria=results)
    write_json(out / "selftest.json", summary.model_dump(mode="json"))
    return summary
