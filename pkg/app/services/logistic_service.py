"""
Servicio logístico: energía E, gradiente, descenso proyectado con
Armijo y multistart, clasificación trivial/no trivial y umbrales de
extinción/supervivencia.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Dict, List, Optional

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from app.domain.grid_model import Grid, GridFunction, Kernel, KernelKind
from app.domain.logistic_model import Classification, LogisticProblem, ThresholdVerdict
from app.domain.operator_model import FormPart, SuperposedOperator
from app.domain.spectral_model import EigenPair
from app.schemas.logistica import SolveReport, SolverOptions, StartRecord, ThresholdReport
from app.services.errors import SolverError, hypothesis_error
from app.services.grid_service import convolve, inner, kernel_matrix, make_kernel
from app.services.measure_service import check_hypotheses
from app.services.metrics_service import metrics_service
from app.services.operator_service import coercivity_margin, form_value, modulus_certificate
from app.services.spectral_service import principal_eigen

logger = logging.getLogger(__name__)


def _as_field(grid: Grid, value, name: str) -> GridFunction:
    if isinstance(value, GridFunction):
        field = value
    elif np.isscalar(value):
        field = GridFunction.constant(grid, float(value))
    else:
        field = GridFunction(grid, np.asarray(value, dtype=float))
    if np.any(field.values < 0.0):
        raise hypothesis_error(f"{name} debe ser no negativo", code="RECURSO_NEGATIVO", campo=name)
    return field


def build_problem(
    grid: Grid,
    sigma,
    nu,
    tau: float = 0.0,
    kernel: Optional[Kernel] = None,
    m: Optional[float] = None,
) -> LogisticProblem:
    """Arma un LogisticProblem validando signos; σ y ν pueden ser escalares o arreglos."""
    if tau < 0.0:
        raise hypothesis_error("τ debe ser ≥ 0", code="RECURSO_NEGATIVO", tau=tau)
    if kernel is None:
        kernel = make_kernel(KernelKind.TOPHAT, 2.0 * grid.h, grid)
    return LogisticProblem(
        sigma=_as_field(grid, sigma, "sigma"),
        nu=_as_field(grid, nu, "nu"),
        tau=float(tau),
        kernel=kernel,
        m=m,
    )


def _energy_values(problem: LogisticProblem, A: np.ndarray, h: float, u: np.ndarray, conv: np.ndarray) -> float:
    sigma = problem.sigma.values
    nu = problem.nu.values
    quad = 0.5 * h * float(u @ (A @ u))
    pot = h * float(
        np.sum(nu * np.abs(u) ** 3 / 3.0 - sigma * u**2 / 2.0 - problem.tau * u * conv / 2.0)
    )
    return quad + pot


def _residual_values(problem: LogisticProblem, A: np.ndarray, u: np.ndarray, conv: np.ndarray) -> np.ndarray:
    return A @ u + problem.nu.values * np.abs(u) * u - problem.sigma.values * u - problem.tau * conv


def energy_E(problem: LogisticProblem, op: SuperposedOperator, u: GridFunction) -> float:
    """E(u) = ½Q_μ(u) + h·Σ[ν|u|³/3 − σu²/2 − τ·u(J∗u)/2]"""
    conv = convolve(problem.kernel, u).values
    form = 0.5 * form_value(op, u, u, FormPart.SIGNED)
    sigma = problem.sigma.values
    nu = problem.nu.values
    v = u.values
    pot = op.grid.h * float(
        np.sum(nu * np.abs(v) ** 3 / 3.0 - sigma * v**2 / 2.0 - problem.tau * v * conv / 2.0)
    )
    return form + pot


def grad_E(problem: LogisticProblem, op: SuperposedOperator, u: GridFunction) -> GridFunction:
    """g_i = h·[(A_μu)_i + ν_i|u_i|u_i − σ_iu_i − τ(J∗u)_i]"""
    conv = convolve(problem.kernel, u).values
    return u.with_values(op.grid.h * _residual_values(problem, op.A_mu, u.values, conv))


def grad_norm(problem: LogisticProblem, op: SuperposedOperator, u: GridFunction) -> float:
    """Norma L² discreta del gradiente: sqrt(h·Σ r_i²) con r = g/h."""
    r = grad_E(problem, op, u).values / op.grid.h
    return math.sqrt(op.grid.h * float(r @ r))


def weak_residual(u: GridFunction, problem: LogisticProblem, op: SuperposedOperator) -> float:
    """Máximo desajuste de la formulación débil sobre las funciones test nodales, dividido por ‖u‖."""
    norm = math.sqrt(inner(u, u))
    if norm == 0.0:
        return 0.0
    h = op.grid.h
    v = u.values
    lhs = h * (op.A_mu @ v)
    conv = convolve(problem.kernel, u).values
    rhs = h * (problem.sigma.values * v - problem.nu.values * v**2 + problem.tau * conv)
    return float(np.max(np.abs(lhs - rhs))) / norm


def threshold_report(problem: LogisticProblem, pair: EigenPair, J: Optional[Kernel] = None) -> ThresholdReport:
    """Evalúa sup σ + τ ≤ λ (extinción) y λ < inf σ + τ·h·Σ e(J∗e) (supervivencia)."""
    J = J or problem.kernel
    lam = pair.eigenvalue
    sup_s = float(problem.sigma.values.max())
    inf_s = float(problem.sigma.values.min())
    pollination = inner(pair.e, convolve(J, pair.e))
    ext_lhs = sup_s + problem.tau
    surv_rhs = inf_s + problem.tau * pollination
    if ext_lhs <= lam:
        verdict = ThresholdVerdict.EXTINCTION_CERTIFIED
    elif lam < surv_rhs:
        verdict = ThresholdVerdict.SURVIVAL_CERTIFIED
    else:
        verdict = ThresholdVerdict.INDETERMINATE
    return ThresholdReport(
        eigenvalue=lam,
        sup_sigma=sup_s,
        inf_sigma=inf_s,
        tau=problem.tau,
        pollination=pollination,
        extinction_lhs=ext_lhs,
        survival_rhs=surv_rhs,
        extinction_slack=lam - ext_lhs,
        survival_slack=surv_rhs - lam,
        verdict=verdict,
    )


def energy_along(problem: LogisticProblem, op: SuperposedOperator, pair: EigenPair, t: float) -> float:
    """E(t·e_μ)."""
    return energy_E(problem, op, pair.e.with_values(t * pair.e.values))


@dataclass
class _Branch:
    name: str
    u: np.ndarray
    energy: float
    initial_energy: float
    grad_norm: float
    iterations: int
    converged: bool


class _Descent:
    """Descenso de energía con Armijo y proyección u ← |u|.

    La dirección es −H⁻¹r con H el hessiano cuando es definido positivo,
    si no la métrica de energía A_μ.
    """

    def __init__(self, problem: LogisticProblem, op: SuperposedOperator, opts: SolverOptions, project: bool):
        self.problem = problem
        self.op = op
        self.opts = opts
        self.project = project
        self.h = op.grid.h
        self.A = op.A_mu
        self.K = kernel_matrix(problem.kernel, op.grid) if problem.tau > 0.0 else None
        self.energy_factor = cho_factor(self.A) if opts.metric != "euclidean" else None
        self.euclid_step = 1.0 / max(float(np.max(np.sum(np.abs(self.A), axis=1))), 1.0)
        self.tol = opts.tolerance(op.grid.n)

    def conv(self, u: np.ndarray) -> np.ndarray:
        if self.K is not None:
            return self.K @ u
        return np.zeros_like(u)

    def energy(self, u: np.ndarray) -> float:
        return _energy_values(self.problem, self.A, self.h, u, self.conv(u))

    def residual(self, u: np.ndarray) -> np.ndarray:
        return _residual_values(self.problem, self.A, u, self.conv(u))

    def direction(self, u: np.ndarray, r: np.ndarray) -> np.ndarray:
        if self.opts.metric == "euclidean":
            return -self.euclid_step * r
        if self.opts.metric == "hessian":
            H = self.A + np.diag(2.0 * self.problem.nu.values * np.abs(u) - self.problem.sigma.values)
            if self.K is not None:
                H = H - self.problem.tau * self.K
            try:
                return -cho_solve(cho_factor(H), r)
            except LinAlgError:
                pass
        return -cho_solve(self.energy_factor, r)

    def run(self, name: str, u0: np.ndarray) -> _Branch:
        u = np.abs(u0) if self.project else np.array(u0, dtype=float)
        E0 = self.energy(np.array(u0, dtype=float))
        E = self.energy(u)
        gnorm = math.inf
        for it in range(self.opts.max_iters):
            r = self.residual(u)
            gnorm = math.sqrt(self.h * float(r @ r))
            if gnorm <= self.tol:
                return _Branch(name, u, E, E0, gnorm, it, True)
            d = self.direction(u, r)
            slope = self.h * float(r @ d)
            if slope >= 0.0:
                d = -self.euclid_step * r
                slope = self.h * float(r @ d)
            t = 1.0
            for _ in range(self.opts.max_backtracks):
                trial = u + t * d
                E_trial = self.energy(trial)
                if E_trial <= E + self.opts.armijo_c1 * t * slope:
                    break
                t *= self.opts.backtracking_factor
            else:
                logger.warning("Búsqueda lineal agotada", extra={"arranque": name, "iteracion": it})
                return _Branch(name, u, E, E0, gnorm, it, False)
            if self.project:
                trial = np.abs(trial)
                E_trial = self.energy(trial)
            u, E = trial, E_trial
            metrics_service.sumar_iteraciones(1)
        r = self.residual(u)
        gnorm = math.sqrt(self.h * float(r @ r))
        return _Branch(name, u, E, E0, gnorm, self.opts.max_iters, gnorm <= self.tol)


def _projection_gate(op: SuperposedOperator) -> str:
    if modulus_certificate(op):
        return "certificado_discreto"
    mu = op.measure
    try:
        report = check_hypotheses(mu, op.grid.R)
    except SolverError:
        return "ninguna"
    return "mu2forte" if report.mu2forte_ok else "ninguna"


def _initial_states(problem: LogisticProblem, pair: EigenPair, seed: int) -> Dict[str, np.ndarray]:
    e = pair.e.values
    sup_sigma = float(problem.sigma.values.max())
    sup_nu = float(problem.nu.values.max())
    scale = sup_sigma / sup_nu if sup_nu > 0.0 else 1.0
    rng = np.random.default_rng(seed)
    return {
        "cero": np.zeros_like(e),
        "autofuncion_0.1": 0.1 * e,
        "autofuncion_escalada": scale * e,
        "aleatorio": max(scale, 0.1) * rng.random(e.size),
    }


def minimize_E(
    problem: LogisticProblem,
    op: SuperposedOperator,
    opts: Optional[SolverOptions] = None,
    pair: Optional[EigenPair] = None,
) -> SolveReport:
    """Minimiza E con multistart y devuelve el iterado de menor energía."""
    opts = opts or SolverOptions.from_settings()
    margin = coercivity_margin(op)
    if margin <= 0.0:
        raise hypothesis_error("Operador no coercivo", code="OPERADOR_NO_COERCIVO", margin=margin)
    if not problem.hypothesis_ok:
        raise hypothesis_error(
            "Se requiere ν > 0 donde σ + τ > 0",
            code="HIPOTESIS_INTEGRABILIDAD",
        )
    if not problem.sigma.grid.same_as(op.grid):
        raise hypothesis_error("El problema y el operador usan mallas distintas", code="MALLA_INCOMPATIBLE")

    pair = pair or principal_eigen(op)
    projection = _projection_gate(op)
    descent = _Descent(problem, op, opts, project=projection != "ninguna")
    starts = _initial_states(problem, pair, opts.seed)

    with ThreadPoolExecutor(max_workers=opts.max_workers) as pool:
        branches: List[_Branch] = list(pool.map(lambda item: descent.run(*item), starts.items()))

    best = min(branches, key=lambda b: b.energy)
    u = GridFunction(op.grid, best.u)
    sup_sigma = float(problem.sigma.values.max()) if op.grid.n else 0.0
    threshold = opts.trivial_factor * max(1.0, sup_sigma)
    classification = Classification.NONTRIVIAL if u.sup_norm > threshold else Classification.TRIVIAL

    report = SolveReport(
        u=u,
        energy=best.energy,
        grad_norm=best.grad_norm,
        tolerance=descent.tol,
        iterations=best.iterations,
        converged=best.converged,
        classification=classification,
        sup_norm=u.sup_norm,
        triviality_threshold=threshold,
        weak_residual=weak_residual(u, problem, op),
        winner=best.name,
        starts=[
            StartRecord(
                name=b.name,
                initial_energy=b.initial_energy,
                final_energy=b.energy,
                grad_norm=b.grad_norm,
                iterations=b.iterations,
                converged=b.converged,
            )
            for b in branches
        ],
        projection=projection,
        min_value=float(best.u.min()),
    )
    metrics_service.contar_solucion(classification.value)
    logger.info(
        "Minimización terminada",
        extra={
            "energia": best.energy,
            "clasificacion": classification.value,
            "iteraciones": best.iterations,
            "convergio": best.converged,
        },
    )
    if not best.converged:
        logger.warning("El mejor arranque no alcanzó la tolerancia", extra={"grad_norm": best.grad_norm})
    return report

