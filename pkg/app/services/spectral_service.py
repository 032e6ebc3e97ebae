"""
Servicio espectral: autopar principal de A_μ y comparaciones de
autovalores entre dominios y medidas.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve, eigh

from app.config.settings import Settings, settings
from app.domain.grid_model import Domain1D, GridFunction
from app.domain.measure_model import SignedMeasure
from app.domain.operator_model import FormPart, SuperposedOperator
from app.domain.spectral_model import EigenPair
from app.schemas.espectral import (
    ComparisonRecord,
    EigenSummary,
    MonotonicityCheck,
    NegativeComponentCheck,
    ScalingCheck,
    UnionCheck,
)
from app.services.errors import (
    config_error,
    convergence_error,
    discretization_error,
    hypothesis_error,
    invariant_error,
)
from app.services.grid_service import build_grid, inner
from app.services.operator_service import (
    assemble_superposition,
    coercivity_margin,
    form_value,
)
from app.services.metrics_service import metrics_service

logger = logging.getLogger(__name__)


def _normalize(vec: np.ndarray, h: float) -> np.ndarray:
    e = vec / math.sqrt(h * float(vec @ vec))
    if e.sum() < 0.0:
        e = -e
    return e


def _inverse_iteration(
    A: np.ndarray,
    factor,
    max_iters: int,
    deflate: Optional[np.ndarray] = None,
) -> Tuple[float, np.ndarray, int]:
    """Iteración inversa con factorización de Cholesky ya calculada."""
    n = A.shape[0]
    x = np.ones(n) + np.linspace(0.0, 1e-3, n)
    if deflate is not None:
        x -= (deflate @ x) * deflate
    x /= np.linalg.norm(x)
    lam = float(x @ A @ x)
    for it in range(1, max_iters + 1):
        y = cho_solve(factor, x)
        if deflate is not None:
            y -= (deflate @ y) * deflate
        x = y / np.linalg.norm(y)
        lam = float(x @ A @ x)
        r = np.linalg.norm(A @ x - lam * x) / abs(lam)
        if r <= 1e-12:
            return lam, x, it
    return lam, x, max_iters


def _euler_lagrange(op: SuperposedOperator, e: GridFunction, lam: float, samples: int, seed: int) -> float:
    rng = np.random.default_rng(seed)
    worst = 0.0
    norm_e = math.sqrt(inner(e, e))
    for _ in range(samples):
        v = GridFunction(op.grid, rng.standard_normal(op.grid.n))
        lhs = form_value(op, e, v, FormPart.SIGNED)
        rhs = lam * inner(e, v)
        scale = abs(lam) * norm_e * math.sqrt(inner(v, v))
        worst = max(worst, abs(lhs - rhs) / scale)
    return worst


def principal_eigen(
    op: SuperposedOperator,
    method: str = "dense",
    cfg: Settings = settings,
) -> EigenPair:
    """Autopar principal (λ_μ(Ω), e_μ).

    method="dense" resuelve con eigh (camino de referencia); method="inverse"
    usa iteración inversa. Con cfg.eigen_cross_check ambos caminos deben
    coincidir en λ.
    """
    if method not in ("dense", "inverse"):
        raise config_error(f"Método espectral desconocido: {method}", code="METODO_DESCONOCIDO")
    margin = coercivity_margin(op)
    if margin <= 0.0:
        raise hypothesis_error(
            "Operador no coercivo: la parte negativa no se reabsorbe",
            code="OPERADOR_NO_COERCIVO",
            margin=margin,
        )
    A = op.A_mu
    n = op.grid.n
    h = op.grid.h

    dense: Optional[Tuple[float, Optional[float], np.ndarray]] = None
    if method == "dense" or cfg.eigen_cross_check:
        top = min(1, n - 1)
        vals, vecs = eigh(A, subset_by_index=[0, top])
        dense = (float(vals[0]), float(vals[1]) if n > 1 else None, vecs[:, 0])

    fast: Optional[Tuple[float, Optional[float], np.ndarray]] = None
    if method == "inverse" or cfg.eigen_cross_check:
        try:
            factor = cho_factor(A)
        except LinAlgError as exc:
            raise convergence_error("Cholesky falló en la iteración inversa", detalle=str(exc))
        lam1, x1, _ = _inverse_iteration(A, factor, cfg.inverse_iteration_max_iters)
        lam2: Optional[float] = None
        if n > 1:
            lam2, _, _ = _inverse_iteration(A, factor, cfg.inverse_iteration_max_iters, deflate=x1)
        fast = (lam1, lam2, x1)

    if dense is not None and fast is not None:
        if abs(dense[0] - fast[0]) > cfg.eigen_agreement_tol * abs(dense[0]):
            raise invariant_error(
                "Los caminos denso e inverso no coinciden",
                code="AUTOVALORES_DISCREPANTES",
                denso=dense[0],
                inverso=fast[0],
            )

    chosen = dense if method == "dense" else fast
    assert chosen is not None
    lam, second, vec = chosen
    residual = float(np.linalg.norm(A @ vec - lam * vec) / (abs(lam) * np.linalg.norm(vec)))
    e = GridFunction(op.grid, _normalize(vec, h))
    sign_violation = max(0.0, -float(e.values.min()))
    el = _euler_lagrange(op, e, lam, cfg.euler_lagrange_samples, cfg.default_seed)

    if residual > cfg.eigen_residual_tol:
        raise convergence_error("Residuo del autopar sobre la tolerancia", residual=residual)
    if el > cfg.euler_lagrange_tol:
        raise convergence_error("Falla la identidad de Euler–Lagrange", residual=el)

    metrics_service.contar_autopar(method)
    logger.info(
        "Autopar principal",
        extra={"lambda": lam, "residual": residual, "n": n, "metodo": method},
    )
    return EigenPair(
        eigenvalue=lam,
        e=e,
        residual=residual,
        second=second,
        sign_violation=sign_violation,
        euler_lagrange_residual=el,
        method=method,
    )


def rayleigh(op: SuperposedOperator, u: GridFunction) -> float:
    return form_value(op, u, u, FormPart.SIGNED) / inner(u, u)


def summarize(pair: EigenPair, op: SuperposedOperator) -> EigenSummary:
    return EigenSummary(
        eigenvalue=pair.eigenvalue,
        residual=pair.residual,
        gap=pair.gap,
        sign_violation=pair.sign_violation,
        euler_lagrange_residual=pair.euler_lagrange_residual,
        coercivity_margin=coercivity_margin(op),
        n=op.grid.n,
        h=op.grid.h,
        method=pair.method,
        snapped=list(op.grid.snapped),
    )


def solve_on(
    domain: Domain1D,
    mu: SignedMeasure,
    n_per_unit: int,
    Q: Optional[int] = None,
) -> Tuple[SuperposedOperator, EigenPair]:
    """Ensambla A_μ sobre Ω y calcula su autopar principal."""
    grid = build_grid(domain, n_per_unit)
    op = assemble_superposition(grid, mu, Q)
    return op, principal_eigen(op)


def lattice_compatible(domain: Domain1D, n_per_unit: int) -> bool:
    for a, b in domain.intervals:
        for x in (a * n_per_unit, b * n_per_unit):
            if abs(x - round(x)) > 1e-9:
                return False
    return True


def _power_range(mu: SignedMeasure, r: float) -> Tuple[float, float]:
    bounds = mu.plus.support_bounds()
    if bounds is None:
        raise hypothesis_error("μ⁺ es nula", code="HIPOTESIS_MU0")
    values = [r ** (2.0 * s) for s in bounds]
    return min(values), max(values)


def scaling_comparison(
    domain: Domain1D,
    mu: SignedMeasure,
    r: float,
    n_per_unit: int,
    tol: Optional[float] = None,
    Q: Optional[int] = None,
) -> ScalingCheck:
    """inf_Σ r^{2s}·λ_{μ⁺}(Ω_r) ≤ λ_{μ⁺}(Ω) ≤ sup_Σ r^{2s}·λ_{μ⁺}(Ω_r)."""
    tol = settings.scaling_rel_tol if tol is None else tol
    scaled = domain.scaled(r)
    if not (lattice_compatible(domain, n_per_unit) and lattice_compatible(scaled, n_per_unit)):
        raise discretization_error(
            "Ω y Ω_r deben caer sobre la red", code="RADIO_NO_COMPATIBLE", r=r
        )
    plus = mu.positive_part()
    _, base = solve_on(domain, plus, n_per_unit, Q)
    _, scl = solve_on(scaled, plus, n_per_unit, Q)
    inf_f, sup_f = _power_range(mu, r)
    lower = inf_f * scl.eigenvalue
    upper = sup_f * scl.eigenvalue
    return ScalingCheck(
        r=r,
        lambda_base=base.eigenvalue,
        lambda_scaled=scl.eigenvalue,
        inf_factor=inf_f,
        sup_factor=sup_f,
        lower_ok=lower <= base.eigenvalue * (1.0 + tol),
        upper_ok=base.eigenvalue <= upper * (1.0 + tol),
        slack_lower=base.eigenvalue - lower,
        slack_upper=upper - base.eigenvalue,
    )


def monotonicity_comparison(
    inner_domain: Domain1D,
    outer_domain: Domain1D,
    mu: SignedMeasure,
    n_per_unit: int,
    Q: Optional[int] = None,
) -> MonotonicityCheck:
    op1, pair1 = solve_on(inner_domain, mu, n_per_unit, Q)
    op2, pair2 = solve_on(outer_domain, mu, n_per_unit, Q)
    if not set(op1.grid.lattice.tolist()) <= set(op2.grid.lattice.tolist()):
        raise discretization_error(
            "U₁ no está contenido en U₂ como conjunto de nodos", code="DOMINIOS_NO_ANIDADOS"
        )
    slack = pair1.eigenvalue - pair2.eigenvalue
    return MonotonicityCheck(
        lambda_inner=pair1.eigenvalue,
        lambda_outer=pair2.eigenvalue,
        ok=slack >= -1e-10,
        slack=slack,
    )


def _is_local(mu: SignedMeasure) -> bool:
    return mu.minus.is_zero and measure_is_at_one(mu)


def measure_is_at_one(mu: SignedMeasure) -> bool:
    return not mu.plus.densities and all(s == 1.0 for s, _ in mu.plus.atoms)


def union_comparison(
    first: Domain1D,
    second: Domain1D,
    mu: SignedMeasure,
    n_per_unit: int,
    Q: Optional[int] = None,
) -> UnionCheck:
    """λ(Ω₁ ∪ Ω₂) < λ(Ω₁); igualdad cuando μ es puramente local."""
    union = first.union(second)
    with ThreadPoolExecutor(max_workers=settings.max_workers) as pool:
        futures = [pool.submit(solve_on, d, mu, n_per_unit, Q) for d in (first, second, union)]
        (_, p1), (_, p2), (_, pu) = [f.result() for f in futures]
    return compare_union(p1, p2, pu, mu)


def compare_union(p1: EigenPair, p2: EigenPair, pu: EigenPair, mu: SignedMeasure) -> UnionCheck:
    """Arma el UnionCheck a partir de autopares ya calculados."""
    slack = p1.eigenvalue - pu.eigenvalue
    scale = max(p1.residual * abs(p1.eigenvalue), pu.residual * abs(pu.eigenvalue), 1e-12)
    local = _is_local(mu)
    return UnionCheck(
        lambda_first=p1.eigenvalue,
        lambda_second=p2.eigenvalue,
        lambda_union=pu.eigenvalue,
        congruent_ok=abs(p1.eigenvalue - p2.eigenvalue) <= 1e-8 * abs(p1.eigenvalue),
        strict_drop=slack > settings.window_safety * scale,
        slack=slack,
        local_measure=local,
        local_equality_ok=(abs(slack) <= 1e-10) if local else None,
    )


def negative_component_comparison(
    domain: Domain1D,
    mu: SignedMeasure,
    eps_values: Sequence[float],
    n_per_unit: int,
    Q: Optional[int] = None,
) -> List[NegativeComponentCheck]:
    _, plus_pair = solve_on(domain, mu.positive_part(), n_per_unit, Q)
    checks = []
    for eps in eps_values:
        _, pair = solve_on(domain, mu.with_negative_scaled(eps), n_per_unit, Q)
        slack = plus_pair.eigenvalue - pair.eigenvalue
        checks.append(
            NegativeComponentCheck(
                eps=eps,
                lambda_plus=plus_pair.eigenvalue,
                lambda_eps=pair.eigenvalue,
                ok=slack > 0.0,
                slack=slack,
            )
        )
    return checks


def eigen_comparisons(
    mu: SignedMeasure,
    n_per_unit: int,
    *,
    domain: Optional[Domain1D] = None,
    r_values: Iterable[float] = (),
    nested: Optional[Tuple[Domain1D, Domain1D]] = None,
    union: Optional[Tuple[Domain1D, Domain1D]] = None,
    eps_values: Sequence[float] = (),
    Q: Optional[int] = None,
) -> ComparisonRecord:
    """Agrupa las comparaciones pedidas en un único registro."""
    record = ComparisonRecord()
    if domain is not None:
        record.scaling = [scaling_comparison(domain, mu, r, n_per_unit, Q=Q) for r in r_values]
        if eps_values and not mu.minus.is_zero:
            record.negative_component = negative_component_comparison(domain, mu, eps_values, n_per_unit, Q)
    if nested is not None:
        record.monotonicity = monotonicity_comparison(nested[0], nested[1], mu, n_per_unit, Q)
    if union is not None:
        record.union = union_comparison(union[0], union[1], mu, n_per_unit, Q)
    return record
