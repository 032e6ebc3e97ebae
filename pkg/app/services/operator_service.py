"""
Servicio de operadores: ensamblado denso de (−Δ)^s en 1D con condición
exterior de Dirichlet, superposición con signo A_μ y formas bilineales.

Para s ∈ (0,1) la fila i aplica
    2·c_{1,s}·Σ_{k≥1} w_k (2u_i − u_{i+k} − u_{i−k}),
con w_1 = W_near/h² (corrección de curvatura hasta 3h/2) y
w_k = ∫_{(k−1/2)h}^{(k+1/2)h} y^{−1−2s} dy para k ≥ 2. El factor 2 cuenta
las dos semirrectas. La cola completa Σ_{k≥2} w_k = (3h/2)^{−2s}/(2s) se
suma en forma cerrada en la diagonal.
"""

from __future__ import annotations

import logging
import math
import struct
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Dict, Optional, Tuple

import numpy as np
from scipy.linalg import eigh, eigvalsh

from app.config.settings import settings
from app.domain.grid_model import Grid, GridFunction
from app.domain.measure_model import SignedMeasure
from app.domain.operator_model import FormMatrix, FormPart, SuperposedOperator
from app.services.cache import AssemblyCache
from app.services.errors import ReportIOError, discretization_error
from app.services.measure_service import c_ns, measure_mass, quadrature_decompose
from app.services.metrics_service import metrics_service

logger = logging.getLogger(__name__)

NEAR_FIELD_CELLS = 1.5

assembly_cache = AssemblyCache(max_entries=settings.assembly_cache_size)


def fractional_weights(s: float, h: float, max_offset: int) -> Tuple[float, np.ndarray]:
    """(diagonal, acoplamientos) de A_s; acoplamientos[k] es −A_ij para |p_i − p_j| = k."""
    coupling = np.zeros(max_offset + 1)
    if s == 0.0:
        return 1.0, coupling
    if s == 1.0:
        if max_offset >= 1:
            coupling[1] = 1.0 / h**2
        return 2.0 / h**2, coupling

    c = c_ns(1, s)
    a = NEAR_FIELD_CELLS * h
    near = a ** (2.0 - 2.0 * s) / (2.0 - 2.0 * s) / h**2
    tail = a ** (-2.0 * s) / (2.0 * s)
    if max_offset >= 1:
        coupling[1] = 2.0 * c * near
    if max_offset >= 2:
        k = np.arange(2, max_offset + 1, dtype=float)
        lo = (k - 0.5) * h
        # lo^{-2s} − hi^{-2s} sin cancelación para s pequeño o k grande
        q = -(lo ** (-2.0 * s)) * np.expm1(-2.0 * s * np.log((k + 0.5) / (k - 0.5))) / (2.0 * s)
        coupling[2:] = 2.0 * c * q
    return 4.0 * c * (near + tail), coupling


def assemble_fractional(grid: Grid, s: float) -> FormMatrix:
    """Matriz densa simétrica de (−Δ)^s sobre la malla."""
    if not 0.0 <= s <= 1.0:
        raise discretization_error(f"Exponente {s} fuera de [0,1]", code="EXPONENTE_FUERA_DE_RANGO", s=s)
    key = (grid.key, float(s))
    cached = assembly_cache.get(key)
    if cached is not None:
        return FormMatrix(s=s, matrix=cached, grid=grid)

    d = grid.offsets
    max_offset = int(d.max()) if grid.n else 0
    diag, coupling = fractional_weights(s, grid.h, max_offset)
    A = -coupling[d]
    np.fill_diagonal(A, diag)
    A.setflags(write=False)
    assembly_cache.set(key, A)
    metrics_service.contar_ensamblado()
    return FormMatrix(s=s, matrix=A, grid=grid)


def assemble_superposition(
    grid: Grid,
    mu: SignedMeasure,
    Q: Optional[int] = None,
    max_workers: Optional[int] = None,
) -> SuperposedOperator:
    entries = quadrature_decompose(mu, Q)
    exps = sorted({s for s, _ in entries})
    with ThreadPoolExecutor(max_workers=max_workers or settings.max_workers) as pool:
        forms: Dict[float, FormMatrix] = dict(
            zip(exps, pool.map(lambda s: assemble_fractional(grid, s), exps))
        )

    A_plus = np.zeros((grid.n, grid.n))
    A_minus = np.zeros((grid.n, grid.n))
    for s, w in entries:
        if w > 0.0:
            A_plus += w * forms[s].matrix
        elif w < 0.0:
            A_minus += (-w) * forms[s].matrix
    A_mu = A_plus - A_minus
    for m in (A_plus, A_minus, A_mu):
        m.setflags(write=False)
    logger.debug("Operador ensamblado", extra={"n": grid.n, "exponentes": len(exps)})
    return SuperposedOperator(
        grid=grid,
        measure=mu,
        A_plus=A_plus,
        A_minus=A_minus,
        A_mu=A_mu,
        entries=tuple(entries),
    )


def _check_grid(op: SuperposedOperator, *funcs: GridFunction) -> None:
    for f in funcs:
        if not f.grid.same_as(op.grid):
            raise discretization_error(
                "La función no vive en la malla del operador", code="MALLA_INCOMPATIBLE"
            )


def form_value(
    op: SuperposedOperator,
    u: GridFunction,
    v: GridFunction,
    part: FormPart | str = FormPart.SIGNED,
) -> float:
    """h·uᵀ A_part v"""
    _check_grid(op, u, v)
    A = op.matrix(FormPart(part))
    return float(op.grid.h * (u.values @ (A @ v.values)))


def energy_I(op: SuperposedOperator, u: GridFunction) -> float:
    return 0.5 * form_value(op, u, u, FormPart.SIGNED)


def coercivity_margin(op: SuperposedOperator) -> float:
    """Menor autovalor de A_μ."""

    def _compute() -> float:
        value = float(eigvalsh(op.A_mu, subset_by_index=[0, 0])[0])
        metrics_service.establecer_margen(value)
        return value

    return op.cached_margin(_compute)


def modulus_certificate(op: SuperposedOperator) -> bool:
    """A_μ sin entradas positivas fuera de la diagonal ⇒ Q_μ(|u|) ≤ Q_μ(u) para todo u."""
    off = np.array(op.A_mu, copy=True)
    np.fill_diagonal(off, -np.inf)
    return bool(off.size == 0 or np.max(off) <= 0.0)


def modulus_gap(op: SuperposedOperator, u: GridFunction) -> float:
    """Q_μ(|u|) − Q_μ(u)"""
    abs_u = u.with_values(np.abs(u.values))
    return form_value(op, abs_u, abs_u) - form_value(op, u, u)


def sobolev_constant(grid: Grid, s1: float, s2: float) -> float:
    """sup_u Q_{s1}(u)/Q_{s2}(u) sobre la malla (autovalor generalizado máximo)."""
    A1 = assemble_fractional(grid, s1).matrix
    A2 = assemble_fractional(grid, s2).matrix
    n = grid.n
    return float(eigh(A1, A2, eigvals_only=True, subset_by_index=[n - 1, n - 1])[0])


def reabsorption_constant(op: SuperposedOperator) -> float:
    """Constante empírica ĉ₀: sup Q₋(u) / (γ·Q_{μ⁺|[s̄,1]}(u)) con γ = γ mínimo."""
    mu = op.measure
    top_mass = measure_mass(mu.plus, mu.s_bar, 1.0)
    gamma_min = measure_mass(mu.minus, 0.0, mu.s_bar, True, False) / top_mass if top_mass > 0 else 0.0
    if gamma_min == 0.0 or not np.any(op.A_minus):
        return 0.0
    B = np.zeros_like(op.A_mu)
    for s, w in op.entries:
        if w > 0.0 and s >= mu.s_bar:
            B += w * assemble_fractional(op.grid, s).matrix
    n = op.grid.n
    top = float(eigh(op.A_minus, B, eigvals_only=True, subset_by_index=[n - 1, n - 1])[0])
    return top / gamma_min


def dump_matrix(matrix: np.ndarray, path: Path | str) -> Path:
    """Cabecera little-endian de 8 bytes {n} y luego la matriz fila por fila en float64."""
    path = Path(path)
    n = int(matrix.shape[0])
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("wb") as fh:
            fh.write(struct.pack("<Q", n))
            fh.write(np.ascontiguousarray(matrix, dtype="<f8").tobytes(order="C"))
    except OSError as exc:
        raise ReportIOError(f"No se pudo escribir {path}", details={"path": str(path), "error": str(exc)})
    return path


def load_matrix(path: Path | str) -> np.ndarray:
    data = Path(path).read_bytes()
    (n,) = struct.unpack("<Q", data[:8])
    return np.frombuffer(data[8:], dtype="<f8").reshape(n, n)


def spectral_norm_ratio(op: SuperposedOperator) -> float:
    """margen / ‖A_{μ⁺}‖₂. Con c = ½·razón vale I(u) ≥ c·Q_{μ⁺}(u) para todo u."""
    margin = coercivity_margin(op)
    n = op.grid.n
    top = float(eigvalsh(op.A_plus, subset_by_index=[n - 1, n - 1])[0])
    return margin / top if top > 0 else math.nan
