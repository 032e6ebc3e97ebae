"""
Servicio de medidas: constante c_{N,s}, sus cotas y las hipótesis
estructurales sobre μ = μ⁺ − μ⁻.
"""

from __future__ import annotations

import logging
import math
from functools import lru_cache
from typing import List, Optional, Tuple

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.optimize import minimize_scalar
from scipy.special import gamma as gamma_fn

from app.config.settings import settings
from app.domain.measure_model import DensityPiece, MeasureComponent, SignedMeasure
from app.schemas.hipotesis import HypothesisReport
from app.services.errors import config_error, hypothesis_error, invariant_error

logger = logging.getLogger(__name__)


def _gamma_ratio(N: int, s):
    return gamma_fn((N + 2.0 * np.asarray(s)) / 2.0) / gamma_fn(2.0 - np.asarray(s))


def _refinar(N: int, grid: np.ndarray, vals: np.ndarray, k: int, maximize: bool) -> float:
    lo = float(grid[max(k - 1, 0)])
    hi = float(grid[min(k + 1, grid.size - 1)])
    best = float(vals[k])
    if hi <= lo:
        return best
    sign = -1.0 if maximize else 1.0
    res = minimize_scalar(
        lambda s: sign * float(_gamma_ratio(N, s)),
        bounds=(lo, hi),
        method="bounded",
        options={"xatol": 1e-12},
    )
    candidate = float(_gamma_ratio(N, res.x))
    return max(best, candidate) if maximize else min(best, candidate)


@lru_cache(maxsize=32)
def gamma_extrema(N: int) -> Tuple[float, float]:
    """(Γ̄_N, Γ̲_N): máximo y mínimo de Γ((N+2s)/2)/Γ(2−s) sobre s ∈ [0,1].

    Barrido denso con paso settings.gamma_scan_step y refinamiento acotado
    alrededor del ganador.
    """
    if N < 1:
        raise config_error("La dimensión N debe ser ≥ 1", code="DIMENSION_INVALIDA", N=N)
    m = int(math.ceil(1.0 / settings.gamma_scan_step))
    grid = np.linspace(0.0, 1.0, m + 1)
    vals = _gamma_ratio(N, grid)
    up = _refinar(N, grid, vals, int(np.argmax(vals)), maximize=True)
    down = _refinar(N, grid, vals, int(np.argmin(vals)), maximize=False)
    return up, down


def c_ns(N: int, s: float) -> float:
    """c_{N,s} = 2^{2s−1} Γ((N+2s)/2) s(1−s) / (π^{N/2} Γ(2−s)); exactamente 0 en s ∈ {0,1}."""
    if not 0.0 <= s <= 1.0:
        raise config_error(f"Exponente {s} fuera de [0,1]", code="EXPONENTE_FUERA_DE_RANGO", s=s)
    if s == 0.0 or s == 1.0:
        return 0.0
    return float(
        2.0 ** (2.0 * s - 1.0)
        * gamma_fn((N + 2.0 * s) / 2.0)
        * s
        * (1.0 - s)
        / (math.pi ** (N / 2.0) * gamma_fn(2.0 - s))
    )


def c_bounds(
    N: int,
    s_bar: float,
    delta: float,
    samples: Optional[int] = None,
) -> Tuple[float, float]:
    """(c_up, c_low·δ) y verificación por muestreo de las cotas."""
    if not 0.0 < s_bar <= 1.0:
        raise config_error("s̄ debe estar en (0,1]", code="S_BAR_INVALIDO", s_bar=s_bar)
    if not 0.0 < delta <= 1.0 - s_bar:
        raise config_error("δ debe estar en (0, 1−s̄]", code="DELTA_INVALIDO", delta=delta, s_bar=s_bar)
    samples = samples or settings.bound_samples
    up, down = gamma_extrema(N)
    pi_n = math.pi ** (N / 2.0)
    c_up = 2.0 * up / pi_n
    c_low_delta = down * s_bar / (2.0 * pi_n) * delta

    for s in np.linspace(0.0, 1.0, samples):
        if c_ns(N, float(s)) > c_up * (1.0 + 1e-12):
            raise invariant_error("c_{N,s} supera la cota superior", s=float(s), c_up=c_up)
    for s in np.linspace(s_bar, 1.0 - delta, samples):
        if c_ns(N, float(s)) < c_low_delta * (1.0 - 1e-12):
            raise invariant_error("c_{N,s} por debajo de la cota inferior", s=float(s), c_low=c_low_delta)
    return c_up, c_low_delta


def gamma_bar_bound(N: int, R: float, s_bar: float) -> float:
    """Extremo superior (excluido) del rango admisible de γ̄."""
    if R <= 0.0:
        raise config_error("R debe ser positivo", code="RADIO_INVALIDO", R=R)
    up, down = gamma_extrema(N)
    return down * s_bar / (4.0 * up * max(1.0, (2.0 * R) ** 2))


def _density_integral(piece: DensityPiece, lo: float, hi: float) -> float:
    a = max(lo, piece.lo)
    b = min(hi, piece.hi)
    if b <= a:
        return 0.0
    inner = [p for p in piece.breakpoints if a < p < b]
    pts = np.array([a, *inner, b])
    vals = np.interp(pts, piece.breakpoints, piece.values)
    return float(np.sum(0.5 * (vals[1:] + vals[:-1]) * np.diff(pts)))


def measure_mass(
    component: MeasureComponent,
    lo: float,
    hi: float,
    lo_closed: bool = True,
    hi_closed: bool = True,
) -> float:
    """Masa de la componente sobre el intervalo indicado, respetando la clausura de extremos."""
    if not 0.0 <= lo <= hi <= 1.0:
        raise config_error("Intervalo fuera de [0,1]", code="INTERVALO_INVALIDO", lo=lo, hi=hi)
    total = 0.0
    for s, w in component.atoms:
        above = s > lo or (lo_closed and s == lo)
        below = s < hi or (hi_closed and s == hi)
        if above and below:
            total += w
    # las densidades no cargan puntos: la clausura no cambia su integral
    total += sum(_density_integral(p, lo, hi) for p in component.densities)
    return total


def _s_sharp(plus: MeasureComponent, s_bar: float, points: int) -> float:
    grid = np.linspace(0.0, 1.0, points)
    for s in grid[::-1]:
        if s <= s_bar:
            break
        if measure_mass(plus, float(s), 1.0) > 0.0:
            return float(s)
    return s_bar


def check_hypotheses(
    mu: SignedMeasure,
    R: float,
    gamma_bar: Optional[float] = None,
    grid_points: Optional[int] = None,
) -> HypothesisReport:
    """Verifica (1.5), (1.6), calcula γ mínimo, s♯, 2*_{s♯} y busca un δ testigo de (1.12)."""
    N = mu.dimension
    s_bar = mu.s_bar
    points = grid_points or settings.hypothesis_grid_points
    upper = gamma_bar_bound(N, R, s_bar)
    if gamma_bar is None:
        gamma_bar = settings.gamma_bar_fraction * upper
    if not 0.0 <= gamma_bar < upper:
        raise config_error(
            "γ̄ fuera del rango admisible",
            code="GAMMA_BAR_FUERA_DE_RANGO",
            gamma_bar=gamma_bar,
            upper=upper,
        )

    mass_plus_top = measure_mass(mu.plus, s_bar, 1.0)
    mass_minus_top = measure_mass(mu.minus, s_bar, 1.0)
    if mass_plus_top <= 0.0:
        raise hypothesis_error(
            "μ⁺([s̄,1]) debe ser positiva", code="HIPOTESIS_MU0", s_bar=s_bar
        )
    if mass_minus_top > 0.0:
        raise hypothesis_error(
            "μ⁻ no puede cargar masa en [s̄,1]",
            code="HIPOTESIS_MU1",
            s_bar=s_bar,
            masa=mass_minus_top,
        )

    gamma_min = measure_mass(mu.minus, 0.0, s_bar, True, False) / mass_plus_top

    s_sharp = _s_sharp(mu.plus, s_bar, points)
    two_star: Optional[float] = None
    if N > 2.0 * s_sharp:
        two_star = 2.0 * N / (N - 2.0 * s_sharp)

    minus_open = measure_mass(mu.minus, 0.0, s_bar, False, False)
    delta_star: Optional[float] = None
    if s_bar < 1.0:
        for k in range(1, points + 1):
            delta = (1.0 - s_bar) * k / points
            rhs = gamma_bar * delta * measure_mass(mu.plus, s_bar, max(s_bar, 1.0 - delta))
            if minus_open <= rhs:
                delta_star = delta
                break

    report = HypothesisReport(
        s_bar=s_bar,
        dimension=N,
        R=R,
        mu0_ok=True,
        mass_plus_top=mass_plus_top,
        mu1_ok=True,
        mass_minus_top=mass_minus_top,
        gamma_min=gamma_min,
        s_sharp=s_sharp,
        s_sharp_resolution=1.0 / (points - 1),
        two_star=two_star,
        two_star_infinite=two_star is None,
        mu2forte_ok=delta_star is not None,
        delta_star=delta_star,
        minus_open_mass=minus_open,
        gamma_bar_used=gamma_bar,
        gamma_bar_upper=upper,
    )
    logger.info(
        "Hipótesis verificadas",
        extra={"gamma_min": gamma_min, "delta_star": delta_star, "s_sharp": s_sharp},
    )
    return report


def quadrature_decompose(mu: SignedMeasure, Q: Optional[int] = None) -> List[Tuple[float, float]]:
    """Reduce μ a una combinación finita con signo de exponentes.

    Los átomos pasan tal cual; cada tramo de densidad aporta Q nodos de
    Gauss–Legendre ponderados por φ. Orden: s decreciente.
    """
    Q = Q or settings.quadrature_nodes
    if Q < 1:
        raise config_error("Q debe ser ≥ 1", code="CUADRATURA_INVALIDA", Q=Q)
    x, w = leggauss(Q)
    entries: List[Tuple[float, float]] = []
    for sign, comp in ((1.0, mu.plus), (-1.0, mu.minus)):
        entries.extend((float(s), sign * float(wt)) for s, wt in comp.atoms)
        for piece in comp.densities:
            for a, b, va, vb in piece.segments():
                nodes = 0.5 * (b - a) * x + 0.5 * (a + b)
                phi = va + (vb - va) * (nodes - a) / (b - a)
                weights = 0.5 * (b - a) * w * phi
                entries.extend(
                    (float(s), sign * float(wt)) for s, wt in zip(nodes, weights) if wt != 0.0
                )
    return sorted(entries, key=lambda e: (-e[0], -e[1]))


def power_ratio_check(
    mu: SignedMeasure,
    R: float,
    rng: np.random.Generator,
    samples: int = 100,
) -> Tuple[bool, float]:
    """Desigualdad de comparación de potencias ζ^{−2s} entre μ⁻ en (0,s̄) y μ⁺ en [s̄,S).

    Devuelve (se cumple, holgura mínima relativa).
    """
    entries = quadrature_decompose(mu)
    s_bar = mu.s_bar
    plus = [(s, w) for s, w in entries if w > 0.0 and s >= s_bar]
    minus = [(s, -w) for s, w in entries if w < 0.0 and 0.0 < s < s_bar]
    minus_mass = sum(w for _, w in minus)
    two_r = 2.0 * R
    c_left = min(1.0, two_r ** (2.0 * s_bar))
    c_right = max(two_r ** (2.0 * s_bar), two_r**2)

    worst = math.inf
    ok = True
    for _ in range(samples):
        zeta = 0.0
        while zeta <= 0.0:
            zeta = float(rng.uniform(0.0, two_r))
        S = float(rng.uniform(s_bar, 1.0))
        plus_mass = sum(w for s, w in plus if s < S)
        lhs = c_left * plus_mass * sum(w * zeta ** (-2.0 * s) for s, w in minus)
        rhs = c_right * minus_mass * sum(w * zeta ** (-2.0 * s) for s, w in plus if s < S)
        if lhs > rhs * (1.0 + 1e-12):
            ok = False
        scale = max(abs(lhs), abs(rhs), 1e-300)
        worst = min(worst, (rhs - lhs) / scale)
    return ok, (0.0 if worst is math.inf else worst)
