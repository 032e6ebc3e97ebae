"""
Servicio de mallas: construcción de la malla de centros de celda,
núcleos de polinización y la convolución J∗u.
"""

from __future__ import annotations

import logging
import math

import numpy as np

from app.domain.grid_model import Domain1D, Grid, GridFunction, Kernel, KernelKind
from app.services.errors import discretization_error

logger = logging.getLogger(__name__)

MIN_CELLS_PER_UNIT = 8


def build_grid(domain: Domain1D, n_per_unit: int) -> Grid:
    """Malla de centros de celda (p + 1/2)·h, h = 1/n_per_unit.

    Cada intervalo se ajusta a la red; la geometría ajustada es la que ven
    los demás módulos.
    """
    if n_per_unit < MIN_CELLS_PER_UNIT:
        raise discretization_error(
            f"n_per_unit debe ser ≥ {MIN_CELLS_PER_UNIT}",
            code="RESOLUCION_INSUFICIENTE",
            n_per_unit=n_per_unit,
        )
    h = 1.0 / n_per_unit
    pieces: list[np.ndarray] = []
    snapped: list[tuple[float, float]] = []
    blocks: list[tuple[int, int]] = []
    row = 0
    last_end: int | None = None
    for a, b in domain.intervals:
        if b - a < 2.0 * h:
            raise discretization_error(
                "Intervalo más corto que 2h",
                code="INTERVALO_DEGENERADO",
                intervalo=[a, b],
                h=h,
            )
        ka = math.floor(a / h + 0.5)
        kb = math.floor(b / h + 0.5)
        if kb - ka < 2:
            raise discretization_error(
                "Intervalo con menos de dos celdas tras el ajuste",
                code="INTERVALO_DEGENERADO",
                intervalo=[a, b],
                h=h,
            )
        if last_end is not None and ka <= last_end:
            raise discretization_error(
                "Intervalos unidos por el ajuste a la red",
                code="INTERVALOS_FUSIONADOS",
                intervalo=[a, b],
                h=h,
            )
        pieces.append(np.arange(ka, kb, dtype=np.int64))
        snapped.append((ka * h, kb * h))
        blocks.append((row, row + kb - ka))
        row += kb - ka
        last_end = kb

    lattice = np.concatenate(pieces)
    lattice.setflags(write=False)
    logger.debug("Malla construida", extra={"n": int(lattice.size), "h": h})
    return Grid(h=h, lattice=lattice, snapped=tuple(snapped), blocks=tuple(blocks))


def make_kernel(kind: KernelKind | str, width: float, grid: Grid) -> Kernel:
    """Núcleo simétrico discreto con masa h·Σ = 1."""
    kind = KernelKind(kind)
    h = grid.h
    if width < 2.0 * h * (1.0 - 1e-12):
        raise discretization_error(
            "El ancho del núcleo debe ser ≥ 2h",
            code="NUCLEO_DEMASIADO_ANGOSTO",
            width=width,
            h=h,
        )
    if kind is KernelKind.TOPHAT:
        K = int(math.floor(width / (2.0 * h) + 1e-9))
        weights = np.full(2 * K + 1, 1.0 / width)
    else:
        K = int(math.floor(width / h + 1e-9))
        sd = width / 4.0
        half = np.exp(-((np.arange(1, K + 1) * h) ** 2) / (2.0 * sd**2))
        weights = np.concatenate([half[::-1], [1.0], half])
    weights = weights / (h * weights.sum())
    return Kernel(kind=kind, width=float(width), h=h, weights=weights)


def convolve(J: Kernel, u: GridFunction) -> GridFunction:
    """(J∗u)_i = h·Σ_k J(k)·u_{i−k}, con u = 0 fuera de los nodos."""
    grid = u.grid
    if not math.isclose(J.h, grid.h, rel_tol=1e-12):
        raise discretization_error("Núcleo y malla con distinto h", code="MALLA_INCOMPATIBLE")
    lat = grid.lattice
    p0 = int(lat.min())
    span = int(lat.max()) - p0 + 1
    dense = np.zeros(span)
    dense[lat - p0] = u.values
    K = J.half_width
    full = np.convolve(dense, J.weights, mode="full")
    out = full[K : K + span]
    return GridFunction(grid, grid.h * out[lat - p0])


def kernel_matrix(J: Kernel, grid: Grid) -> np.ndarray:
    """Matriz densa M con (J∗u) = M·u."""
    d = grid.offsets
    K = J.half_width
    M = np.zeros((grid.n, grid.n))
    mask = d <= K
    M[mask] = grid.h * J.weights[K + d[mask]]
    return M


def inner(u: GridFunction, v: GridFunction) -> float:
    """⟨u,v⟩_{L²} = h·Σ u_i v_i"""
    _same_grid(u, v)
    return float(u.grid.h * np.dot(u.values, v.values))


def l2_norm(u: GridFunction) -> float:
    return math.sqrt(max(inner(u, u), 0.0))


def _same_grid(u: GridFunction, v: GridFunction) -> None:
    if not u.grid.same_as(v.grid):
        raise discretization_error("Funciones sobre mallas distintas", code="MALLA_INCOMPATIBLE")
