"""
Mallas uniformes 1D sobre uniones finitas de intervalos.

Los nodos son centros de celda (p + 1/2)·h con p entero; fuera de los
nodos toda función de malla vale cero.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Callable, Dict, Tuple

import numpy as np


@dataclass(frozen=True)
class Domain1D:
    intervals: Tuple[Tuple[float, float], ...]

    def __post_init__(self) -> None:
        if not self.intervals:
            raise ValueError("DOMINIO_VACIO: se requiere al menos un intervalo")
        for a, b in self.intervals:
            if not a < b:
                raise ValueError(f"INTERVALO_INVALIDO: ({a}, {b})")
        for (_, b), (a, _) in zip(self.intervals, self.intervals[1:]):
            if not b < a:
                raise ValueError("INTERVALOS_SOLAPADOS: las clausuras deben ser disjuntas y estar ordenadas")

    @classmethod
    def from_intervals(cls, intervals) -> "Domain1D":
        return cls(tuple(sorted((float(a), float(b)) for a, b in intervals)))

    @property
    def R(self) -> float:
        """Menor radio con Ω ⊂ (−R, R)."""
        return max(abs(self.intervals[0][0]), abs(self.intervals[-1][1]))

    @property
    def total_length(self) -> float:
        return sum(b - a for a, b in self.intervals)

    def scaled(self, r: float) -> "Domain1D":
        return Domain1D(tuple((r * a, r * b) for a, b in self.intervals))

    def translated(self, shift: float) -> "Domain1D":
        return Domain1D(tuple((a + shift, b + shift) for a, b in self.intervals))

    def union(self, other: "Domain1D") -> "Domain1D":
        return Domain1D.from_intervals(self.intervals + other.intervals)


@dataclass(frozen=True, eq=False)
class Grid:
    h: float
    lattice: np.ndarray  # índices enteros p, nodo x = (p + 1/2)·h
    snapped: Tuple[Tuple[float, float], ...]
    blocks: Tuple[Tuple[int, int], ...]  # filas [inicio, fin) por intervalo

    @property
    def n(self) -> int:
        return int(self.lattice.size)

    @cached_property
    def nodes(self) -> np.ndarray:
        x = (self.lattice + 0.5) * self.h
        x.setflags(write=False)
        return x

    @cached_property
    def offsets(self) -> np.ndarray:
        """|p_i − p_j| para todo par de filas."""
        d = np.abs(self.lattice[:, None] - self.lattice[None, :])
        d.setflags(write=False)
        return d

    @cached_property
    def row_of(self) -> Dict[int, int]:
        return {int(p): i for i, p in enumerate(self.lattice)}

    @cached_property
    def key(self) -> Tuple[float, bytes]:
        return (self.h, self.lattice.tobytes())

    @property
    def R(self) -> float:
        return max(abs(self.snapped[0][0]), abs(self.snapped[-1][1]))

    def same_as(self, other: "Grid") -> bool:
        return self is other or self.key == other.key


@dataclass(frozen=True, eq=False)
class GridFunction:
    grid: Grid
    values: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        vals = np.array(self.values, dtype=float)
        if vals.shape != (self.grid.n,):
            raise ValueError(
                f"LONGITUD_INVALIDA: {vals.shape} valores para {self.grid.n} nodos"
            )
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @classmethod
    def zeros(cls, grid: Grid) -> "GridFunction":
        return cls(grid, np.zeros(grid.n))

    @classmethod
    def constant(cls, grid: Grid, value: float) -> "GridFunction":
        return cls(grid, np.full(grid.n, float(value)))

    @classmethod
    def from_callable(cls, grid: Grid, f: Callable[[np.ndarray], np.ndarray]) -> "GridFunction":
        return cls(grid, np.asarray(f(grid.nodes), dtype=float))

    def with_values(self, values: np.ndarray) -> "GridFunction":
        return GridFunction(self.grid, values)

    @property
    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values))) if self.values.size else 0.0


class KernelKind(str, Enum):
    TOPHAT = "tophat"
    GAUSSIAN = "gaussian"


@dataclass(frozen=True, eq=False)
class Kernel:
    kind: KernelKind
    width: float
    h: float
    weights: np.ndarray = field(repr=False)  # índice k + K para el desplazamiento k

    def __post_init__(self) -> None:
        w = np.array(self.weights, dtype=float)
        if w.ndim != 1 or w.size % 2 == 0:
            raise ValueError("NUCLEO_INVALIDO: se requiere un número impar de pesos")
        if np.any(w < 0.0):
            raise ValueError("NUCLEO_INVALIDO: pesos negativos")
        if not np.array_equal(w, w[::-1]):
            raise ValueError("NUCLEO_ASIMETRICO: J(-x) debe ser igual a J(x)")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @property
    def half_width(self) -> int:
        return (self.weights.size - 1) // 2

    def weight(self, k: int) -> float:
        K = self.half_width
        if abs(k) > K:
            return 0.0
        return float(self.weights[k + K])

    @property
    def mass(self) -> float:
        return float(self.h * self.weights.sum())
