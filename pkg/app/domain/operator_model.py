from __future__ import annotations

import threading
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional, Tuple

import numpy as np

from app.domain.grid_model import Grid
from app.domain.measure_model import SignedMeasure


class FormPart(str, Enum):
    PLUS = "plus"
    MINUS = "minus"
    SIGNED = "signed"


@dataclass(frozen=True, eq=False)
class FormMatrix:
    """Matriz densa de (−Δ)^s con condición exterior de Dirichlet."""

    s: float
    matrix: np.ndarray = field(repr=False)
    grid: Grid = field(repr=False)


@dataclass(eq=False)
class SuperposedOperator:
    """A_μ = A₊ − A₋ ensamblado sobre una malla."""

    grid: Grid
    measure: SignedMeasure
    A_plus: np.ndarray = field(repr=False)
    A_minus: np.ndarray = field(repr=False)
    A_mu: np.ndarray = field(repr=False)
    entries: Tuple[Tuple[float, float], ...] = ()
    _margin: Optional[float] = field(default=None, repr=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def matrix(self, part: FormPart) -> np.ndarray:
        if part is FormPart.PLUS:
            return self.A_plus
        if part is FormPart.MINUS:
            return self.A_minus
        return self.A_mu

    def cached_margin(self, compute: Callable[[], float]) -> float:
        """Calcula el margen de coercividad una sola vez (un único escritor)."""
        with self._lock:
            if self._margin is None:
                self._margin = float(compute())
            return self._margin
