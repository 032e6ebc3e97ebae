from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np

from app.domain.grid_model import GridFunction, Kernel


class Classification(str, Enum):
    TRIVIAL = "trivial"
    NONTRIVIAL = "nontrivial"


class ThresholdVerdict(str, Enum):
    EXTINCTION_CERTIFIED = "extinction_certified"
    SURVIVAL_CERTIFIED = "survival_certified"
    INDETERMINATE = "indeterminate"


@dataclass(frozen=True, eq=False)
class LogisticProblem:
    """Datos de L_μ u = (σ − νu)u + τ(J∗u) en Ω con u = 0 fuera."""

    sigma: GridFunction = field(repr=False)
    nu: GridFunction = field(repr=False)
    tau: float
    kernel: Kernel = field(repr=False)
    m: Optional[float] = None

    @property
    def grid(self):
        return self.sigma.grid

    @property
    def hypothesis_ok(self) -> bool:
        """(σ+τ)³/ν² integrable: en la malla, ν > 0 donde σ + τ > 0."""
        needs = (self.sigma.values + self.tau) > 0.0
        return bool(np.all(self.nu.values[needs] > 0.0))
