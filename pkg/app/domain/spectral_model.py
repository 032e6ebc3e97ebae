from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from app.domain.grid_model import GridFunction


@dataclass(frozen=True, eq=False)
class EigenPair:
    """Autopar principal discreto (λ_μ(Ω), e_μ) con sus diagnósticos."""

    eigenvalue: float
    e: GridFunction = field(repr=False)
    residual: float
    second: Optional[float]
    sign_violation: float
    euler_lagrange_residual: float
    method: str = "dense"

    @property
    def gap(self) -> Optional[float]:
        if self.second is None:
            return None
        return self.second - self.eigenvalue

    def is_simple(self, ratio: float) -> bool:
        gap = self.gap
        return gap is not None and gap > ratio * abs(self.eigenvalue)
