"""
Schemas Pydantic para autopares y comparaciones de autovalores
"""

from typing import List, Optional, Tuple

from pydantic import BaseModel, Field


class EigenSummary(BaseModel):
    """Resumen serializable de un EigenPair"""

    eigenvalue: float = Field(..., alias="lambda")
    residual: float = Field(..., ge=0)
    gap: Optional[float] = None
    sign_violation: float = Field(..., ge=0)
    euler_lagrange_residual: float = Field(..., ge=0)
    coercivity_margin: float
    n: int = Field(..., ge=1)
    h: float = Field(..., gt=0)
    method: str = "dense"
    snapped: List[Tuple[float, float]] = Field(default_factory=list)

    model_config = {"populate_by_name": True}


class ScalingCheck(BaseModel):
    """inf_Σ r^{2s}·λ(Ω_r) ≤ λ(Ω) ≤ sup_Σ r^{2s}·λ(Ω_r)"""

    r: float = Field(..., gt=0)
    lambda_base: float
    lambda_scaled: float
    inf_factor: float
    sup_factor: float
    lower_ok: bool
    upper_ok: bool
    slack_lower: float
    slack_upper: float


class MonotonicityCheck(BaseModel):
    """U₁ ⊆ U₂ ⇒ λ(U₂) ≤ λ(U₁)"""

    lambda_inner: float
    lambda_outer: float
    ok: bool
    slack: float


class UnionCheck(BaseModel):
    """λ(Ω₁ ∪ Ω₂) frente a λ(Ω₁) para conjuntos congruentes"""

    lambda_first: float
    lambda_second: float
    lambda_union: float
    congruent_ok: bool
    strict_drop: bool
    slack: float
    local_measure: bool
    local_equality_ok: Optional[bool] = None


class NegativeComponentCheck(BaseModel):
    """λ(μ⁺ − εμ⁻) < λ(μ⁺)"""

    eps: float = Field(..., gt=0, lt=1)
    lambda_plus: float
    lambda_eps: float
    ok: bool
    slack: float


class ComparisonRecord(BaseModel):
    scaling: List[ScalingCheck] = Field(default_factory=list)
    monotonicity: Optional[MonotonicityCheck] = None
    union: Optional[UnionCheck] = None
    negative_component: List[NegativeComponentCheck] = Field(default_factory=list)

    @property
    def all_ok(self) -> bool:
        flags = [c.lower_ok and c.upper_ok for c in self.scaling]
        flags += [c.ok for c in self.negative_component]
        if self.monotonicity is not None:
            flags.append(self.monotonicity.ok)
        if self.union is not None:
            flags.append(self.union.strict_drop or bool(self.union.local_equality_ok))
        return all(flags)
