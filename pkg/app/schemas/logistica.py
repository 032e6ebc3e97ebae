"""
Schemas Pydantic para el problema logístico estacionario
"""

from typing import List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field

from app.config.settings import Settings, settings
from app.domain.grid_model import GridFunction
from app.domain.logistic_model import Classification, ThresholdVerdict


class SolverOptions(BaseModel):
    """Parámetros del descenso de energía"""

    tol: Optional[float] = Field(None, gt=0, description="None = tol_per_node·n")
    tol_per_node: float = Field(default=1e-10, gt=0)
    max_iters: int = Field(default=50_000, ge=1)
    armijo_c1: float = Field(default=1e-4, gt=0, lt=1)
    backtracking_factor: float = Field(default=0.5, gt=0, lt=1)
    max_backtracks: int = Field(default=60, ge=1)
    trivial_factor: float = Field(default=1e-6, gt=0)
    metric: Literal["hessian", "energy", "euclidean"] = "hessian"
    seed: int = Field(default=20240601, ge=0)
    max_workers: int = Field(default=4, ge=1)

    @classmethod
    def from_settings(cls, cfg: Settings = settings, **overrides) -> "SolverOptions":
        base = {
            "tol_per_node": cfg.solver_tol_per_node,
            "max_iters": cfg.max_iters,
            "armijo_c1": cfg.armijo_c1,
            "backtracking_factor": cfg.backtracking_factor,
            "max_backtracks": cfg.max_backtracks,
            "trivial_factor": cfg.trivial_factor,
            "metric": cfg.descent_metric,
            "seed": cfg.default_seed,
            "max_workers": cfg.max_workers,
        }
        base.update(overrides)
        return cls(**base)

    def tolerance(self, n: int) -> float:
        return self.tol if self.tol is not None else self.tol_per_node * n


class StartRecord(BaseModel):
    """Resultado de un arranque del multistart"""

    name: str
    initial_energy: float
    final_energy: float
    grad_norm: float
    iterations: int
    converged: bool


class ThresholdReport(BaseModel):
    """Condiciones de extinción y supervivencia evaluadas con λ_μ(Ω)"""

    eigenvalue: float
    sup_sigma: float
    inf_sigma: float
    tau: float
    pollination: float = Field(..., description="h·Σ e (J∗e)")
    extinction_lhs: float = Field(..., description="sup σ + τ")
    survival_rhs: float = Field(..., description="inf σ + τ·h·Σ e(J∗e)")
    extinction_slack: float
    survival_slack: float
    verdict: ThresholdVerdict


class SolveReport(BaseModel):
    """Resultado de minimize_E"""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    u: GridFunction = Field(..., exclude=True)
    energy: float
    grad_norm: float
    tolerance: float
    iterations: int
    converged: bool
    classification: Classification
    sup_norm: float
    triviality_threshold: float
    weak_residual: float
    winner: str
    starts: List[StartRecord]
    projection: Literal["mu2forte", "certificado_discreto", "ninguna"]
    min_value: float
