from typing import Literal

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    app_name: str = "FKPP Fraccional"

    # Autopares
    eigen_residual_tol: float = Field(default=1e-8, gt=0)
    euler_lagrange_tol: float = Field(default=1e-8, gt=0)
    eigen_agreement_tol: float = Field(default=1e-9, gt=0)
    simplicity_gap_ratio: float = Field(default=1e-8, ge=0)
    eigen_cross_check: bool = Field(default=False)
    inverse_iteration_max_iters: int = Field(default=500, ge=1)
    euler_lagrange_samples: int = Field(default=10, ge=1)

    # Minimización de la energía
    armijo_c1: float = Field(default=1e-4, gt=0, lt=1)
    backtracking_factor: float = Field(default=0.5, gt=0, lt=1)
    max_backtracks: int = Field(default=60, ge=1)
    solver_tol_per_node: float = Field(default=1e-10, gt=0)  # tol = valor * n
    max_iters: int = Field(default=50_000, ge=1)
    trivial_factor: float = Field(default=1e-6, gt=0)
    descent_metric: Literal["hessian", "energy", "euclidean"] = "hessian"

    # Medida
    quadrature_nodes: int = Field(default=8, ge=1)
    gamma_bar_fraction: float = Field(default=0.5, gt=0, lt=1)
    hypothesis_grid_points: int = Field(default=10_000, ge=10)
    bound_samples: int = Field(default=100, ge=1)
    gamma_scan_step: float = Field(default=1e-4, gt=0, le=1e-2)

    # Experimentos
    scaling_rel_tol: float = Field(default=0.02, gt=0)
    window_safety: float = Field(default=10.0, ge=1)
    default_seed: int = Field(default=20240601, ge=0)
    max_workers: int = Field(default=4, ge=1)
    assembly_cache_size: int = Field(default=64, ge=0)
    output_dir: str = "resultados"

    model_config = SettingsConfigDict(
        env_prefix="FKPP_",
        env_file=".env",
        case_sensitive=False,
        extra="ignore",
    )


settings = Settings()
