"""
Schemas Pydantic para el chequeo de hipótesis sobre la medida
"""

from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator


class HypothesisReport(BaseModel):
    """Resultado de check_hypotheses"""

    s_bar: float
    dimension: int
    R: float

    mu0_ok: bool = Field(..., description="μ⁺([s̄,1]) > 0")
    mass_plus_top: float = Field(..., ge=0)
    mu1_ok: bool = Field(..., description="μ⁻([s̄,1]) = 0")
    mass_minus_top: float = Field(..., ge=0)

    gamma_min: float = Field(..., ge=0, description="μ⁻([0,s̄)) / μ⁺([s̄,1])")

    s_sharp: float
    s_sharp_resolution: float
    two_star: Optional[float] = None
    two_star_infinite: bool = False

    mu2forte_ok: bool
    delta_star: Optional[float] = None
    minus_open_mass: float = Field(..., ge=0, description="μ⁻((0,s̄))")
    gamma_bar_used: float = Field(..., ge=0)
    gamma_bar_upper: float = Field(..., gt=0)

    model_config = ConfigDict(
        json_schema_extra={
            "example": {
                "s_bar": 0.6,
                "dimension": 1,
                "R": 1.0,
                "mu0_ok": True,
                "mass_plus_top": 2.0,
                "mu1_ok": True,
                "mass_minus_top": 0.0,
                "gamma_min": 0.001,
                "s_sharp": 1.0,
                "s_sharp_resolution": 1e-4,
                "two_star": None,
                "two_star_infinite": True,
                "mu2forte_ok": True,
                "delta_star": 0.2134,
                "minus_open_mass": 0.002,
                "gamma_bar_used": 0.009375,
                "gamma_bar_upper": 0.01875,
            }
        }
    )

    @model_validator(mode="after")
    def validar_testigo(self):
        if self.mu2forte_ok and self.delta_star is None:
            raise ValueError("delta_star es obligatorio cuando mu2forte_ok es verdadero")
        if self.two_star_infinite and self.two_star is not None:
            raise ValueError("two_star debe omitirse cuando es infinito")
        return self
