"""
Schemas Pydantic para el archivo de configuración de una corrida
Un único documento JSON, versionado y con claves desconocidas rechazadas
"""

from typing import Dict, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from app.domain.grid_model import KernelKind

Sign = Literal["+", "-"]


class AtomConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    s: float = Field(..., ge=0, le=1, description="Exponente del átomo")
    weight: float = Field(..., ge=0)
    sign: Sign = "+"


class DensityConfig(BaseModel):
    """Densidad lineal a trozos φ(s) sobre [lo, hi]"""

    model_config = ConfigDict(extra="forbid")

    lo: float = Field(..., ge=0, le=1)
    hi: float = Field(..., ge=0, le=1)
    breakpoints: Optional[List[float]] = Field(
        None, description="Puntos de quiebre; si se omiten, values tiene 1 (constante) o 2 (lineal) valores"
    )
    values: List[float] = Field(..., min_length=1)
    sign: Sign = "+"

    @field_validator("values")
    @classmethod
    def validar_valores(cls, v: List[float]) -> List[float]:
        if any(x < 0 for x in v):
            raise ValueError("Los valores de la densidad deben ser no negativos")
        return v

    @model_validator(mode="after")
    def validar_tramos(self):
        if self.lo >= self.hi:
            raise ValueError("lo debe ser menor que hi")
        if self.breakpoints is None:
            if len(self.values) > 2:
                raise ValueError("Sin breakpoints, values admite 1 o 2 elementos")
            return self
        if len(self.breakpoints) != len(self.values):
            raise ValueError("breakpoints y values deben tener la misma longitud")
        if self.breakpoints[0] != self.lo or self.breakpoints[-1] != self.hi:
            raise ValueError("breakpoints debe empezar en lo y terminar en hi")
        return self

    def resolved(self) -> Tuple[List[float], List[float]]:
        if self.breakpoints is not None:
            return list(self.breakpoints), list(self.values)
        if len(self.values) == 1:
            return [self.lo, self.hi], [self.values[0], self.values[0]]
        return [self.lo, self.hi], list(self.values)


class MeasureConfig(BaseModel):
    model_config = ConfigDict(
        extra="forbid",
        json_schema_extra={
            "example": {
                "label": "apendice",
                "s_bar": 0.6,
                "atoms": [
                    {"s": 1.0, "weight": 1.0},
                    {"s": 0.6, "weight": 1.0},
                    {"s": 0.3, "weight": 0.05, "sign": "-"},
                ],
            }
        },
    )

    label: Optional[str] = None
    s_bar: float = Field(..., gt=0, le=1)
    dimension: int = Field(default=1, ge=1)
    atoms: List[AtomConfig] = Field(default_factory=list)
    densities: List[DensityConfig] = Field(default_factory=list)

    @model_validator(mode="after")
    def validar_no_vacia(self):
        if not self.atoms and not self.densities:
            raise ValueError("La medida necesita al menos un átomo o una densidad")
        return self


class DomainConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    intervals: List[Tuple[float, float]] = Field(..., min_length=1)

    @field_validator("intervals")
    @classmethod
    def validar_intervalos(cls, v: List[Tuple[float, float]]) -> List[Tuple[float, float]]:
        for a, b in v:
            if not a < b:
                raise ValueError(f"Intervalo ({a}, {b}) inválido: se requiere a < b")
        return v


class KernelConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: KernelKind = KernelKind.TOPHAT
    width: float = Field(..., gt=0)


class ResourceConfig(BaseModel):
    """σ, ν, τ constantes; sigma="auto" elige el punto medio de la ventana"""

    model_config = ConfigDict(extra="forbid")

    sigma: Union[float, Literal["auto"]] = "auto"
    nu: float = Field(default=1.0, ge=0)
    tau: float = Field(default=0.0, ge=0)
    m: Optional[float] = Field(None, ge=1)

    @field_validator("sigma")
    @classmethod
    def validar_sigma(cls, v):
        if v != "auto" and v < 0:
            raise ValueError("sigma debe ser no negativo")
        return v


class ScenarioConfig(BaseModel):
    """Parámetros de escenario; lo omitido toma el valor por defecto del tipo"""

    model_config = ConfigDict(extra="forbid")

    measures: Optional[List[MeasureConfig]] = None
    control_measure: Optional[MeasureConfig] = None
    domains: Optional[List[DomainConfig]] = None
    n_per_unit: Optional[int] = Field(None, ge=8)
    resources: Optional[ResourceConfig] = None
    kernel: Optional[KernelConfig] = None
    sigma_values: Optional[List[float]] = None
    eps_values: Optional[List[float]] = None
    r_values: Optional[List[float]] = None
    alpha: Optional[float] = Field(None, gt=0)
    gamma_bar: Optional[float] = Field(None, ge=0)
    modulus_samples: Optional[int] = Field(None, ge=1)

    @field_validator("eps_values")
    @classmethod
    def validar_eps(cls, v):
        if v is not None and any(not 0 < e < 1 for e in v):
            raise ValueError("Cada ε debe estar en (0,1)")
        return v

    @field_validator("r_values")
    @classmethod
    def validar_radios(cls, v):
        if v is not None and any(r <= 0 for r in v):
            raise ValueError("Los radios deben ser positivos")
        return v


class Config(BaseModel):
    model_config = ConfigDict(extra="forbid")

    version: Literal[1] = 1
    measure: Optional[MeasureConfig] = None
    domain: Optional[DomainConfig] = None
    n_per_unit: Optional[int] = Field(None, ge=8)
    kernel: Optional[KernelConfig] = None
    resources: ResourceConfig = Field(default_factory=ResourceConfig)
    scenario: Optional[ScenarioConfig] = None
    output_dir: Optional[str] = None
    seed: Optional[int] = Field(None, ge=0)
    tolerances: Dict[str, Union[bool, int, float, str]] = Field(default_factory=dict)
