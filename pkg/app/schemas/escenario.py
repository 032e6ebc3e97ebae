"""
Schemas Pydantic para escenarios y reportes
"""

from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

from pydantic import BaseModel, Field

from app.schemas.config import ScenarioConfig


class ScenarioKind(str, Enum):
    EXTINCTION_SURVIVAL = "extinction_survival"
    NEGATIVE_COMPONENT = "negative_component"
    FRAGMENTATION = "fragmentation"
    SCALING_SURVIVAL = "scaling_survival"
    TWO_MEASURES = "two_measures"
    MODULUS_COUNTEREXAMPLE = "modulus_counterexample"
    APPENDIX_CHECK = "appendix_check"


class ReportStatus(str, Enum):
    CONSISTENT = "consistent"
    INCONSISTENT = "inconsistent"
    INCONCLUSIVE = "inconclusive"


class Scenario(ScenarioConfig):
    kind: ScenarioKind
    seed: int = Field(..., ge=0)


class EigenRow(BaseModel):
    """Fila de eigenvalues.csv"""

    label: str
    domain: str
    measure: str
    r: Optional[float] = None
    eigenvalue: float
    residual: float
    gap: Optional[float] = None


class Report(BaseModel):
    kind: ScenarioKind
    params: Dict[str, Any]
    eigenvalues: Dict[str, float] = Field(default_factory=dict)
    windows: Dict[str, List[float]] = Field(default_factory=dict)
    classifications: Dict[str, str] = Field(default_factory=dict)
    slacks: Dict[str, float] = Field(default_factory=dict)
    checks: Dict[str, bool] = Field(default_factory=dict)
    status: ReportStatus
    paper_consistent: bool
    diagnostics: List[str] = Field(default_factory=list)
    metadata: Dict[str, Any] = Field(default_factory=dict)

    eigen_rows: List[EigenRow] = Field(default_factory=list, exclude=True)
    profiles: Dict[str, List[Tuple[float, float]]] = Field(default_factory=dict, exclude=True)


class CriterionResult(BaseModel):
    """Veredicto de un criterio del selftest"""

    id: int = Field(..., ge=1)
    name: str
    ok: bool
    detail: str = ""


class SelftestSummary(BaseModel):
    seed: int
    ok: bool
    criteria: List[CriterionResult]
