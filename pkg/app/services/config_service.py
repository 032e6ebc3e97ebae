"""
Carga y traducción del archivo de configuración a objetos de dominio.
"""

from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Any, Dict, Optional

from pydantic import ValidationError

from app.config.settings import Settings, settings
from app.domain.grid_model import Domain1D, Grid, Kernel
from app.domain.measure_model import DensityPiece, MeasureComponent, SignedMeasure
from app.schemas.config import Config, DomainConfig, KernelConfig, MeasureConfig
from app.services.errors import config_error
from app.services.grid_service import make_kernel

logger = logging.getLogger(__name__)


def load_config(path: Path | str) -> Config:
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise config_error(f"No existe el archivo {path}", code="CONFIG_NO_ENCONTRADA", path=str(path))
    except json.JSONDecodeError as exc:
        raise config_error("JSON inválido", code="CONFIG_JSON_INVALIDO", path=str(path), error=str(exc))
    return parse_config(raw, source=str(path))


def parse_config(raw: Any, source: str = "<memoria>") -> Config:
    try:
        config = Config.model_validate(raw)
    except ValidationError as exc:
        raise config_error(
            "La configuración no cumple el esquema",
            code="CONFIG_ESQUEMA",
            path=source,
            errores=[
                {"loc": ".".join(str(p) for p in e["loc"]), "msg": e["msg"]} for e in exc.errors()
            ],
        )
    unknown = set(config.tolerances) - set(Settings.model_fields)
    if unknown:
        raise config_error(
            "Tolerancias desconocidas", code="CONFIG_TOLERANCIA_DESCONOCIDA", claves=sorted(unknown)
        )
    logger.debug("Configuración cargada", extra={"path": source})
    return config


def apply_tolerances(overrides: Dict[str, Any], target: Settings = settings) -> Dict[str, Any]:
    """Valida y aplica overrides sobre la instancia de settings; devuelve los valores previos."""
    if not overrides:
        return {}
    try:
        validated = Settings.model_validate({**target.model_dump(), **overrides})
    except ValidationError as exc:
        raise config_error(
            "Tolerancia con valor inválido",
            code="CONFIG_TOLERANCIA_INVALIDA",
            errores=[e["msg"] for e in exc.errors()],
        )
    previous = {key: getattr(target, key) for key in overrides}
    for key in overrides:
        setattr(target, key, getattr(validated, key))
    return previous


def build_measure(cfg: MeasureConfig) -> SignedMeasure:
    plus_atoms = [(a.s, a.weight) for a in cfg.atoms if a.sign == "+"]
    minus_atoms = [(a.s, a.weight) for a in cfg.atoms if a.sign == "-"]
    plus_dens = []
    minus_dens = []
    for d in cfg.densities:
        breakpoints, values = d.resolved()
        piece = DensityPiece(tuple(breakpoints), tuple(values))
        (plus_dens if d.sign == "+" else minus_dens).append(piece)
    try:
        return SignedMeasure(
            plus=MeasureComponent.build(plus_atoms, plus_dens),
            minus=MeasureComponent.build(minus_atoms, minus_dens),
            s_bar=cfg.s_bar,
            dimension=cfg.dimension,
        )
    except ValueError as exc:
        raise config_error(str(exc), code="MEDIDA_INVALIDA")


def build_domain(cfg: Optional[DomainConfig]) -> Domain1D:
    if cfg is None:
        return Domain1D(((0.0, 1.0),))
    try:
        return Domain1D.from_intervals(cfg.intervals)
    except ValueError as exc:
        raise config_error(str(exc), code="DOMINIO_INVALIDO")


def build_kernel(cfg: Optional[KernelConfig], grid: Grid) -> Optional[Kernel]:
    if cfg is None:
        return None
    return make_kernel(cfg.kind, cfg.width, grid)


def measure_label(cfg: MeasureConfig) -> str:
    if cfg.label:
        return cfg.label
    parts = []
    for a in cfg.atoms:
        parts.append(f"{a.sign}{a.weight:g}·δ{a.s:g}")
    for d in cfg.densities:
        parts.append(f"{d.sign}φ[{d.lo:g},{d.hi:g}]")
    return " ".join(parts)


def domain_label(domain: Domain1D) -> str:
    return "∪".join(f"({a:g},{b:g})" for a, b in domain.intervals)
