import logging
from typing import Any, MutableMapping, Optional

import numpy as np
import structlog

from app.config.logging_config import escenario_var, run_id_var


def get_logger(name: str = "app") -> logging.Logger:
    """Obtiene un logger con configuración estructurada"""
    return logging.getLogger(name)


def get_run_logger(name: str = "app.run", escenario: Optional[str] = None) -> logging.LoggerAdapter:
    """Obtiene un logger con el contexto de la corrida actual"""
    logger = get_logger(name)
    return logging.LoggerAdapter(
        logger,
        extra={
            "run_id": run_id_var.get(),
            "escenario": escenario or escenario_var.get(),
        },
    )


def add_run_context(logger: Any, method_name: str, event_dict: MutableMapping[str, Any]) -> MutableMapping[str, Any]:
    """Agrega run_id y escenario de la corrida si el evento no los trae."""
    event_dict.setdefault("run_id", run_id_var.get())
    event_dict.setdefault("escenario", escenario_var.get())
    return event_dict


def numpy_to_python(logger: Any, method_name: str, event_dict: MutableMapping[str, Any]) -> MutableMapping[str, Any]:
    """Escalares y arreglos de numpy pasan a tipos nativos antes del JSON."""
    for key, value in event_dict.items():
        if isinstance(value, np.generic):
            event_dict[key] = value.item()
        elif isinstance(value, np.ndarray):
            event_dict[key] = value.tolist()
    return event_dict


def setup_structlog() -> None:
    """structlog sobre los handlers estándar, con el contexto de la corrida en cada evento"""
    structlog.configure(
        processors=[
            structlog.contextvars.merge_contextvars,
            structlog.stdlib.filter_by_level,
            add_run_context,
            structlog.stdlib.add_logger_name,
            structlog.stdlib.add_log_level,
            numpy_to_python,
            structlog.processors.TimeStamper(fmt="iso", utc=True),
            structlog.processors.format_exc_info,
            structlog.processors.JSONRenderer(sort_keys=True),
        ],
        context_class=dict,
        logger_factory=structlog.stdlib.LoggerFactory(),
        wrapper_class=structlog.stdlib.BoundLogger,
        cache_logger_on_first_use=True,
    )
