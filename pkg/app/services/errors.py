"""
Errores del solver.

Todas las fallas se reportan con el mismo sobre que usan los servicios:
{"error": {"code": ..., "message": ..., "details": ...}}
El código de salida de la CLI se toma de la clase de la excepción.
"""

from __future__ import annotations

from typing import Any, Dict, Optional


class SolverError(Exception):
    """Error base de la aplicación."""

    exit_code: int = 1
    default_code: str = "ERROR_INTERNO"

    def __init__(
        self,
        message: str,
        code: Optional[str] = None,
        details: Optional[Dict[str, Any]] = None,
    ):
        super().__init__(f"{code or self.default_code}: {message}")
        self.message = message
        self.code = code or self.default_code
        self.details: Dict[str, Any] = details or {}

    def to_dict(self) -> Dict[str, Any]:
        return {
            "error": {
                "code": self.code,
                "message": self.message,
                "details": self.details,
            }
        }


class HypothesisError(SolverError):
    """La medida o el problema no cumplen las hipótesis requeridas."""

    exit_code = 2
    default_code = "HIPOTESIS_NO_SATISFECHA"


class ConvergenceError(SolverError):
    """Un método iterativo no alcanzó la tolerancia."""

    exit_code = 3
    default_code = "NO_CONVERGENCIA"


class NumericalInvariantError(SolverError):
    """Una cota demostrada no se cumplió numéricamente (indica un bug)."""

    exit_code = 3
    default_code = "INVARIANTE_VIOLADO"


class ConfigError(SolverError):
    exit_code = 4
    default_code = "CONFIGURACION_INVALIDA"


class DiscretizationError(SolverError):
    """Malla, núcleo o exponente inválidos para discretizar."""

    exit_code = 4
    default_code = "DISCRETIZACION_INVALIDA"


class ReportIOError(SolverError):
    exit_code = 1
    default_code = "ERROR_ESCRITURA"


def hypothesis_error(message: str, code: str = "HIPOTESIS_NO_SATISFECHA", **details: Any) -> HypothesisError:
    return HypothesisError(message, code=code, details=details)


def convergence_error(message: str, code: str = "NO_CONVERGENCIA", **details: Any) -> ConvergenceError:
    return ConvergenceError(message, code=code, details=details)


def config_error(message: str, code: str = "CONFIGURACION_INVALIDA", **details: Any) -> ConfigError:
    return ConfigError(message, code=code, details=details)


def discretization_error(message: str, code: str = "DISCRETIZACION_INVALIDA", **details: Any) -> DiscretizationError:
    return DiscretizationError(message, code=code, details=details)


def invariant_error(message: str, code: str = "INVARIANTE_VIOLADO", **details: Any) -> NumericalInvariantError:
    return NumericalInvariantError(message, code=code, details=details)
