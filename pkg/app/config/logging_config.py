import logging
import logging.config
import sys
from contextvars import ContextVar

run_id_var: ContextVar[str] = ContextVar("run_id", default="-")
escenario_var: ContextVar[str] = ContextVar("escenario", default="-")


class RunContextFilter(logging.Filter):
    """Inyecta run_id y escenario en cada registro."""

    def filter(self, record: logging.LogRecord) -> bool:
        if not hasattr(record, "run_id"):
            record.run_id = run_id_var.get()
        if not hasattr(record, "escenario"):
            record.escenario = escenario_var.get()
        return True


def setup_logging(level: str = "INFO", quiet: bool = False) -> None:
    """Configura el logging estructurado de la aplicación.

    Los logs van siempre a stderr; stdout queda reservado para la salida
    de la CLI y los reportes nunca contienen logs.
    """
    nivel = "WARNING" if quiet else level

    logging_config = {
        "version": 1,
        "disable_existing_loggers": False,
        "filters": {
            "run_context": {"()": RunContextFilter},
        },
        "formatters": {
            "json": {
                "()": "pythonjsonlogger.jsonlogger.JsonFormatter",
                "fmt": "%(asctime)s %(levelname)s %(name)s %(message)s %(run_id)s %(escenario)s",
            },
            "standard": {
                "format": "%(asctime)s [%(levelname)s] %(name)s: %(message)s [run_id=%(run_id)s]"
            },
        },
        "handlers": {
            "default": {
                "level": nivel,
                "formatter": "json",
                "class": "logging.StreamHandler",
                "stream": sys.stderr,
                "filters": ["run_context"],
            },
        },
        "loggers": {
            "app": {
                "handlers": ["default"],
                "level": nivel,
                "propagate": False,
            },
            "fkpp": {
                "handlers": ["default"],
                "level": nivel,
                "propagate": False,
            },
        },
        "root": {
            "handlers": ["default"],
            "level": "WARNING",
        },
    }

    logging.config.dictConfig(logging_config)
