"""
Pruebas del logging estructurado
"""
import json
import logging

import numpy as np
import structlog

from app.config.logging_config import RunContextFilter, escenario_var, run_id_var, setup_logging
from app.utils.logger import add_run_context, get_logger, get_run_logger, numpy_to_python, setup_structlog


def _lineas_json(texto):
    return [json.loads(l) for l in texto.splitlines() if l.startswith("{")]


class TestSetupLogging:
    """Configuración JSON sobre stderr"""

    def test_json_con_run_id(self, capsys):
        token = run_id_var.set("abc123")
        try:
            setup_logging()
            logging.getLogger("app.prueba").info("hola")
        finally:
            run_id_var.reset(token)
        captured = capsys.readouterr()
        assert captured.out == ""
        registros = _lineas_json(captured.err)
        assert registros[-1]["message"] == "hola"
        assert registros[-1]["run_id"] == "abc123"
        assert registros[-1]["levelname"] == "INFO"

    def test_quiet_suprime_info(self, capsys):
        setup_logging(quiet=True)
        logger = logging.getLogger("fkpp.prueba")
        logger.info("oculto")
        logger.warning("visible")
        registros = _lineas_json(capsys.readouterr().err)
        mensajes = [r["message"] for r in registros]
        assert "oculto" not in mensajes
        assert "visible" in mensajes
        setup_logging()

    def test_extra_en_registro(self, capsys):
        setup_logging()
        logging.getLogger("app.prueba").info("con extra", extra={"directorio": "x"})
        registro = _lineas_json(capsys.readouterr().err)[-1]
        assert registro["directorio"] == "x"


class TestFiltro:
    """RunContextFilter"""

    def test_inyecta_contexto(self):
        token = escenario_var.set("fragmentation")
        try:
            record = logging.LogRecord("app", logging.INFO, __file__, 1, "m", None, None)
            assert RunContextFilter().filter(record)
        finally:
            escenario_var.reset(token)
        assert record.escenario == "fragmentation"
        assert record.run_id == run_id_var.get()

    def test_respeta_valores_existentes(self):
        record = logging.LogRecord("app", logging.INFO, __file__, 1, "m", None, None)
        record.run_id = "propio"
        RunContextFilter().filter(record)
        assert record.run_id == "propio"


class TestHelpers:
    """Helpers de app.utils.logger"""

    def test_get_logger(self):
        assert get_logger("app.algo").name == "app.algo"

    def test_run_logger_extra(self):
        token = run_id_var.set("r1")
        try:
            adapter = get_run_logger("app.run", escenario="two_measures")
        finally:
            run_id_var.reset(token)
        assert adapter.extra == {"run_id": "r1", "escenario": "two_measures"}

    def test_setup_structlog(self):
        setup_structlog()
        assert structlog.is_configured()
        logger = structlog.get_logger("app.structlog")
        assert logger is not None


class TestProcesadores:
    """Procesadores de structlog propios de la corrida"""

    def test_contexto_de_la_corrida(self):
        run = run_id_var.set("r7")
        esc = escenario_var.set("negative_component")
        try:
            evento = add_run_context(None, "info", {"event": "autopar"})
        finally:
            escenario_var.reset(esc)
            run_id_var.reset(run)
        assert evento == {"event": "autopar", "run_id": "r7", "escenario": "negative_component"}

    def test_no_pisa_el_escenario_del_evento(self):
        evento = add_run_context(None, "info", {"event": "x", "escenario": "fragmentation"})
        assert evento["escenario"] == "fragmentation"
        assert evento["run_id"] == run_id_var.get()

    def test_numpy_a_tipos_nativos(self):
        evento = numpy_to_python(None, "info", {"lambda": np.float64(9.87), "n": np.int64(32), "e": np.array([1.0, 2.0])})
        assert evento == {"lambda": 9.87, "n": 32, "e": [1.0, 2.0]}
        assert type(evento["lambda"]) is float
        assert type(evento["n"]) is int

    def test_evento_json_con_contexto(self, capsys):
        setup_logging()
        setup_structlog()
        token = run_id_var.set("r9")
        try:
            structlog.get_logger("app.experiments").warning("chequeo_fallido", chequeo="caida_union", slack=np.float64(0.5))
        finally:
            run_id_var.reset(token)
        registro = _lineas_json(capsys.readouterr().err)[-1]
        evento = json.loads(registro["message"])
        assert evento["event"] == "chequeo_fallido"
        assert evento["run_id"] == "r9"
        assert evento["slack"] == 0.5
        assert evento["level"] == "warning"
