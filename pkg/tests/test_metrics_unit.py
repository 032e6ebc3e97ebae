"""
Pruebas unitarias del servicio de métricas
"""
import pytest
from prometheus_client import REGISTRY, generate_latest

from app.services.metrics_service import MetricsService, metrics_service
from app.services.spectral_service import solve_on


def _valor(nombre, labels=None):
    return REGISTRY.get_sample_value(nombre, labels or {}) or 0.0


class TestMetricsServiceUnit:
    """Pruebas unitarias del servicio de métricas"""

    def test_contar_autopar(self):
        antes = _valor("autopares_calculados_total", {"metodo": "prueba"})
        metrics_service.contar_autopar("prueba")
        metrics_service.contar_autopar("prueba")
        assert _valor("autopares_calculados_total", {"metodo": "prueba"}) == antes + 2

    def test_contar_solucion(self):
        antes = _valor("soluciones_logisticas_total", {"clasificacion": "trivial"})
        metrics_service.contar_solucion("trivial")
        assert _valor("soluciones_logisticas_total", {"clasificacion": "trivial"}) == antes + 1

    def test_sumar_iteraciones(self):
        antes = _valor("iteraciones_descenso_total")
        metrics_service.sumar_iteraciones(7)
        assert _valor("iteraciones_descenso_total") == antes + 7

    def test_establecer_margen(self):
        metrics_service.establecer_margen(0.25)
        assert _valor("margen_coercividad") == 0.25

    def test_medir_tiempo_escenario(self):
        antes = _valor("escenario_duracion_segundos_count", {"escenario": "prueba"})

        @MetricsService.medir_tiempo_escenario("prueba")
        def correr():
            return "listo"

        assert correr() == "listo"
        assert _valor("escenario_duracion_segundos_count", {"escenario": "prueba"}) == antes + 1

    def test_medir_tiempo_con_excepcion(self):
        antes = _valor("escenario_duracion_segundos_count", {"escenario": "falla"})

        @MetricsService.medir_tiempo_escenario("falla")
        def correr():
            raise RuntimeError("boom")

        with pytest.raises(RuntimeError):
            correr()
        assert _valor("escenario_duracion_segundos_count", {"escenario": "falla"}) == antes + 1

    def test_solver_reporta_metricas(self, unit_domain, delta1):
        antes = _valor("autopares_calculados_total", {"metodo": "dense"})
        solve_on(unit_domain, delta1, 16)
        assert _valor("autopares_calculados_total", {"metodo": "dense"}) == antes + 1

    def test_formato_prometheus(self):
        metrics_service.contar_ensamblado()
        texto = generate_latest(REGISTRY).decode("utf-8")
        assert "# TYPE matrices_ensambladas_total counter" in texto
        assert "margen_coercividad" in texto
