from prometheus_client import Counter, Gauge, Histogram
import time

# Métricas del solver
AUTOPARES_CALCULADOS = Counter(
    'autopares_calculados_total',
    'Total de autopares principales calculados',
    ['metodo']
)

SOLUCIONES_LOGISTICAS = Counter(
    'soluciones_logisticas_total',
    'Total de minimizaciones de energía por clasificación',
    ['clasificacion']
)

ITERACIONES_DESCENSO = Counter(
    'iteraciones_descenso_total',
    'Pasos aceptados del descenso de energía'
)

MATRICES_ENSAMBLADAS = Counter(
    'matrices_ensambladas_total',
    'Matrices fraccionarias ensambladas (sin contar aciertos de cache)'
)

MARGEN_COERCIVIDAD = Gauge(
    'margen_coercividad',
    'Último margen de coercividad calculado'
)

TIEMPO_ESCENARIO = Histogram(
    'escenario_duracion_segundos',
    'Tiempo de ejecución de escenarios',
    ['escenario']
)


class MetricsService:
    @staticmethod
    def contar_autopar(metodo: str):
        """Cuenta un autopar calculado con su método"""
        AUTOPARES_CALCULADOS.labels(metodo=metodo).inc()

    @staticmethod
    def contar_solucion(clasificacion: str):
        """Cuenta una minimización según su clasificación"""
        SOLUCIONES_LOGISTICAS.labels(clasificacion=clasificacion).inc()

    @staticmethod
    def sumar_iteraciones(cantidad: int):
        ITERACIONES_DESCENSO.inc(cantidad)

    @staticmethod
    def contar_ensamblado():
        MATRICES_ENSAMBLADAS.inc()

    @staticmethod
    def establecer_margen(valor: float):
        """Establece el último margen de coercividad"""
        MARGEN_COERCIVIDAD.set(valor)

    @staticmethod
    def medir_tiempo_escenario(escenario: str):
        """Decorador para medir el tiempo de un escenario"""
        def decorator(func):
            def wrapper(*args, **kwargs):
                start_time = time.time()
                try:
                    return func(*args, **kwargs)
                finally:
                    duration = time.time() - start_time
                    TIEMPO_ESCENARIO.labels(escenario=escenario).observe(duration)
            return wrapper
        return decorator


# Instancia global del servicio de métricas
metrics_service = MetricsService()
