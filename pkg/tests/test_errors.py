import pytest

from app.services.errors import (
    ConfigError,
    ConvergenceError,
    DiscretizationError,
    HypothesisError,
    NumericalInvariantError,
    ReportIOError,
    SolverError,
    config_error,
    convergence_error,
    discretization_error,
    hypothesis_error,
    invariant_error,
)


class TestSobreDeError:
    """Formato {"error": {...}} y códigos de salida"""

    def test_sobre(self):
        exc = hypothesis_error("μ⁻ pesa sobre [s̄,1]", code="HIPOTESIS_MU1", masa=0.5)
        assert exc.to_dict() == {
            "error": {"code": "HIPOTESIS_MU1", "message": "μ⁻ pesa sobre [s̄,1]", "details": {"masa": 0.5}}
        }
        assert str(exc) == "HIPOTESIS_MU1: μ⁻ pesa sobre [s̄,1]"

    def test_codigo_por_defecto(self):
        exc = ConvergenceError("sin converger")
        assert exc.code == "NO_CONVERGENCIA"
        assert exc.details == {}

    @pytest.mark.parametrize(
        "factory, cls, exit_code",
        [
            (hypothesis_error, HypothesisError, 2),
            (convergence_error, ConvergenceError, 3),
            (invariant_error, NumericalInvariantError, 3),
            (config_error, ConfigError, 4),
            (discretization_error, DiscretizationError, 4),
        ],
    )
    def test_codigos_de_salida(self, factory, cls, exit_code):
        exc = factory("mensaje")
        assert isinstance(exc, cls)
        assert isinstance(exc, SolverError)
        assert exc.exit_code == exit_code

    def test_error_de_escritura(self):
        exc = ReportIOError("disco lleno", details={"path": "/tmp/x"})
        assert exc.exit_code == 1
        assert exc.to_dict()["error"]["code"] == "ERROR_ESCRITURA"
