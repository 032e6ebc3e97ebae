import numpy as np
import pytest

from app.domain.grid_model import GridFunction, KernelKind
from app.domain.logistic_model import Classification, ThresholdVerdict
from app.domain.measure_model import SignedMeasure
from app.schemas.logistica import SolverOptions
from app.services.errors import HypothesisError
from app.services.grid_service import make_kernel
from app.services.logistic_service import (
    build_problem,
    energy_along,
    energy_E,
    grad_E,
    grad_norm,
    minimize_E,
    threshold_report,
)
from app.services.operator_service import assemble_superposition
from app.services.spectral_service import principal_eigen


@pytest.fixture
def laplace_op(grid64, delta1):
    return assemble_superposition(grid64, delta1)


class TestEnergia:
    """Pruebas de energy_E y grad_E"""

    def test_energia_en_cero(self, laplace_op):
        problem = build_problem(laplace_op.grid, 12.0, 1.0)
        assert energy_E(problem, laplace_op, GridFunction.zeros(laplace_op.grid)) == 0.0

    @pytest.mark.parametrize("tau", [0.0, 0.5])
    def test_gradiente_contra_diferencias_centrales(self, grid32, appendix_mu, rng, tau):
        op = assemble_superposition(grid32, appendix_mu)
        kernel = make_kernel(KernelKind.TOPHAT, 0.25, grid32)
        problem = build_problem(grid32, 20.0, 1.0, tau, kernel)
        u = GridFunction(grid32, rng.standard_normal(grid32.n))
        g = grad_E(problem, op, u).values
        eps = 1e-5
        fd = np.empty(grid32.n)
        for i in range(grid32.n):
            step = np.zeros(grid32.n)
            step[i] = eps
            fd[i] = (
                energy_E(problem, op, u.with_values(u.values + step))
                - energy_E(problem, op, u.with_values(u.values - step))
            ) / (2.0 * eps)
        assert np.linalg.norm(fd - g) / np.linalg.norm(g) <= 1e-5

    def test_norma_del_gradiente(self, laplace_op):
        problem = build_problem(laplace_op.grid, 12.0, 1.0)
        u = GridFunction.constant(laplace_op.grid, 0.5)
        r = grad_E(problem, laplace_op, u).values / laplace_op.grid.h
        assert grad_norm(problem, laplace_op, u) == pytest.approx(np.sqrt(laplace_op.grid.h * r @ r))

    def test_recurso_negativo(self, grid32):
        with pytest.raises(HypothesisError) as exc:
            build_problem(grid32, -1.0, 1.0)
        assert exc.value.code == "RECURSO_NEGATIVO"

    def test_tau_negativo(self, grid32):
        with pytest.raises(HypothesisError):
            build_problem(grid32, 1.0, 1.0, tau=-0.1)


class TestUmbrales:
    """Condiciones de extinción y supervivencia"""

    def test_extincion_certificada(self, laplace_op):
        pair = principal_eigen(laplace_op)
        report = threshold_report(build_problem(laplace_op.grid, 9.0, 1.0), pair)
        assert report.verdict is ThresholdVerdict.EXTINCTION_CERTIFIED
        assert report.extinction_slack > 0.0

    def test_supervivencia_certificada(self, laplace_op):
        pair = principal_eigen(laplace_op)
        report = threshold_report(build_problem(laplace_op.grid, 12.0, 1.0), pair)
        assert report.verdict is ThresholdVerdict.SURVIVAL_CERTIFIED
        assert report.survival_slack > 0.0

    def test_polinizacion_acotada(self, laplace_op):
        pair = principal_eigen(laplace_op)
        kernel = make_kernel(KernelKind.TOPHAT, 0.25, laplace_op.grid)
        report = threshold_report(build_problem(laplace_op.grid, 1.0, 1.0, 0.5, kernel), pair)
        assert 0.0 < report.pollination <= 1.0 + 1e-12

    def test_energia_negativa_sobre_la_autofuncion(self, laplace_op):
        pair = principal_eigen(laplace_op)
        problem = build_problem(laplace_op.grid, 12.0, 1.0)
        assert energy_along(problem, laplace_op, pair, 0.01) < 0.0
        assert energy_along(problem, laplace_op, pair, -1.0) < 0.0


class TestMinimizacion:
    """Pruebas de minimize_E"""

    def test_extincion_da_solucion_trivial(self, laplace_op):
        report = minimize_E(build_problem(laplace_op.grid, 9.0, 1.0), laplace_op)
        assert report.classification is Classification.TRIVIAL
        assert report.sup_norm <= 1e-6
        assert report.converged

    def test_supervivencia_da_solucion_no_trivial(self, laplace_op):
        report = minimize_E(build_problem(laplace_op.grid, 12.0, 1.0), laplace_op)
        assert report.classification is Classification.NONTRIVIAL
        assert report.sup_norm >= 1e-3
        assert report.energy < 0.0
        assert report.converged
        assert report.weak_residual <= 1e-8
        assert report.min_value >= 0.0
        assert report.projection == "certificado_discreto"
        assert {s.name for s in report.starts} == {"cero", "autofuncion_0.1", "autofuncion_escalada", "aleatorio"}

    def test_ningun_arranque_sube_la_energia(self, laplace_op):
        report = minimize_E(build_problem(laplace_op.grid, 12.0, 1.0), laplace_op)
        for start in report.starts:
            assert start.final_energy <= start.initial_energy + 1e-12

    def test_metrica_de_energia(self, laplace_op):
        opts = SolverOptions.from_settings(metric="energy")
        report = minimize_E(build_problem(laplace_op.grid, 12.0, 1.0), laplace_op, opts)
        assert report.classification is Classification.NONTRIVIAL

    def test_determinista_con_la_misma_semilla(self, laplace_op):
        problem = build_problem(laplace_op.grid, 12.0, 1.0)
        a = minimize_E(problem, laplace_op)
        b = minimize_E(problem, laplace_op)
        np.testing.assert_array_equal(a.u.values, b.u.values)

    def test_falta_nu_donde_hay_recurso(self, laplace_op):
        with pytest.raises(HypothesisError) as exc:
            minimize_E(build_problem(laplace_op.grid, 12.0, 0.0), laplace_op)
        assert exc.value.code == "HIPOTESIS_INTEGRABILIDAD"

    def test_mallas_distintas(self, grid32, laplace_op):
        with pytest.raises(HypothesisError) as exc:
            minimize_E(build_problem(grid32, 12.0, 1.0), laplace_op)
        assert exc.value.code == "MALLA_INCOMPATIBLE"

    def test_operador_no_coercivo(self, grid32):
        mu = SignedMeasure.from_atoms([(1.0, 1.0), (0.1, -50.0)], 0.5)
        op = assemble_superposition(grid32, mu)
        with pytest.raises(HypothesisError) as exc:
            minimize_E(build_problem(grid32, 1.0, 1.0), op)
        assert exc.value.code == "OPERADOR_NO_COERCIVO"
