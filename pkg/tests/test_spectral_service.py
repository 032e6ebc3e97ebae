import math

import numpy as np
import pytest

from app.config.settings import settings
from app.domain.grid_model import Domain1D, GridFunction
from app.domain.measure_model import SignedMeasure
from app.schemas.escenario import ScenarioKind
from app.services.config_service import build_measure
from app.services.errors import ConfigError, DiscretizationError, HypothesisError
from app.services.experiments_service import appendix_measure, default_scenario
from app.services.grid_service import build_grid, inner
from app.services.operator_service import assemble_superposition
from app.services.spectral_service import (
    compare_union,
    eigen_comparisons,
    monotonicity_comparison,
    negative_component_comparison,
    principal_eigen,
    rayleigh,
    scaling_comparison,
    solve_on,
    summarize,
    union_comparison,
)


def _medidas_de_escenarios():
    """(id, medida) de los escenarios por defecto que calculan autopares, incluido el control."""
    medidas = []
    for kind in ScenarioKind:
        if kind is ScenarioKind.MODULUS_COUNTEREXAMPLE:
            continue
        sc = default_scenario(kind)
        cfgs = list(sc.measures or [])
        if sc.control_measure is not None:
            cfgs.append(sc.control_measure)
        if not cfgs:
            cfgs.append(appendix_measure(0.002))
        medidas += [(f"{kind.value}:{cfg.label or i}", build_measure(cfg)) for i, cfg in enumerate(cfgs)]
    return medidas


MEDIDAS_DE_ESCENARIOS = _medidas_de_escenarios()


def _discrete_laplace(n: int) -> float:
    """Primer autovalor exacto de la matriz tridiagonal n×n con h = 1/n."""
    h = 1.0 / n
    return 4.0 / h**2 * math.sin(math.pi / (2.0 * (n + 1))) ** 2


class TestAutoparPrincipal:
    """Pruebas de principal_eigen"""

    def test_laplaciano_discreto_exacto(self, unit_domain, delta1):
        _, pair = solve_on(unit_domain, delta1, 64)
        assert pair.eigenvalue == pytest.approx(_discrete_laplace(64), rel=1e-10)
        assert pair.residual <= 1e-8

    @pytest.mark.slow
    def test_referencia_pi_cuadrado(self, unit_domain, delta1):
        _, pair = solve_on(unit_domain, delta1, 512)
        assert abs(pair.eigenvalue - math.pi**2) / math.pi**2 <= 0.01

    def test_autofuncion_positiva_y_normalizada(self, unit_domain, appendix_mu):
        op, pair = solve_on(unit_domain, appendix_mu, 32)
        assert pair.sign_violation <= 1e-10
        assert inner(pair.e, pair.e) == pytest.approx(1.0, rel=1e-12)
        assert rayleigh(op, pair.e) == pytest.approx(pair.eigenvalue, rel=1e-10)
        assert pair.is_simple(settings.simplicity_gap_ratio)

    def test_iteracion_inversa_coincide(self, grid32, appendix_mu):
        op = assemble_superposition(grid32, appendix_mu)
        dense = principal_eigen(op)
        fast = principal_eigen(op, method="inverse")
        assert fast.eigenvalue == pytest.approx(dense.eigenvalue, rel=1e-9)
        np.testing.assert_allclose(fast.e.values, dense.e.values, atol=1e-6)

    def test_chequeo_cruzado(self, grid32, delta_half):
        settings.eigen_cross_check = True
        pair = principal_eigen(assemble_superposition(grid32, delta_half))
        assert pair.method == "dense"

    def test_metodo_desconocido(self, grid32, delta1):
        with pytest.raises(ConfigError) as exc:
            principal_eigen(assemble_superposition(grid32, delta1), method="lanczos")
        assert exc.value.code == "METODO_DESCONOCIDO"

    def test_operador_no_coercivo(self, grid32):
        mu = SignedMeasure.from_atoms([(1.0, 1.0), (0.1, -50.0)], 0.5)
        with pytest.raises(HypothesisError) as exc:
            principal_eigen(assemble_superposition(grid32, mu))
        assert exc.value.code == "OPERADOR_NO_COERCIVO"

    def test_resumen(self, grid32, delta1):
        op = assemble_superposition(grid32, delta1)
        summary = summarize(principal_eigen(op), op)
        data = summary.model_dump(by_alias=True)
        assert data["lambda"] == summary.eigenvalue
        assert summary.n == 32
        assert summary.coercivity_margin == pytest.approx(summary.eigenvalue, rel=1e-10)


class TestComparaciones:
    """Escala, monotonía, unión y componente negativa"""

    def test_ley_de_escala(self, unit_domain, delta_half):
        check = scaling_comparison(unit_domain, delta_half, 2.0, 128)
        assert check.lower_ok and check.upper_ok
        assert check.inf_factor == pytest.approx(2.0)

    def test_radio_no_compatible(self, unit_domain, delta_half):
        with pytest.raises(DiscretizationError) as exc:
            scaling_comparison(unit_domain, delta_half, 1.0 / 3.0, 32)
        assert exc.value.code == "RADIO_NO_COMPATIBLE"

    def test_monotonia(self, delta_half):
        check = monotonicity_comparison(Domain1D(((0.25, 0.75),)), Domain1D(((0.0, 1.0),)), delta_half, 32)
        assert check.ok
        assert check.lambda_inner > check.lambda_outer

    def test_dominios_no_anidados(self, delta_half):
        with pytest.raises(DiscretizationError) as exc:
            monotonicity_comparison(Domain1D(((0.0, 0.5),)), Domain1D(((0.5, 1.0),)), delta_half, 32)
        assert exc.value.code == "DOMINIOS_NO_ANIDADOS"

    def test_union_local_no_cambia_el_autovalor(self, delta1):
        check = union_comparison(Domain1D(((0.0, 1.0),)), Domain1D(((2.0, 3.0),)), delta1, 32)
        assert check.local_measure is True
        assert check.local_equality_ok is True
        assert check.congruent_ok is True

    def test_union_no_local_baja_el_autovalor(self):
        mu = SignedMeasure.from_atoms([(1.0, 1.0), (0.5, 1.0)], 0.5)
        check = union_comparison(Domain1D(((0.0, 1.0),)), Domain1D(((2.0, 3.0),)), mu, 32)
        assert check.local_measure is False
        assert check.strict_drop is True
        assert check.slack > 0.0

    def test_componente_negativa(self, unit_domain, appendix_mu):
        checks = negative_component_comparison(unit_domain, appendix_mu, [0.1, 0.5, 0.9], 32)
        assert all(c.ok for c in checks)
        slacks = [c.slack for c in checks]
        assert slacks == sorted(slacks)

    def test_registro_agrupado(self, unit_domain, appendix_mu):
        record = eigen_comparisons(
            appendix_mu,
            32,
            domain=unit_domain,
            nested=(Domain1D(((0.25, 0.75),)), unit_domain),
            eps_values=[0.5],
        )
        assert record.monotonicity is not None
        assert len(record.negative_component) == 1
        assert record.all_ok

    def test_union_con_autopares_ya_calculados(self):
        mu = SignedMeasure.from_atoms([(1.0, 1.0), (0.5, 1.0)], 0.5)
        first, second = Domain1D(((0.0, 1.0),)), Domain1D(((2.0, 3.0),))
        _, p1 = solve_on(first, mu, 32)
        _, p2 = solve_on(second, mu, 32)
        _, pu = solve_on(first.union(second), mu, 32)
        assert compare_union(p1, p2, pu, mu) == union_comparison(first, second, mu, 32)


class TestInvariantesEspectrales:
    """Minimalidad, homogeneidad, signo y simplicidad del autopar principal"""

    def test_minimalidad_de_rayleigh(self, grid32, appendix_mu, rng):
        op = assemble_superposition(grid32, appendix_mu)
        lam = principal_eigen(op).eigenvalue
        for _ in range(100):
            u = GridFunction(grid32, rng.standard_normal(grid32.n))
            assert rayleigh(op, u) >= lam - 1e-9

    @pytest.mark.parametrize("c", [0.25, 3.0, 10.0])
    def test_lineal_en_el_peso(self, grid32, c):
        base = principal_eigen(assemble_superposition(grid32, SignedMeasure.from_atoms([(0.5, 1.0)], 0.5)))
        scaled = principal_eigen(assemble_superposition(grid32, SignedMeasure.from_atoms([(0.5, c)], 0.5)))
        assert scaled.eigenvalue == pytest.approx(c * base.eigenvalue, rel=1e-10)

    @pytest.mark.parametrize(
        "atoms, s_bar",
        [
            ([(0.5, 1.0)], 0.5),
            ([(1.0, 1.0), (0.5, 1.0)], 0.5),
            ([(0.2, 1.0)], 0.2),
            ([(1.0, 1.0), (0.6, 1.0), (0.3, -0.002)], 0.6),
        ],
        ids=["d0.5", "d1+d0.5", "d0.2", "apendice_reabsorbida"],
    )
    def test_autofuncion_positiva_y_simple(self, grid64, atoms, s_bar):
        pair = principal_eigen(assemble_superposition(grid64, SignedMeasure.from_atoms(atoms, s_bar)))
        assert pair.sign_violation <= 1e-10
        assert np.all(pair.e.values > 0.0)
        assert pair.is_simple(settings.simplicity_gap_ratio)


class TestCaminosDensoEInverso:
    """La iteración inversa reproduce el autovalor denso en las medidas de los escenarios"""

    @pytest.mark.parametrize("mu", [m for _, m in MEDIDAS_DE_ESCENARIOS], ids=[i for i, _ in MEDIDAS_DE_ESCENARIOS])
    def test_coinciden(self, grid32, mu):
        op = assemble_superposition(grid32, mu)
        dense = principal_eigen(op)
        fast = principal_eigen(op, method="inverse")
        assert fast.eigenvalue == pytest.approx(dense.eigenvalue, rel=settings.eigen_agreement_tol)

    @pytest.mark.parametrize("mu", [m for _, m in MEDIDAS_DE_ESCENARIOS], ids=[i for i, _ in MEDIDAS_DE_ESCENARIOS])
    def test_chequeo_cruzado_no_dispara(self, grid32, mu):
        settings.eigen_cross_check = True
        pair = principal_eigen(assemble_superposition(grid32, mu))
        assert pair.residual <= settings.eigen_residual_tol
