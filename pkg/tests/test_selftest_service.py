import json

import pytest

from app.schemas.escenario import ScenarioKind
from app.services import selftest_service
from app.services.errors import convergence_error
from app.services.experiments_service import default_scenario, run_scenario
from app.services.export_service import emit_report
from app.services.selftest_service import CRITERIA, run_selftest


class TestCriteriosBaratos:
    """Criterios que corren en poco tiempo"""

    def test_constante(self, tmp_path):
        ok, detail = selftest_service._constant_formula(tmp_path, 1)
        assert ok, detail

    def test_convolucion(self, tmp_path):
        ok, detail = selftest_service._convolution_bound(tmp_path, 1)
        assert ok, detail

    def test_gradiente(self, tmp_path):
        ok, detail = selftest_service._gradient_check(tmp_path, 3)
        assert ok, detail

    def test_residuos(self, tmp_path):
        ok, detail = selftest_service._residuals(tmp_path, 1)
        assert ok, detail

    def test_doce_criterios(self):
        assert len(CRITERIA) == 12
        assert len({name for name, _ in CRITERIA}) == 12


class TestDeterminismo:
    """Repetición de los escenarios emitidos"""

    @pytest.fixture
    def emitido(self, tmp_path):
        report = run_scenario(default_scenario(ScenarioKind.APPENDIX_CHECK, 7))
        emit_report(report, tmp_path / "escenarios")
        return tmp_path

    def test_arbol_identico(self, emitido):
        ok, detail = selftest_service._determinism(emitido, 7)
        assert ok, detail
        assert detail == "escenarios=1"
        archivos = sorted(p.name for p in (emitido / "determinismo" / "appendix_check").iterdir())
        assert archivos == sorted(p.name for p in (emitido / "escenarios" / "appendix_check").iterdir())

    def test_detecta_archivo_alterado(self, emitido):
        csv = emitido / "escenarios" / "appendix_check" / "eigenvalues.csv"
        csv.write_text(csv.read_text(encoding="utf-8") + "x\n", encoding="utf-8")
        ok, detail = selftest_service._determinism(emitido, 7)
        assert ok is False
        assert "appendix_check/eigenvalues.csv" in detail

    def test_detecta_archivo_de_mas(self, emitido):
        (emitido / "escenarios" / "appendix_check" / "extra.csv").write_text("a\n", encoding="utf-8")
        ok, detail = selftest_service._determinism(emitido, 7)
        assert ok is False
        assert "appendix_check:archivos" in detail

    def test_sin_reportes_previos_falla(self, tmp_path):
        assert selftest_service._determinism(tmp_path, 7) == (False, "sin_reportes_previos")

class TestRunSelftest:
    """Ejecución de la suite"""

    def test_error_marca_fallo_sin_cortar(self, tmp_path, monkeypatch):
        def rompe(out, seed):
            raise convergence_error("no converge")

        monkeypatch.setattr(
            selftest_service,
            "CRITERIA",
            [("rompe", rompe), ("pasa", lambda out, seed: (True, f"seed={seed}"))],
        )
        summary = run_selftest(tmp_path, seed=5)
        assert summary.ok is False
        assert [c.ok for c in summary.criteria] == [False, True]
        assert summary.criteria[0].detail == "NO_CONVERGENCIA: no converge"
        assert summary.criteria[1].detail == "seed=5"
        data = json.loads((tmp_path / "selftest.json").read_text(encoding="utf-8"))
        assert data["seed"] == 5
        assert [c["id"] for c in data["criteria"]] == [1, 2]

    @pytest.mark.slow
    def test_suite_completa(self, tmp_path):
        summary = run_selftest(tmp_path)
        fallidos = [f"{c.name}: {c.detail}" for c in summary.criteria if not c.ok]
        assert summary.ok, fallidos
        assert (tmp_path / "escenarios" / "fragmentation" / "report.json").exists()

    def test_resumen_reproducible(self, tmp_path, monkeypatch):
        monkeypatch.setattr(
            selftest_service,
            "CRITERIA",
            [("constante_c_ns", selftest_service._constant_formula), ("convolucion", selftest_service._convolution_bound)],
        )
        run_selftest(tmp_path / "a", seed=11)
        run_selftest(tmp_path / "b", seed=11)
        assert (tmp_path / "a" / "selftest.json").read_bytes() == (tmp_path / "b" / "selftest.json").read_bytes()
