"""
Escenarios que instancian cada construcción teórica: ensamblan operadores,
calculan autovalores, eligen σ dentro de la ventana correspondiente,
resuelven el problema logístico y reportan chequeos y holguras.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np
import structlog

from app.config.logging_config import escenario_var
from app.config.settings import settings
from app.domain.grid_model import Domain1D, GridFunction, Kernel
from app.domain.logistic_model import Classification, ThresholdVerdict
from app.domain.measure_model import SignedMeasure
from app.domain.operator_model import SuperposedOperator
from app.domain.spectral_model import EigenPair
from app.schemas.config import DomainConfig, KernelConfig, MeasureConfig, ResourceConfig
from app.schemas.escenario import EigenRow, Report, ReportStatus, Scenario, ScenarioKind
from app.schemas.logistica import SolveReport, SolverOptions
from app.services.config_service import (
    build_domain,
    build_kernel,
    build_measure,
    domain_label,
    measure_label,
)
from app.services.errors import config_error
from app.services.grid_service import build_grid
from app.services.logistic_service import (
    build_problem,
    energy_along,
    minimize_E,
    threshold_report,
)
from app.services.measure_service import (
    c_bounds,
    check_hypotheses,
    power_ratio_check,
    measure_mass,
)
from app.services.metrics_service import metrics_service
from app.services.operator_service import (
    assemble_superposition,
    coercivity_margin,
    modulus_certificate,
    modulus_gap,
    reabsorption_constant,
    spectral_norm_ratio,
)
from app.services.spectral_service import (
    compare_union,
    lattice_compatible,
    scaling_comparison,
    solve_on,
    union_comparison,
)

log = structlog.get_logger("app.experiments")


def _atoms(label: str, s_bar: float, *atoms: Tuple[float, float]) -> MeasureConfig:
    return MeasureConfig.model_validate(
        {
            "label": label,
            "s_bar": s_bar,
            "atoms": [
                {"s": s, "weight": abs(w), "sign": "+" if w >= 0 else "-"} for s, w in atoms
            ],
        }
    )


def appendix_measure(alpha: float, s1: float = 0.6, s2: float = 0.3) -> MeasureConfig:
    """δ₁ + δ_{s1} − α·δ_{s2} con s̄ = s1."""
    return _atoms(f"d1+d{s1:g}-{alpha:g}d{s2:g}", s1, (1.0, 1.0), (s1, 1.0), (s2, -alpha))


def _unit() -> DomainConfig:
    return DomainConfig(intervals=[(0.0, 1.0)])


def default_scenario(kind: ScenarioKind | str, seed: Optional[int] = None) -> Scenario:
    """Escenario con los valores por defecto de cada tipo."""
    kind = ScenarioKind(kind)
    seed = settings.default_seed if seed is None else seed
    base: Dict[str, Any] = {"kind": kind, "seed": seed}
    if kind is ScenarioKind.EXTINCTION_SURVIVAL:
        base.update(
            measures=[_atoms("d1", 0.5, (1.0, 1.0))],
            domains=[_unit()],
            n_per_unit=512,
            sigma_values=[9.0, 12.0],
            resources=ResourceConfig(nu=1.0, tau=0.0),
        )
    elif kind is ScenarioKind.NEGATIVE_COMPONENT:
        base.update(
            measures=[appendix_measure(0.05)],
            domains=[_unit()],
            n_per_unit=128,
            eps_values=[0.1, 0.5, 0.9],
            resources=ResourceConfig(nu=1.0, tau=0.0),
        )
    elif kind is ScenarioKind.FRAGMENTATION:
        base.update(
            measures=[_atoms("d1+d0.5", 0.5, (1.0, 1.0), (0.5, 1.0))],
            control_measure=_atoms("d1", 0.5, (1.0, 1.0)),
            domains=[_unit(), DomainConfig(intervals=[(2.0, 3.0)])],
            n_per_unit=64,
            resources=ResourceConfig(nu=1.0, tau=0.0),
        )
    elif kind is ScenarioKind.SCALING_SURVIVAL:
        base.update(
            measures=[_atoms("d0.5", 0.5, (0.5, 1.0))],
            domains=[_unit()],
            n_per_unit=64,
            r_values=[1.0, 2.0, 4.0, 8.0],
            resources=ResourceConfig(sigma=1.0, nu=1.0, tau=0.5),
            kernel=KernelConfig(width=0.25),
        )
    elif kind is ScenarioKind.TWO_MEASURES:
        base.update(
            measures=[_atoms("d0.2", 0.2, (0.2, 1.0)), _atoms("d0.8", 0.8, (0.8, 1.0))],
            domains=[_unit()],
            n_per_unit=64,
            r_values=[0.25, 0.5, 1.0, 2.0, 4.0],
            resources=ResourceConfig(nu=1.0, tau=0.0),
        )
    elif kind is ScenarioKind.MODULUS_COUNTEREXAMPLE:
        base.update(
            measures=[_atoms("d1-0.05d0.5", 0.75, (1.0, 1.0), (0.5, -0.05)), appendix_measure(0.002)],
            domains=[_unit()],
            n_per_unit=64,
            modulus_samples=50,
        )
    elif kind is ScenarioKind.APPENDIX_CHECK:
        base.update(alpha=0.002, domains=[_unit()], n_per_unit=64)
    return Scenario.model_validate(base)


def merge_scenario(kind: ScenarioKind | str, overrides: Optional[Dict[str, Any]], seed: Optional[int] = None) -> Scenario:
    """Completa un escenario con los valores por defecto de su tipo."""
    sc = default_scenario(kind, seed)
    if not overrides:
        return sc
    data = sc.model_dump()
    data.update({k: v for k, v in overrides.items() if v is not None})
    return Scenario.model_validate(data)


@dataclass
class _ReportBuilder:
    sc: Scenario
    eigenvalues: Dict[str, float] = field(default_factory=dict)
    windows: Dict[str, List[float]] = field(default_factory=dict)
    classifications: Dict[str, str] = field(default_factory=dict)
    slacks: Dict[str, float] = field(default_factory=dict)
    checks: Dict[str, bool] = field(default_factory=dict)
    diagnostics: List[str] = field(default_factory=list)
    metadata: Dict[str, Any] = field(default_factory=dict)
    rows: List[EigenRow] = field(default_factory=list)
    profiles: Dict[str, List[Tuple[float, float]]] = field(default_factory=dict)
    inconclusive: bool = False

    def eigen(self, key: str, domain: Domain1D, measure: str, pair: EigenPair, r: Optional[float] = None) -> float:
        self.eigenvalues[key] = pair.eigenvalue
        self.rows.append(
            EigenRow(
                label=key,
                domain=domain_label(domain),
                measure=measure,
                r=r,
                eigenvalue=pair.eigenvalue,
                residual=pair.residual,
                gap=pair.gap,
            )
        )
        return pair.eigenvalue

    def check(self, name: str, ok: bool) -> None:
        self.checks[name] = bool(ok)
        if not ok:
            log.warning("chequeo_fallido", chequeo=name)

    def undecided(self, message: str) -> None:
        self.inconclusive = True
        self.diagnostics.append(message)

    def solution(self, key: str, report: SolveReport) -> Classification:
        self.classifications[key] = report.classification.value
        self.slacks[f"{key}:energia"] = report.energy
        self.profiles[key] = list(zip(report.u.grid.nodes.tolist(), report.u.values.tolist()))
        if not report.converged:
            self.undecided(f"{key}: el descenso no alcanzó la tolerancia (grad_norm={report.grad_norm:.3e})")
        return report.classification

    def build(self) -> Report:
        if not all(self.checks.values()):
            status = ReportStatus.INCONSISTENT
        elif self.inconclusive:
            status = ReportStatus.INCONCLUSIVE
        else:
            status = ReportStatus.CONSISTENT
        return Report(
            kind=self.sc.kind,
            params=self.sc.model_dump(mode="json", exclude_none=True),
            eigenvalues=self.eigenvalues,
            windows=self.windows,
            classifications=self.classifications,
            slacks=self.slacks,
            checks=self.checks,
            status=status,
            paper_consistent=status is ReportStatus.CONSISTENT,
            diagnostics=self.diagnostics,
            metadata=self.metadata,
            eigen_rows=self.rows,
            profiles=self.profiles,
        )


def _options(sc: Scenario) -> SolverOptions:
    return SolverOptions.from_settings(settings, seed=sc.seed)


def _select_sigma(low: EigenPair, high: EigenPair, tau: float) -> Optional[float]:
    """Punto medio de (λ_bajo, λ_alto − τ) si la ventana supera el ruido espectral."""
    lo = low.eigenvalue
    hi = high.eigenvalue - tau
    noise = max(low.residual * abs(low.eigenvalue), high.residual * abs(high.eigenvalue), 1e-12)
    if hi - lo <= settings.window_safety * noise:
        return None
    return 0.5 * (lo + hi)


def _kernel_for(sc: Scenario, op: SuperposedOperator) -> Optional[Kernel]:
    return build_kernel(sc.kernel, op.grid)


def _solve(
    b: _ReportBuilder,
    key: str,
    op: SuperposedOperator,
    pair: EigenPair,
    sigma: float,
    res: ResourceConfig,
) -> SolveReport:
    problem = build_problem(op.grid, sigma, res.nu, res.tau, _kernel_for(b.sc, op), res.m)
    report = minimize_E(problem, op, _options(b.sc), pair)
    b.solution(key, report)
    return report


def _resources(sc: Scenario) -> ResourceConfig:
    return sc.resources or ResourceConfig()


def _measures(sc: Scenario, count: int) -> List[Tuple[SignedMeasure, str]]:
    if not sc.measures or len(sc.measures) < count:
        raise config_error(f"El escenario {sc.kind.value} necesita {count} medida(s)", code="ESCENARIO_INCOMPLETO")
    return [(build_measure(m), measure_label(m)) for m in sc.measures]


def _domains(sc: Scenario, count: int) -> List[Domain1D]:
    if not sc.domains or len(sc.domains) < count:
        raise config_error(f"El escenario {sc.kind.value} necesita {count} dominio(s)", code="ESCENARIO_INCOMPLETO")
    return [build_domain(d) for d in sc.domains]


def _n(sc: Scenario) -> int:
    if sc.n_per_unit is None:
        raise config_error("Falta n_per_unit", code="ESCENARIO_INCOMPLETO")
    return sc.n_per_unit


def run_extinction_survival(sc: Scenario) -> Report:
    b = _ReportBuilder(sc)
    mu, label = _measures(sc, 1)[0]
    domain = _domains(sc, 1)[0]
    res = _resources(sc)
    op, pair = solve_on(domain, mu, _n(sc))
    b.eigen("lambda", domain, label, pair)
    b.check("residuo_autopar", pair.residual <= settings.eigen_residual_tol)

    along: Dict[str, float] = {}
    for sigma in sc.sigma_values or []:
        key = f"sigma={sigma:g}"
        problem = build_problem(op.grid, sigma, res.nu, res.tau, _kernel_for(sc, op), res.m)
        thr = threshold_report(problem, pair)
        b.slacks[f"{key}:extincion"] = thr.extinction_slack
        b.slacks[f"{key}:supervivencia"] = thr.survival_slack
        along[key] = energy_along(problem, op, pair, 0.1)
        report = _solve(b, key, op, pair, sigma, res)
        if thr.verdict is ThresholdVerdict.EXTINCTION_CERTIFIED:
            b.check(f"{key}:extincion_trivial", report.classification is Classification.TRIVIAL)
        elif thr.verdict is ThresholdVerdict.SURVIVAL_CERTIFIED:
            b.check(
                f"{key}:supervivencia_no_trivial",
                report.classification is Classification.NONTRIVIAL and report.energy < 0.0,
            )
        else:
            b.diagnostics.append(f"{key}: σ entre ambas condiciones, veredicto indeterminado")
        b.metadata[f"{key}:veredicto"] = thr.verdict.value
    b.metadata["energia_t0.1_autofuncion"] = along
    return b.build()


def run_negative_component(sc: Scenario) -> Report:
    b = _ReportBuilder(sc)
    mu, label = _measures(sc, 1)[0]
    domain = _domains(sc, 1)[0]
    n = _n(sc)
    res = _resources(sc)
    hyp = check_hypotheses(mu, domain.R, sc.gamma_bar)
    b.metadata["hipotesis"] = hyp.model_dump(mode="json")

    op_plus, pair_plus = solve_on(domain, mu.positive_part(), n)
    b.eigen("lambda_plus", domain, f"({label})⁺", pair_plus)
    for eps in sc.eps_values or []:
        key = f"eps={eps:g}"
        op_eps, pair_eps = solve_on(domain, mu.with_negative_scaled(eps), n)
        b.eigen(f"lambda_{key}", domain, f"({label})_ε", pair_eps)
        slack = pair_plus.eigenvalue - pair_eps.eigenvalue
        b.slacks[f"{key}:caida_autovalor"] = slack
        b.check(f"{key}:caida_estricta", slack > 0.0)
        b.windows[key] = [pair_eps.eigenvalue, pair_plus.eigenvalue]

        sigma = _select_sigma(pair_eps, pair_plus, res.tau) if res.sigma == "auto" else float(res.sigma)
        if sigma is None:
            b.undecided(
                f"{key}: ventana ({pair_eps.eigenvalue:.10g}, {pair_plus.eigenvalue:.10g}) "
                "por debajo del error de discretización"
            )
            continue
        b.metadata[f"{key}:sigma"] = sigma
        r_plus = _solve(b, f"{key}:mu_plus", op_plus, pair_plus, sigma, res)
        r_eps = _solve(b, f"{key}:mu_eps", op_eps, pair_eps, sigma, res)
        b.check(f"{key}:mu_plus_trivial", r_plus.classification is Classification.TRIVIAL)
        b.check(f"{key}:mu_eps_no_trivial", r_eps.classification is Classification.NONTRIVIAL)
    return b.build()


def run_fragmentation(sc: Scenario) -> Report:
    b = _ReportBuilder(sc)
    mu, label = _measures(sc, 1)[0]
    first, second = _domains(sc, 2)[:2]
    union = first.union(second)
    n = _n(sc)
    res = _resources(sc)
    check_hypotheses(mu, union.R, sc.gamma_bar)

    op1, p1 = solve_on(first, mu, n)
    op2, p2 = solve_on(second, mu, n)
    opu, pu = solve_on(union, mu, n)
    b.eigen("lambda_omega1", first, label, p1)
    b.eigen("lambda_omega2", second, label, p2)
    b.eigen("lambda_union", union, label, pu)

    comp = compare_union(p1, p2, pu, mu)
    b.slacks["caida_union"] = comp.slack
    b.check("congruentes", comp.congruent_ok)
    b.check("caida_estricta", comp.strict_drop)
    b.metadata["brecha_espectral_union"] = pu.gap

    sigma = _select_sigma(pu, p1, res.tau) if res.sigma == "auto" else float(res.sigma)
    b.windows["union"] = [pu.eigenvalue, p1.eigenvalue]
    if sigma is None:
        b.undecided("ventana de fragmentación vacía a esta resolución")
    else:
        b.metadata["sigma"] = sigma
        r1 = _solve(b, "omega1", op1, p1, sigma, res)
        r2 = _solve(b, "omega2", op2, p2, sigma, res)
        ru = _solve(b, "union", opu, pu, sigma, res)
        b.check("omega1_trivial", r1.classification is Classification.TRIVIAL)
        b.check("omega2_trivial", r2.classification is Classification.TRIVIAL)
        b.check("union_no_trivial", ru.classification is Classification.NONTRIVIAL)

    if sc.control_measure is not None:
        control = build_measure(sc.control_measure)
        ctrl = union_comparison(first, second, control, n)
        b.eigenvalues["control_omega1"] = ctrl.lambda_first
        b.eigenvalues["control_union"] = ctrl.lambda_union
        b.slacks["control_caida_union"] = ctrl.slack
        if ctrl.local_measure:
            b.check("control_local_igualdad", bool(ctrl.local_equality_ok))
        else:
            b.check("control_caida_estricta", ctrl.strict_drop)
    return b.build()


def run_scaling_survival(sc: Scenario) -> Report:
    b = _ReportBuilder(sc)
    mu, label = _measures(sc, 1)[0]
    domain = _domains(sc, 1)[0]
    n = _n(sc)
    res = _resources(sc)
    sigma = 1.0 if res.sigma == "auto" else float(res.sigma)

    _, base = solve_on(domain, mu.positive_part(), n)
    b.eigen("lambda_plus_omega", domain, f"({label})⁺", base)
    bounds = mu.plus.support_bounds()
    assert bounds is not None
    chosen: Optional[float] = None
    for r in sorted(sc.r_values or []):
        inf_factor = min(r ** (2.0 * s) for s in bounds)
        if base.eigenvalue <= sigma * inf_factor and lattice_compatible(domain.scaled(r), n):
            chosen = r
            break
    if chosen is None:
        b.undecided("ningún radio candidato cumple λ⁺(Ω) ≤ inf r^{2s}")
        return b.build()
    b.metadata["r"] = chosen

    scaling = scaling_comparison(domain, mu, chosen, n)
    b.slacks["escala_inferior"] = scaling.slack_lower
    b.slacks["escala_superior"] = scaling.slack_upper
    b.check("escala_cotas", scaling.lower_ok and scaling.upper_ok)

    scaled = domain.scaled(chosen)
    op_r, pair_r = solve_on(scaled, mu, n)
    b.eigen("lambda_omega_r", scaled, label, pair_r, r=chosen)
    problem = build_problem(op_r.grid, sigma, res.nu, res.tau, _kernel_for(sc, op_r), res.m)
    thr = threshold_report(problem, pair_r)
    b.slacks["supervivencia"] = thr.survival_slack
    b.metadata["veredicto"] = thr.verdict.value
    if pair_r.eigenvalue >= sigma:
        b.undecided(
            f"λ_μ(Ω_r) = {pair_r.eigenvalue:.6g} no queda bajo σ a esta resolución"
        )
    report = _solve(b, "omega_r", op_r, pair_r, sigma, res)
    if thr.verdict is ThresholdVerdict.SURVIVAL_CERTIFIED:
        b.check("supervivencia_no_trivial", report.classification is Classification.NONTRIVIAL)
    return b.build()


def _balls(domain: Domain1D) -> Tuple[Domain1D, Domain1D, float, float]:
    """B_{R1}(x0) ⊂ Ω ⊂ B_{R2}(x0) con x0 el centro del intervalo más largo."""
    a, c = max(domain.intervals, key=lambda iv: iv[1] - iv[0])
    x0 = 0.5 * (a + c)
    r1 = 0.25 * (c - a)
    r2 = max(x0 - domain.intervals[0][0], domain.intervals[-1][1] - x0)
    return Domain1D(((x0 - r1, x0 + r1),)), Domain1D(((x0 - r2, x0 + r2),)), r1, r2


def run_two_measures(sc: Scenario) -> Report:
    b = _ReportBuilder(sc)
    (mu1, label1), (mu2, label2) = _measures(sc, 2)[:2]
    domain = _domains(sc, 1)[0]
    n = _n(sc)
    res = _resources(sc)
    sup1 = mu1.plus.support_bounds()
    sup2 = mu2.plus.support_bounds()
    assert sup1 is not None and sup2 is not None
    s1, s2 = sup1[1], sup2[0]
    b.check("soportes_separados", s1 < s2)

    radii = sorted(sc.r_values or [])
    lam: Dict[float, Tuple[float, float]] = {}
    solved: Dict[float, Tuple[SuperposedOperator, EigenPair, SuperposedOperator, EigenPair]] = {}
    for r in radii:
        d = domain.scaled(r)
        if not lattice_compatible(d, n):
            b.diagnostics.append(f"r={r:g} descartado: Ω_r no cae sobre la red")
            continue
        op1, p1 = solve_on(d, mu1, n)
        op2, p2 = solve_on(d, mu2, n)
        b.eigen(f"mu1:r={r:g}", d, label1, p1, r=r)
        b.eigen(f"mu2:r={r:g}", d, label2, p2, r=r)
        lam[r] = (p1.eigenvalue, p2.eigenvalue)
        solved[r] = (op1, p1, op2, p2)

    usable = [r for r in radii if r in lam]
    bracket: Optional[Tuple[float, float]] = None
    for r_lo, r_hi in zip(usable, usable[1:]):
        if lam[r_lo][0] < lam[r_lo][1] and lam[r_hi][0] > lam[r_hi][1]:
            bracket = (r_lo, r_hi)
            break

    ball1, ball2, R1, R2 = _balls(domain)
    _, b1_in = solve_on(ball1, mu1, n)
    _, b1_out = solve_on(ball2, mu1, n)
    _, b2_in = solve_on(ball1, mu2, n)
    _, b2_out = solve_on(ball2, mu2, n)
    expo = 1.0 / (2.0 * (s2 - s1))
    r_low = min(1.0, (b2_out.eigenvalue / b1_in.eigenvalue) ** expo)
    r_high = max(1.0, (b2_in.eigenvalue / b1_out.eigenvalue) ** expo)
    b.metadata["radios_bola"] = {"R1": R1, "R2": R2, "r_bajo": r_low, "r_alto": r_high}
    b.check(
        "radios_consistentes",
        all(lam[r][0] < lam[r][1] for r in usable if r < r_low)
        and all(lam[r][0] > lam[r][1] for r in usable if r > r_high),
    )

    if bracket is None:
        b.undecided("no se encontró un cruce entre los radios explorados")
        return b.build()
    r_lo, r_hi = bracket
    b.metadata["bracket"] = [r_lo, r_hi]
    b.slacks["cruce_r_bajo"] = lam[r_lo][1] - lam[r_lo][0]
    b.slacks["cruce_r_alto"] = lam[r_hi][0] - lam[r_hi][1]

    for r, favored in ((r_lo, 1), (r_hi, 2)):
        op1, p1, op2, p2 = solved[r]
        low, high = (p1, p2) if favored == 1 else (p2, p1)
        key = f"r={r:g}"
        b.windows[key] = [low.eigenvalue, high.eigenvalue]
        sigma = _select_sigma(low, high, res.tau) if res.sigma == "auto" else float(res.sigma)
        if sigma is None:
            b.undecided(f"{key}: ventana vacía a esta resolución")
            continue
        b.metadata[f"{key}:sigma"] = sigma
        rep1 = _solve(b, f"{key}:mu1", op1, p1, sigma, res)
        rep2 = _solve(b, f"{key}:mu2", op2, p2, sigma, res)
        winner, loser = (rep1, rep2) if favored == 1 else (rep2, rep1)
        b.check(f"{key}:favorecida_no_trivial", winner.classification is Classification.NONTRIVIAL)
        b.check(f"{key}:desfavorecida_trivial", loser.classification is Classification.TRIVIAL)
    return b.build()


def _two_bumps(grid_nodes: np.ndarray, a: Tuple[float, float], c: Tuple[float, float]) -> np.ndarray:
    def bump(x: np.ndarray, lo: float, hi: float) -> np.ndarray:
        inside = (x > lo) & (x < hi)
        return np.where(inside, np.sin(np.pi * (x - lo) / (hi - lo)) ** 2, 0.0)

    return bump(grid_nodes, *a) - bump(grid_nodes, *c)


def run_modulus_counterexample(sc: Scenario) -> Report:
    b = _ReportBuilder(sc)
    measures = _measures(sc, 2)
    (counter, label_c), (reabsorbed, label_r) = measures[0], measures[1]
    domain = _domains(sc, 1)[0]
    n = _n(sc)
    grid = build_grid(domain, n)
    rng = np.random.default_rng(sc.seed)

    hyp_c = check_hypotheses(counter, domain.R, sc.gamma_bar)
    b.metadata["hipotesis_contraejemplo"] = hyp_c.model_dump(mode="json")
    b.check("contraejemplo_sin_mu2forte", not hyp_c.mu2forte_ok)

    op_c = assemble_superposition(grid, counter)
    b.metadata["margen_contraejemplo"] = coercivity_margin(op_c)
    b.metadata["certificado_contraejemplo"] = modulus_certificate(op_c)
    u = GridFunction(grid, _two_bumps(grid.nodes, (0.1, 0.35), (0.65, 0.9)))
    gap = modulus_gap(op_c, u)
    b.slacks["contraejemplo_Q(|u|)-Q(u)"] = gap
    b.check("contraejemplo_modulo_aumenta", gap > 0.0)

    hyp_r = check_hypotheses(reabsorbed, domain.R, sc.gamma_bar)
    b.metadata["hipotesis_reabsorbida"] = hyp_r.model_dump(mode="json")
    b.check("reabsorbida_mu2forte", hyp_r.mu2forte_ok)
    op_r = assemble_superposition(grid, reabsorbed)
    worst = -math.inf
    strict = True
    for _ in range(sc.modulus_samples or 50):
        v = GridFunction(grid, rng.standard_normal(grid.n))
        g = modulus_gap(op_r, v)
        worst = max(worst, g)
        scale = abs(2.0 * grid.h * float(v.values @ (op_r.A_mu @ v.values)))
        strict = strict and g < -1e-12 * scale
    b.slacks["reabsorbida_max_Q(|u|)-Q(u)"] = worst
    b.check("reabsorbida_modulo_no_aumenta", worst <= 0.0)
    b.check("reabsorbida_estricta", strict)
    b.metadata["medidas"] = [label_c, label_r]
    return b.build()


def run_appendix_check(sc: Scenario) -> Report:
    b = _ReportBuilder(sc)
    alpha = sc.alpha if sc.alpha is not None else 0.002
    if sc.measures:
        mu, label = _measures(sc, 1)[0]
    else:
        cfg = appendix_measure(alpha)
        mu, label = build_measure(cfg), measure_label(cfg)
    domain = _domains(sc, 1)[0]
    n = _n(sc)

    hyp = check_hypotheses(mu, domain.R, sc.gamma_bar)
    b.metadata["hipotesis"] = hyp.model_dump(mode="json")
    b.slacks["gamma_min"] = hyp.gamma_min
    b.check("gamma_min_alpha_medios", abs(hyp.gamma_min - alpha / 2.0) <= 1e-15)

    gbar = hyp.gamma_bar_used
    feasible = alpha <= gbar * (1.0 - mu.s_bar)
    b.check("mu2forte_segun_alpha", hyp.mu2forte_ok == feasible)
    if hyp.mu2forte_ok and hyp.delta_star is not None:
        expected = alpha / gbar
        step = (1.0 - mu.s_bar) * 1.0 / settings.hypothesis_grid_points
        b.slacks["delta_star-alpha/gamma_bar"] = hyp.delta_star - expected
        b.check("delta_star_alpha_sobre_gamma_bar", -1e-12 <= hyp.delta_star - expected <= step + 1e-12)
        rhs = gbar * hyp.delta_star * measure_mass(mu.plus, mu.s_bar, max(mu.s_bar, 1.0 - hyp.delta_star))
        b.check("testigo_delta", hyp.minus_open_mass <= rhs)
        c_up, c_low = c_bounds(mu.dimension, mu.s_bar, hyp.delta_star)
        b.metadata["c_up"] = c_up
        b.metadata["c_low_por_delta"] = c_low

    ok, slack = power_ratio_check(mu, domain.R, np.random.default_rng(sc.seed))
    b.check("desigualdad_potencias", ok)
    b.slacks["desigualdad_potencias"] = slack

    op, pair = solve_on(domain, mu, n)
    b.eigen("lambda", domain, label, pair)
    b.slacks["margen_coercividad"] = coercivity_margin(op)
    b.check("coercivo", coercivity_margin(op) > 0.0)
    b.check("signo_autofuncion", pair.sign_violation <= 1e-10)
    b.metadata["c0_empirica"] = reabsorption_constant(op)
    b.metadata["constante_coercividad"] = 0.5 * spectral_norm_ratio(op)
    return b.build()


RUNNERS: Dict[ScenarioKind, Callable[[Scenario], Report]] = {
    ScenarioKind.EXTINCTION_SURVIVAL: run_extinction_survival,
    ScenarioKind.NEGATIVE_COMPONENT: run_negative_component,
    ScenarioKind.FRAGMENTATION: run_fragmentation,
    ScenarioKind.SCALING_SURVIVAL: run_scaling_survival,
    ScenarioKind.TWO_MEASURES: run_two_measures,
    ScenarioKind.MODULUS_COUNTEREXAMPLE: run_modulus_counterexample,
    ScenarioKind.APPENDIX_CHECK: run_appendix_check,
}


def run_scenario(sc: Scenario) -> Report:
    """Ejecuta el escenario y arma su reporte."""
    token = escenario_var.set(sc.kind.value)
    bound = log.bind(escenario=sc.kind.value, seed=sc.seed)
    try:
        bound.info("escenario_inicio", n_per_unit=sc.n_per_unit)
        runner = metrics_service.medir_tiempo_escenario(sc.kind.value)(RUNNERS[sc.kind])
        report = runner(sc)
        bound.info("escenario_fin", estado=report.status.value, chequeos=len(report.checks))
        return report
    finally:
        escenario_var.reset(token)
