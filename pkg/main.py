import json
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence
from uuid import uuid4

import click
from prometheus_client import REGISTRY, write_to_textfile

from app.config.logging_config import run_id_var, setup_logging
from app.config.settings import settings
from app.schemas.config import Config
from app.schemas.escenario import ReportStatus, ScenarioKind
from app.schemas.logistica import SolverOptions
from app.services.config_service import (
    apply_tolerances,
    build_domain,
    build_kernel,
    build_measure,
    load_config,
)
from app.services.errors import SolverError, config_error
from app.services.experiments_service import merge_scenario, run_scenario
from app.services.export_service import emit_report, export_eigenpair, export_solution, to_json, write_json
from app.services.grid_service import build_grid
from app.services.logistic_service import build_problem, minimize_E, threshold_report
from app.services.measure_service import check_hypotheses
from app.services.operator_service import assemble_superposition
from app.services.operator_service import dump_matrix as write_matrix
from app.services.selftest_service import run_selftest
from app.services.spectral_service import principal_eigen, summarize
from app.utils.logger import get_run_logger, setup_structlog

DEFAULT_N_PER_UNIT = 64


@dataclass
class RunOptions:
    """Opciones globales de la CLI compartidas por todos los subcomandos"""

    out: Optional[Path]
    seed: Optional[int]
    n: Optional[int]
    quiet: bool
    restore: Dict[str, Any] = field(default_factory=dict)

    def load(self, path: Optional[str]) -> Config:
        if path is None:
            raise config_error("Falta el archivo de configuración", code="CONFIG_REQUERIDA")
        config = load_config(path)
        self.restore.update(apply_tolerances(config.tolerances))
        return config

    def out_dir(self, config: Optional[Config] = None) -> Path:
        if self.out is not None:
            return self.out
        if config is not None and config.output_dir:
            return Path(config.output_dir)
        return Path(settings.output_dir)

    def seed_for(self, config: Optional[Config] = None) -> int:
        if self.seed is not None:
            return self.seed
        if config is not None and config.seed is not None:
            return config.seed
        return settings.default_seed

    def n_for(self, config: Optional[Config] = None) -> int:
        if self.n is not None:
            return self.n
        if config is not None and config.n_per_unit is not None:
            return config.n_per_unit
        return DEFAULT_N_PER_UNIT


def _config_path(positional: Optional[str], option: Optional[str]) -> Optional[str]:
    if positional and option and positional != option:
        raise config_error("Se indicaron dos configuraciones distintas", code="CONFIG_DUPLICADA")
    return positional or option


def _echo(payload: Any) -> None:
    click.echo(to_json(payload), nl=False)


def _measure_of(config: Config):
    if config.measure is None:
        raise config_error("La configuración no define 'measure'", code="MEDIDA_REQUERIDA")
    return build_measure(config.measure)


config_option = click.option("--config", "config_opt", type=click.Path(dir_okay=False), help="Archivo JSON de configuración")


@click.group()
@click.option("--out", type=click.Path(file_okay=False, path_type=Path), help="Directorio de salida")
@click.option("--seed", type=click.IntRange(min=0), help="Semilla de la corrida")
@click.option("--n", "n", type=click.IntRange(min=1), help="Celdas por unidad de longitud")
@click.option("--quiet", is_flag=True, help="Solo advertencias y errores en stderr")
@click.option("--metrics", type=click.Path(dir_okay=False), help="Escribe las métricas Prometheus en este archivo")
@click.pass_context
def cli(ctx: click.Context, out: Optional[Path], seed: Optional[int], n: Optional[int], quiet: bool, metrics: Optional[str]) -> None:
    """Solver FKPP para superposiciones de laplacianos fraccionarios."""
    setup_logging(quiet=quiet)
    setup_structlog()
    opts = RunOptions(out=out, seed=seed, n=n, quiet=quiet)
    ctx.obj = opts

    def _close() -> None:
        apply_tolerances(opts.restore)
        if metrics:
            write_to_textfile(metrics, REGISTRY)

    ctx.call_on_close(_close)


@cli.command("check-measure")
@click.argument("config_path", required=False, type=click.Path(dir_okay=False))
@config_option
@click.pass_obj
def check_measure(opts: RunOptions, config_path: Optional[str], config_opt: Optional[str]) -> int:
    """Verifica (μ0), (μ1), (μ2) y calcula γ, s♯, 2⋆ y δ⋆."""
    config = opts.load(_config_path(config_path, config_opt))
    mu = _measure_of(config)
    domain = build_domain(config.domain)
    report = check_hypotheses(mu, domain.R)
    payload = report.model_dump(mode="json")
    write_json(opts.out_dir(config) / "check_measure.json", payload)
    _echo(payload)
    return 0


@cli.command("eigen")
@click.argument("config_path", required=False, type=click.Path(dir_okay=False))
@config_option
@click.option("--method", type=click.Choice(["dense", "inverse"]), default="dense", show_default=True)
@click.option("--dump-matrix", type=click.Path(dir_okay=False), help="Vuelca A_μ en binario little-endian")
@click.pass_obj
def eigen(opts: RunOptions, config_path: Optional[str], config_opt: Optional[str], method: str, dump_matrix: Optional[str]) -> int:
    """Autopar principal de A_μ sobre Ω."""
    config = opts.load(_config_path(config_path, config_opt))
    mu = _measure_of(config)
    grid = build_grid(build_domain(config.domain), opts.n_for(config))
    op = assemble_superposition(grid, mu)
    if dump_matrix:
        written = write_matrix(op.A_mu, dump_matrix)
        get_run_logger("fkpp.cli").info("Matriz volcada en %s", written)
    pair = principal_eigen(op, method=method)
    summary = summarize(pair, op)
    export_eigenpair(pair, summary, opts.out_dir(config) / "eigen")
    _echo(summary.model_dump(mode="json", by_alias=True))
    return 0


@cli.command("solve")
@click.argument("config_path", required=False, type=click.Path(dir_okay=False))
@config_option
@click.pass_obj
def solve(opts: RunOptions, config_path: Optional[str], config_opt: Optional[str]) -> int:
    """Minimiza E y clasifica la solución; sale con 3 si no converge."""
    config = opts.load(_config_path(config_path, config_opt))
    mu = _measure_of(config)
    res = config.resources
    if res.sigma == "auto":
        raise config_error("solve necesita un sigma numérico", code="SIGMA_REQUERIDO")
    grid = build_grid(build_domain(config.domain), opts.n_for(config))
    op = assemble_superposition(grid, mu)
    pair = principal_eigen(op)
    problem = build_problem(grid, res.sigma, res.nu, res.tau, build_kernel(config.kernel, grid), res.m)
    solver_opts = SolverOptions.from_settings(settings, seed=opts.seed_for(config))
    report = minimize_E(problem, op, solver_opts, pair)
    thresholds = threshold_report(problem, pair)

    out = opts.out_dir(config) / "solve"
    export_solution(report, out)
    write_json(out / "thresholds.json", thresholds.model_dump(mode="json"))
    _echo({"solve": report.model_dump(mode="json"), "thresholds": thresholds.model_dump(mode="json")})
    return 0 if report.converged else 3


@cli.command("scenario")
@click.argument("kind", type=click.Choice([k.value for k in ScenarioKind]))
@click.argument("config_path", required=False, type=click.Path(dir_okay=False))
@config_option
@click.pass_obj
def scenario(opts: RunOptions, kind: str, config_path: Optional[str], config_opt: Optional[str]) -> int:
    """Corre un escenario y escribe <out>/<kind>/; sale con 3 si es inconsistente."""
    path = _config_path(config_path, config_opt)
    config = opts.load(path) if path else None
    overrides: Dict[str, Any] = {}
    if config is not None and config.scenario is not None:
        overrides = config.scenario.model_dump(exclude_none=True)
    n = opts.n if opts.n is not None else (config.n_per_unit if config is not None else None)
    if n is not None:
        overrides["n_per_unit"] = n
    sc = merge_scenario(kind, overrides, opts.seed_for(config))
    report = run_scenario(sc)
    written = emit_report(report, opts.out_dir(config))
    click.echo(f"{report.kind.value}: {report.status.value} ({written[0].parent})")
    return 0 if report.paper_consistent or report.status is ReportStatus.INCONCLUSIVE else 3


@cli.command("selftest")
@click.pass_obj
def selftest(opts: RunOptions) -> int:
    """Corre los criterios de aceptación y escribe selftest.json."""
    summary = run_selftest(opts.out_dir() / "selftest", opts.seed_for())
    for c in summary.criteria:
        click.echo(f"[{'OK' if c.ok else 'FALLA'}] {c.id:2d} {c.name}: {c.detail}")
    return 0 if summary.ok else 3


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Punto de entrada: traduce errores del solver y de click a códigos de salida."""
    run_id_var.set(uuid4().hex[:12])
    args: List[str] = list(sys.argv[1:] if argv is None else argv)
    try:
        result = cli.main(args=args, prog_name="fkpp", standalone_mode=False)
    except SolverError as exc:
        click.echo(json.dumps(exc.to_dict(), ensure_ascii=False, default=str), err=True)
        return exc.exit_code
    except click.UsageError as exc:
        exc.show()
        return 4
    except click.ClickException as exc:
        exc.show()
        return exc.exit_code
    except click.Abort:
        click.echo("Abortado", err=True)
        return 1
    return int(result or 0)


if __name__ == "__main__":
    sys.exit(main())
