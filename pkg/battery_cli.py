#!/usr/bin/env python3
"""
Saturable Battery Simulator - Command Line

    battery_cli.py [--config run.toml] [--out DIR] [--jobs N] [--dim N] [--format csv|json]
                   [--preset figK] [--set key=value ...] [--verbose] COMMAND

Commands: spectrum, charge, maxenergy, wigner, steady, check. Exit codes: 0 success,
1 configuration error, 2 numerical failure, 3 partial sweep failure.
"""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, List, Optional

import typer
from dotenv import load_dotenv
from rich.console import Console
from rich.table import Table

from core.config import BatterySettings, RunConfig, load_run_config
from core.errors import BatteryError, ConfigError
from tools.charge_tools import run_charge
from tools.check_tools import run_check
from tools.common import CommandReport
from tools.maxenergy_tools import run_maxenergy
from tools.spectrum_tools import run_spectrum
from tools.steady_tools import run_steady
from tools.wigner_tools import run_wigner
from utils.formatters import format_float
from utils.mappings import get_exit_code_display

logger = logging.getLogger(__name__)
console = Console(stderr=True)

app = typer.Typer(help="Saturable quantum battery simulator.", no_args_is_help=True, add_completion=False)


@dataclass
class CliState:
    config: Optional[Path] = None
    overrides: List[str] = field(default_factory=list)
    flags: dict = field(default_factory=dict)


def setup_logging(verbose: bool) -> None:
    settings = BatterySettings()
    level = logging.DEBUG if verbose else getattr(logging, settings.log_level.upper(), logging.INFO)
    handlers: List[logging.Handler] = [logging.StreamHandler()]
    if settings.log_file:
        handlers.append(logging.FileHandler(settings.log_file))
    logging.basicConfig(
        level=level,
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        handlers=handlers,
        force=True,
    )


@app.callback()
def main(
    ctx: typer.Context,
    config: Optional[Path] = typer.Option(None, "--config", help="Flat TOML config file"),
    out: Optional[Path] = typer.Option(None, "--out", help="Output directory"),
    jobs: Optional[int] = typer.Option(None, "--jobs", min=1, help="Worker processes (default: all processors)"),
    dim: Optional[int] = typer.Option(None, "--dim", help="Fock truncation N"),
    fmt: Optional[str] = typer.Option(None, "--format", help="csv or json"),
    preset: Optional[str] = typer.Option(None, "--preset", help="Figure preset: fig1 .. fig5"),
    overrides: Optional[List[str]] = typer.Option(None, "--set", help="Config override key=value (TOML value)"),
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Debug logging"),
):
    load_dotenv()
    setup_logging(verbose)
    ctx.obj = CliState(
        config=config,
        overrides=list(overrides or []),
        flags={"outputs": out, "jobs": jobs, "dim": dim, "format": fmt, "preset": preset},
    )


def _print_report(report: CommandReport) -> None:
    if report.rows:
        table = Table(title=report.command)
        columns = list(report.rows[0])
        for column in columns:
            table.add_column(column)
        for row in report.rows:
            table.add_row(*(format_float(v) if isinstance(v, float) else str(v) for v in (row.get(c) for c in columns)))
        console.print(table)
    for failure in report.failures:
        console.print(f"[red]✗[/red] {failure['point']}: {failure['error_type']}: {failure['error']}")
    console.print(f"{len(report.files)} file(s) written; exit {report.exit_code} ({get_exit_code_display(report.exit_code)})")


def _execute(ctx: typer.Context, runner: Callable[[RunConfig], CommandReport], **extra) -> None:
    state: CliState = ctx.obj
    try:
        config = load_run_config(state.config, state.overrides, **state.flags, **extra)
    except ConfigError as e:
        console.print(f"[red]Configuration error:[/red] {e}")
        raise typer.Exit(e.exit_code)

    try:
        report = runner(config)
    except BatteryError as e:
        logger.error(f"{ctx.info_name} failed: {e}", exc_info=True)
        console.print(f"[red]{type(e).__name__}:[/red] {e}")
        raise typer.Exit(e.exit_code)

    _print_report(report)
    raise typer.Exit(report.exit_code)


@app.command()
def spectrum(ctx: typer.Context,
             kerr: Optional[bool] = typer.Option(None, "--kerr/--no-kerr", help="Add the Kerr expansion column")):
    """Level energies E_n over the n_s grid (spectrum.csv)."""
    _execute(ctx, run_spectrum, include_kerr=kerr)


@app.command()
def charge(ctx: typer.Context):
    """Energy and ergotropy trajectories per sweep point, with a summary."""
    _execute(ctx, run_charge)


@app.command()
def maxenergy(ctx: typer.Context):
    """Maximum stored energy for every (n_s, gamma) pair (maxenergy.csv)."""
    _execute(ctx, run_maxenergy)


@app.command()
def wigner(ctx: typer.Context):
    """Wigner function snapshots and their negativity summary."""
    _execute(ctx, run_wigner)


@app.command()
def steady(ctx: typer.Context):
    """Steady-state energy and ergotropy over the sweep (steady.csv)."""
    _execute(ctx, run_steady)


@app.command()
def check(ctx: typer.Context):
    """Truncation, integrator and Taylor checks (check_report.json)."""
    _execute(ctx, run_check)


if __name__ == "__main__":
    app()
