"""
Saturable Battery Simulator - Charging Tools

Charging runs from the empty battery: E(τ) and ergotropy along the configured time
grid for every sweep point, with a summary of maxima and charging power.
"""

import logging
from typing import Any, Dict, Optional, Tuple

import numpy as np
from mcp.server.fastmcp import FastMCP

from core.config import RunConfig
from core.dynamics import TrajectoryRecord, build_liouvillian, propagate_record
from core.model import ModelParams, battery_hamiltonian
from core.states import DensityMatrix
from tools.common import CommandReport, coord_columns, resolved_jobs, run_tool_command
from tools.sweep import run_sweep
from utils.formatters import write_table

logger = logging.getLogger(__name__)

TRAJECTORY_COLUMNS = ["tau", "energy", "ergotropy", "trace_err", "min_eig", "purity"]
ERGOTROPY_SLACK = 1e-8


def charge_trajectory(p: ModelParams, tau_grid: np.ndarray, rtol: float, atol: float,
                      integrator: str) -> TrajectoryRecord:
    L = build_liouvillian(p)
    record, _ = propagate_record(L, DensityMatrix.ground(p.dim), tau_grid, battery_hamiltonian(p),
                                 tol=rtol, atol=atol, method=integrator)
    return record


def charge_point(p: ModelParams, tau_grid: np.ndarray, rtol: float, atol: float, integrator: str,
                 check_step: int) -> Tuple[TrajectoryRecord, Optional[float]]:
    """One charging run; with check_step > 0 also the largest energy change at dim + check_step."""
    record = charge_trajectory(p, tau_grid, rtol, atol, integrator)
    delta = None
    if check_step:
        larger = charge_trajectory(p.with_updates(dim=p.dim + check_step), tau_grid, rtol, atol, integrator)
        delta = float(np.max(np.abs(larger.energy - record.energy)))
    return record, delta


def run_charge(config: RunConfig) -> CommandReport:
    points = config.sweep_points()
    check_step = config.check_dim_step if config.truncation_check else 0
    sweep = run_sweep(charge_point, points,
                      args=(config.tau_grid(), config.rtol, config.atol, config.integrator, check_step),
                      jobs=resolved_jobs(config))
    report = CommandReport.from_sweep("charge", sweep)
    resolved = config.resolved()

    coords_header = coord_columns(points[0][0])
    header = coords_header + ["tau_star", "E_max", "ergotropy_max", "interior", "tau_power", "power_max"]
    if config.truncation_check:
        header.append("truncation_delta")

    summary_rows = []
    for outcome in sweep.succeeded:
        record, delta = outcome.value
        excess = float(np.max(record.ergotropy - record.energy))
        if excess > ERGOTROPY_SLACK:
            logger.warning(f"Ergotropy exceeds energy by {excess:.3e} at {outcome.coords}")

        name = config.outputs / f"trajectory_{outcome.index:03d}"
        rows = zip(record.times, record.energy, record.ergotropy, record.trace_err, record.min_eig, record.purity)
        report.files += write_table(name, TRAJECTORY_COLUMNS, rows, {**resolved, "point": outcome.coords},
                                    config.format)

        tau_star, e_max = record.argmax()
        tau_power, power = record.max_average_power()
        row = [outcome.coords[c] for c in coords_header]
        row += [tau_star, e_max, float(record.ergotropy.max()), record.has_interior_maximum(), tau_power, power]
        if config.truncation_check:
            row.append(delta)
        summary_rows.append(row)
        report.rows.append(dict(zip(header, row)))

    if summary_rows:
        report.files += write_table(config.outputs / "charge_summary", header, summary_rows, resolved, config.format)
    report.summary = {"points": len(points), "failed": len(sweep.failed), "tau_stop": float(config.tau_grid()[-1])}
    return report


def register_charge_tools(mcp: FastMCP):
    """Register the charging tool with the MCP server."""

    @mcp.tool()
    async def charge(preset: Optional[str] = None, overrides: Optional[Dict[str, Any]] = None) -> str:
        """
        Simulate battery charging from the ground state and record energy and ergotropy over time.

        Args:
            preset: Figure preset ('fig2' sweeps n_s at the Fig. 2 caption parameters)
            overrides: Flat config values, e.g. {"n_s": 0.3, "tau_stop": 50, "tau_count": 501}

        Returns:
            Per-point maxima of energy, ergotropy and average power, and the files written
        """
        return await run_tool_command("charge", run_charge, preset, overrides, mcp.get_context())
