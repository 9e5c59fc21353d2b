"""
Saturable Battery Simulator - Steady-State Tools

Long-time energy and ergotropy of the driven, lossy battery from the Liouvillian null
space, optionally next to the maximum energy reached while charging.
"""

import logging
from typing import Any, Dict, Optional

from mcp.server.fastmcp import FastMCP

from core.config import RunConfig
from core.dynamics import build_liouvillian
from core.model import ModelParams
from core.steadystate import max_energy, steady_state
from tools.common import CommandReport, coord_columns, resolved_jobs, run_tool_command
from tools.sweep import run_sweep
from utils.formatters import write_table

logger = logging.getLogger(__name__)

DOMINANCE_TOL = 1e-6


def steady_point(p: ModelParams, method: str, compare: bool, tau_max: float, coarse_count: int,
                 refine_step: float, rtol: float, atol: float, integrator: str) -> Dict[str, float]:
    result = steady_state(build_liouvillian(p), method=method)
    values = {
        "E_ss": result.energy_ss,
        "ergotropy_ss": result.ergotropy_ss,
        "spectral_gap": result.spectral_gap,
        "residual": result.residual,
    }
    if compare:
        values["E_max"] = max_energy(p, tau_max, coarse_count=coarse_count, refine_step=refine_step,
                                     tol=rtol, atol=atol, method=integrator).energy_max
    return values


def run_steady(config: RunConfig) -> CommandReport:
    points = config.sweep_points()
    tau_max, coarse_count = config.charging_window() if config.compare_max_energy else (0.0, 0)
    sweep = run_sweep(steady_point, points,
                      args=(config.steady_method, config.compare_max_energy, tau_max, coarse_count,
                            config.refine_step, config.rtol, config.atol, config.integrator),
                      jobs=resolved_jobs(config))
    report = CommandReport.from_sweep("steady", sweep)

    coords_header = coord_columns(points[0][0])
    value_columns = ["E_ss", "ergotropy_ss", "spectral_gap", "residual"]
    if config.compare_max_energy:
        value_columns.append("E_max")
    header = coords_header + value_columns

    rows, above = [], []
    for outcome in sweep.succeeded:
        values = outcome.value
        row = [outcome.coords[c] for c in coords_header] + [values[c] for c in value_columns]
        rows.append(row)
        report.rows.append(dict(zip(header, row)))
        if config.compare_max_energy and values["E_ss"] > values["E_max"] + DOMINANCE_TOL:
            above.append(outcome.coords)
            logger.warning(f"⚠️ Steady-state energy exceeds the charging maximum at {outcome.coords}")

    if rows:
        report.files += write_table(config.outputs / "steady", header, rows,
                                    {**config.resolved(), "steady_above_max": above}, config.format)
    report.summary = {"points": len(points), "failed": len(sweep.failed), "method": config.steady_method}
    if config.compare_max_energy:
        report.summary["E_ss above E_max"] = len(above)
    return report


def register_steady_tools(mcp: FastMCP):
    """Register the steady-state tool with the MCP server."""

    @mcp.tool()
    async def steady(preset: Optional[str] = None, overrides: Optional[Dict[str, Any]] = None) -> str:
        """
        Compute the unique steady state of the battery and its energy and ergotropy.

        Args:
            preset: Figure preset ('fig5' sweeps n_s and compares with the charging maximum)
            overrides: Flat config values, e.g. {"steady_method": "bordered", "gamma": 0.4}

        Returns:
            E_ss, ergotropy, spectral gap and residual per point, and the files written
        """
        return await run_tool_command("steady", run_steady, preset, overrides, mcp.get_context())
