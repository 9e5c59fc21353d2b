"""
Saturable Battery Simulator - Wigner Tools

Wigner function snapshots W(β) of the charging state. Every snapshot is an independent
sweep task (propagate to τ, then sample the grid), so snapshots run in parallel.
"""

import logging
from typing import Any, Dict, Optional, Tuple

from mcp.server.fastmcp import FastMCP

from core.config import RunConfig
from core.dynamics import build_liouvillian, propagate
from core.model import ModelParams
from core.observables import WignerGrid, WignerGridSpec, wigner
from core.states import DensityMatrix
from tools.common import CommandReport, coord_columns, resolved_jobs, run_tool_command
from tools.sweep import run_sweep
from utils.formatters import write_document, write_table

logger = logging.getLogger(__name__)


def wigner_snapshot(task: Tuple[ModelParams, float], extent: float, points: int,
                    rtol: float, atol: float, integrator: str) -> WignerGrid:
    p, tau = task
    rho0 = DensityMatrix.ground(p.dim)
    rho = propagate(build_liouvillian(p), rho0, [tau], tol=rtol, atol=atol, method=integrator)[0]
    return wigner(rho, grid=WignerGridSpec(extent=extent, points=points))


def run_wigner(config: RunConfig) -> CommandReport:
    tasks = []
    for coords, p in config.sweep_points():
        for tau in config.snapshot_times:
            tasks.append(({**coords, "tau": float(tau)}, (p, float(tau))))

    sweep = run_sweep(wigner_snapshot, tasks,
                      args=(config.wigner_extent, config.wigner_points, config.rtol, config.atol,
                            config.integrator),
                      jobs=resolved_jobs(config))
    report = CommandReport.from_sweep("wigner", sweep)
    resolved = config.resolved()

    coords_header = coord_columns(tasks[0][0])
    header = coords_header + ["min_W", "negative_volume", "normalization"]
    summary_rows = []
    for outcome in sweep.succeeded:
        grid: WignerGrid = outcome.value
        name = config.outputs / f"wigner_{outcome.index:03d}"
        sidecar_config = {**resolved, "point": outcome.coords}
        cells = ((x, y, grid.values[i, j])
                 for i, x in enumerate(grid.re_beta) for j, y in enumerate(grid.im_beta))
        report.files += write_table(name, ["re_beta", "im_beta", "W"], cells, sidecar_config, config.format)
        report.files += write_document(name.with_name(name.name + "_grid.json"), {
            "point": outcome.coords,
            "padded_dim": grid.padded_dim,
            "re_beta": grid.re_beta,
            "im_beta": grid.im_beta,
            "values": grid.values,
        }, sidecar_config)

        row = [outcome.coords[c] for c in coords_header]
        row += [grid.min_value, grid.negative_volume, grid.normalization]
        summary_rows.append(row)
        report.rows.append(dict(zip(header, row)))

    if summary_rows:
        report.files += write_table(config.outputs / "wigner_summary", header, summary_rows, resolved, config.format)
    negative = [r for r in report.rows if r["min_W"] < 0]
    report.summary = {"snapshots": len(tasks), "failed": len(sweep.failed), "negative snapshots": len(negative)}
    return report


def register_wigner_tools(mcp: FastMCP):
    """Register the Wigner tool with the MCP server."""

    @mcp.tool(name="wigner")
    async def wigner_snapshots(preset: Optional[str] = None, overrides: Optional[Dict[str, Any]] = None) -> str:
        """
        Compute Wigner functions of the battery state at the configured snapshot times.

        Args:
            preset: Figure preset ('fig4' uses n_s = 1, α = 0.3, γ = 0.01 up to τ = 20)
            overrides: Flat config values, e.g. {"snapshot_times": [0, 10, 20], "wigner_points": 61}

        Returns:
            Minimum of W and negative volume per snapshot, and the files written
        """
        return await run_tool_command("wigner", run_wigner, preset, overrides, mcp.get_context())
