"""
Saturable Battery Simulator - Maximum Energy Tools

Largest stored energy over a charging window for every (n_s, γ) pair, with the
capacity trends checked as data: non-decreasing in n_s, and lower for larger loss.
"""

import logging
from collections import defaultdict
from typing import Any, Dict, List, Optional

from mcp.server.fastmcp import FastMCP

from core.config import RunConfig
from core.model import ModelParams
from core.steadystate import MaxEnergyResult, max_energy
from tools.common import CommandReport, coord_columns, resolved_jobs, run_tool_command
from tools.sweep import run_sweep
from utils.formatters import write_table

logger = logging.getLogger(__name__)

TREND_TOL = 1e-4


def max_energy_point(p: ModelParams, tau_max: float, coarse_count: int, refine_step: float,
                     rtol: float, atol: float, integrator: str) -> MaxEnergyResult:
    return max_energy(p, tau_max, coarse_count=coarse_count, refine_step=refine_step,
                      tol=rtol, atol=atol, method=integrator)


def trend_violations(rows: List[Dict[str, Any]], tol: float = TREND_TOL) -> List[str]:
    """Where E_max drops as n_s grows, or where a larger γ stores more at the same n_s."""
    violations = []
    by_gamma = defaultdict(list)
    for row in rows:
        by_gamma[row["gamma"]].append(row)
    for gamma, curve in by_gamma.items():
        curve = sorted(curve, key=lambda r: r["n_s"])
        for a, b in zip(curve, curve[1:]):
            if b["E_max"] < a["E_max"] - tol:
                violations.append(f"γ={gamma}: E_max drops from n_s={a['n_s']} to n_s={b['n_s']}")

    gammas = sorted(by_gamma)
    for low, high in zip(gammas, gammas[1:]):
        reference = {r["n_s"]: r["E_max"] for r in by_gamma[low]}
        for r in by_gamma[high]:
            if r["n_s"] in reference and r["E_max"] > reference[r["n_s"]] + tol:
                violations.append(f"n_s={r['n_s']}: γ={high} stores more than γ={low}")
    return violations


def run_maxenergy(config: RunConfig) -> CommandReport:
    points = config.sweep_points()
    tau_max, coarse_count = config.charging_window()
    sweep = run_sweep(max_energy_point, points,
                      args=(tau_max, coarse_count, config.refine_step,
                            config.rtol, config.atol, config.integrator),
                      jobs=resolved_jobs(config))
    report = CommandReport.from_sweep("maxenergy", sweep)

    coords_header = coord_columns(points[0][0])
    header = coords_header + ["tau_star", "E_max"]
    rows, boundary = [], []
    for outcome in sweep.succeeded:
        result = outcome.value
        row = [outcome.coords[c] for c in coords_header] + [result.tau_star, result.energy_max]
        rows.append(row)
        report.rows.append(dict(zip(header, row)))
        if result.at_boundary:
            boundary.append(outcome.coords)

    violations = trend_violations(report.rows)
    for v in violations:
        logger.warning(f"⚠️ Capacity trend violated: {v}")

    if rows:
        resolved = {**config.resolved(), "boundary_maxima": boundary, "trend_violations": violations}
        report.files += write_table(config.outputs / "maxenergy", header, rows, resolved, config.format)
    report.summary = {"points": len(points), "failed": len(sweep.failed),
                      "boundary maxima": len(boundary), "trend violations": len(violations)}
    return report


def register_maxenergy_tools(mcp: FastMCP):
    """Register the maximum-energy tool with the MCP server."""

    @mcp.tool()
    async def maxenergy(preset: Optional[str] = None, overrides: Optional[Dict[str, Any]] = None) -> str:
        """
        Find the maximum stored energy max_τ E(τ) and its time for each (n_s, γ) point.

        Args:
            preset: Figure preset ('fig3' runs 21 n_s values for γ = 0.2 and 0.4)
            overrides: Flat config values, e.g. {"sweep_values": [0, 1.5], "tau_stop": 100}

        Returns:
            τ* and E_max per point, boundary maxima and any violated capacity trends
        """
        return await run_tool_command("maxenergy", run_maxenergy, preset, overrides, mcp.get_context())
