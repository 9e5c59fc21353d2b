"""
Saturable Battery Simulator - Spectrum Tools

Level energies E_n = ωn + χn/(1 + n n_s) over an n_s grid, optionally next to the
Kerr expansion, showing how the ladder densifies as n_s grows.
"""

import logging
from typing import Any, Dict, Optional

from mcp.server.fastmcp import FastMCP

from core.config import RunConfig
from core.model import spectrum_table
from tools.common import CommandReport, run_tool_command
from utils.formatters import write_table

logger = logging.getLogger(__name__)

DENSITY_WINDOW = 25.0


def run_spectrum(config: RunConfig) -> CommandReport:
    """Write spectrum.csv with one block of levels n = 0..spectrum_levels−1 per n_s."""
    header = ["n_s", "n", "E_n"] + (["E_n_kerr"] if config.include_kerr else [])
    rows, summary_rows = [], []
    for coords, p in config.sweep_points():
        table = spectrum_table(p.with_updates(dim=config.spectrum_levels), include_kerr=config.include_kerr)
        for k, n in enumerate(table.n):
            row = [p.n_s, int(n), table.energies[k]]
            if table.kerr_energies is not None:
                row.append(table.kerr_energies[k])
            rows.append(row)
        summary_rows.append({"n_s": p.n_s, "levels_below": table.levels_below(DENSITY_WINDOW)})

    report = CommandReport(command="spectrum", rows=summary_rows)
    report.files = write_table(config.outputs / "spectrum", header, rows, config.resolved(), config.format)
    report.summary = {"levels": config.spectrum_levels, "n_s points": len(summary_rows),
                      "energy window": DENSITY_WINDOW}
    return report


def register_spectrum_tools(mcp: FastMCP):
    """Register the spectrum tool with the MCP server."""

    @mcp.tool()
    async def spectrum(preset: Optional[str] = None, overrides: Optional[Dict[str, Any]] = None) -> str:
        """
        Tabulate battery level energies E_n over a grid of saturable parameters n_s.

        Args:
            preset: Figure preset ('fig1' reproduces the level-densification plot)
            overrides: Flat config values, e.g. {"sweep_values": [0, 1, 2], "include_kerr": true}

        Returns:
            Files written and the number of levels below E = 25 for each n_s
        """
        return await run_tool_command("spectrum", run_spectrum, preset, overrides, mcp.get_context())
