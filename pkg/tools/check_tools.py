"""
Saturable Battery Simulator - Validation Tools

Self-checks for one configuration, written to check_report.json:

- truncation: energy trajectories at dim and dim + check_dim_step agree
- integrators: the RK45 and exact-propagator paths give the same states
- first and second Taylor terms from |0⟩⟨0| match their closed forms
- the truncated Taylor series converges with the expected order

A failed check is report content, not an error.
"""

import logging
from typing import Any, Callable, Dict, List, Optional

import numpy as np
from mcp.server.fastmcp import FastMCP

from core.config import RunConfig
from core.dynamics import (
    build_liouvillian,
    eq9_reference,
    eq10_reference,
    propagate,
    short_time_check,
    taylor_term,
)
from core.errors import BatteryError
from core.model import ModelParams
from core.observables import trace_distance
from core.states import DensityMatrix
from tools.charge_tools import charge_trajectory
from tools.common import CommandReport, run_tool_command
from utils.formatters import write_document

logger = logging.getLogger(__name__)

TRUNCATION_TOL = 1e-6
INTEGRATOR_TOL = 1e-8
TAYLOR_EXACT_TOL = 1e-12
INTEGRATOR_SAMPLES = 10
TAYLOR_TAU0 = 0.05
TAYLOR_HALVINGS = 4
SCALING_WINDOWS = {1: (1.8, 2.2), 2: (2.8, 3.2)}


def _check(name: str, passed: Optional[bool], value: Any = None, threshold: Any = None,
           detail: str = "") -> Dict[str, Any]:
    return {"name": name, "passed": passed, "value": value, "threshold": threshold, "detail": detail}


def check_truncation(p: ModelParams, config: RunConfig) -> Dict[str, Any]:
    grid = config.tau_grid()
    small = charge_trajectory(p, grid, config.rtol, config.atol, config.integrator)
    large = charge_trajectory(p.with_updates(dim=p.dim + config.check_dim_step), grid,
                              config.rtol, config.atol, config.integrator)
    delta = float(np.max(np.abs(large.energy - small.energy)))
    return _check("truncation", delta <= TRUNCATION_TOL, delta, TRUNCATION_TOL,
                  f"max |E_N − E_(N+{config.check_dim_step})| with N = {p.dim}")


def check_integrators(p: ModelParams, config: RunConfig) -> Dict[str, Any]:
    grid = config.tau_grid()
    samples = np.unique(np.linspace(grid[0], grid[-1], INTEGRATOR_SAMPLES))
    L = build_liouvillian(p)
    rho0 = DensityMatrix.ground(p.dim)
    rk = propagate(L, rho0, samples, tol=min(config.rtol, 1e-10), atol=min(config.atol, 1e-13), method="rk45")
    exact = propagate(L, rho0, samples, method="expm")
    worst = max(trace_distance(a, b) for a, b in zip(rk, exact))
    return _check("integrators", worst <= INTEGRATOR_TOL, worst, INTEGRATOR_TOL,
                  f"max trace distance RK45 vs expm at {samples.size} times")


def check_first_order(p: ModelParams, config: RunConfig) -> Dict[str, Any]:
    L = build_liouvillian(p)
    diff = float(np.max(np.abs(taylor_term(L, DensityMatrix.ground(p.dim), 1) - eq9_reference(p))))
    return _check("taylor_first_order", diff <= TAYLOR_EXACT_TOL, diff, TAYLOR_EXACT_TOL,
                  "𝓛ρ(0) against iα(|0⟩⟨1| − |1⟩⟨0|)")


def check_second_order(p: ModelParams, config: RunConfig) -> Dict[str, Any]:
    if p.dim < 3:
        return _check("taylor_second_order", None, detail=f"skipped: needs dim ≥ 3, got {p.dim}")
    L = build_liouvillian(p)
    diff = float(np.max(np.abs(taylor_term(L, DensityMatrix.ground(p.dim), 2) - eq10_reference(p))))
    return _check("taylor_second_order", diff <= TAYLOR_EXACT_TOL, diff, TAYLOR_EXACT_TOL,
                  "𝓛²ρ(0) against its five-term closed form")


def taylor_scaling_exponent(p: ModelParams, order: int) -> Optional[float]:
    """Slope of log residual against log τ over successive halvings of τ; None if the residuals vanish."""
    scale = max(1.0, abs(p.alpha), p.gamma, abs(p.detuning) + abs(p.chi))
    taus = (TAYLOR_TAU0 / scale) * 2.0 ** -np.arange(TAYLOR_HALVINGS)
    L = build_liouvillian(p)
    rho0 = DensityMatrix.ground(p.dim)
    residuals = np.array([short_time_check(L, rho0, order, float(t)) for t in taus])
    if np.any(residuals <= 0):
        return None
    return float(np.polyfit(np.log(taus), np.log(residuals), 1)[0])


def _scaling_check(order: int) -> Callable[[ModelParams, RunConfig], Dict[str, Any]]:
    def run(p: ModelParams, config: RunConfig) -> Dict[str, Any]:
        low, high = SCALING_WINDOWS[order]
        exponent = taylor_scaling_exponent(p, order)
        name = f"taylor_order{order}_scaling"
        if exponent is None:
            return _check(name, None, detail="skipped: residuals vanish (stationary initial state)")
        return _check(name, low <= exponent <= high, exponent, [low, high],
                      f"residual of the order-{order} series ∝ τ^k")
    run.__name__ = f"taylor_order{order}_scaling"
    return run


CHECKS = [
    check_truncation,
    check_integrators,
    check_first_order,
    check_second_order,
    _scaling_check(1),
    _scaling_check(2),
]


def run_checks(p: ModelParams, config: RunConfig) -> List[Dict[str, Any]]:
    results = []
    for check in CHECKS:
        try:
            outcome = check(p, config)
        except BatteryError as e:
            logger.error(f"Check {check.__name__} raised {type(e).__name__}: {e}", exc_info=True)
            outcome = _check(check.__name__, False, detail=f"{type(e).__name__}: {e}")
        status = {True: "✅", False: "❌", None: "⏭️"}[outcome["passed"]]
        logger.info(f"{status} {outcome['name']}: {outcome['value']}")
        results.append(outcome)
    return results


def run_check(config: RunConfig) -> CommandReport:
    p = config.params
    results = run_checks(p, config)
    failed = [r["name"] for r in results if r["passed"] is False]
    document = {"params": p.model_dump(), "checks": results, "passed": not failed}

    report = CommandReport(command="check", rows=[
        {"check": r["name"], "passed": r["passed"], "value": r["value"]} for r in results
    ])
    report.files = write_document(config.outputs / "check_report.json", document, config.resolved())
    report.summary = {"checks": len(results), "failed": len(failed),
                      "skipped": sum(r["passed"] is None for r in results)}
    if failed:
        logger.warning(f"⚠️ Failed checks: {', '.join(failed)}")
    return report


def register_check_tools(mcp: FastMCP):
    """Register the validation tool with the MCP server."""

    @mcp.tool()
    async def check(preset: Optional[str] = None, overrides: Optional[Dict[str, Any]] = None) -> str:
        """
        Validate truncation, integrators and the short-time Taylor expansion for one parameter point.

        Args:
            preset: Figure preset whose parameters are checked (e.g. 'fig2')
            overrides: Flat config values, e.g. {"dim": 30, "check_dim_step": 10, "tau_stop": 50}

        Returns:
            Pass/fail per check with measured values, and the report file
        """
        return await run_tool_command("check", run_check, preset, overrides, mcp.get_context())
