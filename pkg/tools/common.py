"""
Saturable Battery Simulator - Shared Command Plumbing

CommandReport is what every `run_<command>` returns; run_tool_command is the common
body of the MCP tools.
"""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional

import anyio
from mcp.server.fastmcp import Context

from core.config import RunConfig, build_run_config
from core.errors import BatteryError
from core.lifespan import get_battery_context
from tools.sweep import SweepResult
from utils.formatters import format_command_report
from utils.mappings import get_exit_code_display

logger = logging.getLogger(__name__)


@dataclass
class CommandReport:
    command: str
    files: List[Path] = field(default_factory=list)
    failures: List[Dict[str, Any]] = field(default_factory=list)
    exit_code: int = 0
    summary: Dict[str, Any] = field(default_factory=dict)
    rows: List[Dict[str, Any]] = field(default_factory=list)

    @classmethod
    def from_sweep(cls, command: str, sweep: SweepResult) -> "CommandReport":
        return cls(command=command, failures=[o.failure_record() for o in sweep.failed],
                   exit_code=sweep.exit_code)


def resolved_jobs(config: RunConfig) -> int:
    if config.jobs:
        return config.jobs
    return get_battery_context().jobs


def coord_columns(coords: Dict[str, Any]) -> List[str]:
    """Coordinate columns of a sweep table: n_s and gamma first, then any other swept field."""
    return ["n_s", "gamma"] + [k for k in coords if k not in ("n_s", "gamma")]


async def run_tool_command(
    name: str,
    runner: Callable[[RunConfig], CommandReport],
    preset: Optional[str],
    overrides: Optional[Dict[str, Any]],
    ctx: Optional[Context] = None,
) -> str:
    """Resolve a config from preset + overrides, run the command off the event loop, format the report."""
    battery_ctx = get_battery_context(ctx)
    try:
        values = dict(overrides or {})
        values.setdefault("outputs", str(battery_ctx.output_dir / name))
        values.setdefault("jobs", battery_ctx.jobs)
        config = build_run_config(overrides=values, preset=preset)
        logger.info(f"Running {name} (preset={preset}) into {config.outputs}")
        report = await anyio.to_thread.run_sync(runner, config)
        return format_command_report(report)
    except BatteryError as e:
        logger.error(f"Error running {name}: {e}")
        return f"Error running {name}: {str(e)}\n\nDetails: {type(e).__name__} ({get_exit_code_display(e.exit_code)})"
    except Exception as e:
        logger.error(f"Error running {name}: {e}", exc_info=True)
        return f"Error running {name}: {str(e)}\n\nDetails: {type(e).__name__}"
