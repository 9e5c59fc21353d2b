"""
Saturable Battery Simulator - Application Lifecycle Management

Handles MCP server startup/shutdown and the shared run settings.
"""

import logging
from contextlib import asynccontextmanager
from collections.abc import AsyncIterator
from dataclasses import dataclass
from pathlib import Path

from mcp.server.fastmcp import Context, FastMCP

from core.config import BatterySettings

logger = logging.getLogger(__name__)


@dataclass
class BatteryContext:
    """Application context shared by the battery tools."""
    settings: BatterySettings
    output_dir: Path
    jobs: int

    @classmethod
    def from_settings(cls, settings: BatterySettings) -> "BatteryContext":
        return cls(settings=settings, output_dir=Path(settings.output_dir), jobs=settings.resolved_jobs())


def get_battery_context(ctx: Context = None) -> BatteryContext:
    """Lifespan context of the running server, or a fresh one outside a request."""
    if ctx is not None:
        try:
            return ctx.request_context.lifespan_context
        except (ValueError, AttributeError, LookupError):
            pass
    return BatteryContext.from_settings(BatterySettings())


@asynccontextmanager
async def battery_lifespan(server: FastMCP) -> AsyncIterator[BatteryContext]:
    """
    Manage the lifecycle of the battery MCP server.

    Reads settings and prepares the output directory on startup.
    """
    logger.info("Starting Saturable Battery MCP Server...")

    settings = BatterySettings()
    context = BatteryContext.from_settings(settings)
    context.output_dir.mkdir(parents=True, exist_ok=True)
    logger.info(f"Battery MCP Server initialized: output_dir={context.output_dir}, jobs={context.jobs}")

    try:
        yield context
    except Exception as e:
        logger.error(f"Error in Battery MCP Server context: {e}")
        raise
    finally:
        logger.info("Battery MCP Server shutting down...")
