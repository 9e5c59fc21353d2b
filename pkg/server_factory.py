"""
Saturable Battery MCP Server Factory

Factory function to create and configure the MCP server.
This separates server creation from the main entry point to avoid circular imports.
"""

import logging
from typing import Optional

from mcp.server.fastmcp import FastMCP

from core.config import BatterySettings
from core.lifespan import battery_lifespan
from tools.spectrum_tools import register_spectrum_tools
from tools.charge_tools import register_charge_tools
from tools.maxenergy_tools import register_maxenergy_tools
from tools.wigner_tools import register_wigner_tools
from tools.steady_tools import register_steady_tools
from tools.check_tools import register_check_tools

logger = logging.getLogger(__name__)


def create_battery_server(settings: Optional[BatterySettings] = None) -> FastMCP:
    """
    Create and configure the saturable battery MCP server.

    Args:
        settings: Process settings; read from the environment when omitted

    Returns:
        FastMCP: Configured server with all tools registered
    """
    settings = settings or BatterySettings()
    mcp = FastMCP(
        name="SaturableBattery",
        lifespan=battery_lifespan,
        host=settings.host,
        port=settings.port,
        dependencies=[
            "numpy>=1.26",
            "scipy>=1.11",
            "pydantic-settings>=2.0",
            "python-dotenv>=1.0.0",
        ]
    )

    register_spectrum_tools(mcp)
    register_charge_tools(mcp)
    register_maxenergy_tools(mcp)
    register_wigner_tools(mcp)
    register_steady_tools(mcp)
    register_check_tools(mcp)

    logger.info("All battery tools registered successfully")

    return mcp


def get_registered_tools(mcp_server: FastMCP) -> list[str]:
    """
    Get list of all registered tool names.

    Args:
        mcp_server: The configured MCP server

    Returns:
        List of tool names
    """
    return sorted(tool.name for tool in mcp_server._tool_manager.list_tools())
