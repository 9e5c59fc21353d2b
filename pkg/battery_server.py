#!/usr/bin/env python3
"""
Saturable Battery MCP Server - Main Entry Point

A Model Context Protocol server exposing the saturable quantum battery simulator:
level spectra, charging runs, maximum energy, Wigner snapshots, steady states and
self-checks.
"""

import logging
import sys

from dotenv import load_dotenv

from core.config import BatterySettings

load_dotenv()
settings = BatterySettings()

logging.basicConfig(
    level=getattr(logging, settings.log_level.upper(), logging.INFO),
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
    handlers=[
        logging.StreamHandler(),
        logging.FileHandler(settings.log_file) if settings.log_file else logging.NullHandler()
    ]
)
logger = logging.getLogger(__name__)

# Import the server factory to avoid circular imports
from server_factory import create_battery_server, get_registered_tools

# Create the MCP server using the factory
mcp = create_battery_server(settings)


def main():
    """
    Main entry point for the saturable battery MCP server.

    Transport is chosen by BATTERY_TRANSPORT: stdio (default), sse or streamable-http.
    """
    transport = settings.transport

    logger.info(f"Starting Saturable Battery MCP Server with {transport} transport...")
    logger.info(f"Available tools: {', '.join(get_registered_tools(mcp))}")

    try:
        if transport == 'stdio':
            mcp.run()
        else:
            logger.info(f"Listening on {settings.host}:{settings.port}")
            mcp.run(transport=transport)
    except KeyboardInterrupt:
        logger.info("Saturable Battery MCP Server stopped by user")
    except Exception as e:
        logger.error(f"Saturable Battery MCP Server error: {e}")
        sys.exit(1)


if __name__ == "__main__":
    main()
