from __future__ import annotations

import logging
from typing import Any, List

from mcp.server import Server
from mcp.server.stdio import stdio_server
from mcp.types import TextContent, Tool

from ising_mcp.tools import ALL_TOOLS, route_tool

logger = logging.getLogger(__name__)

app = Server("ising-mcp")


@app.list_tools()
async def list_tools() -> List[Tool]:
    return ALL_TOOLS


@app.call_tool()
async def call_tool(name: str, arguments: Any) -> List[TextContent]:
    return await route_tool(name, arguments)


async def main():
    logger.info("Serving %d tools on stdio", len(ALL_TOOLS))
    async with stdio_server() as (read_stream, write_stream):
        await app.run(read_stream, write_stream, app.create_initialization_options())
