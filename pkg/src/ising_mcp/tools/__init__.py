from __future__ import annotations

from typing import Any, List

from mcp.types import TextContent, Tool

from ising_mcp.tools import graphs, solver, stability

ALL_TOOLS: List[Tool] = (
    graphs.TOOL_DEFINITIONS
    + solver.TOOL_DEFINITIONS
    + stability.TOOL_DEFINITIONS
)

_MODULES = [graphs, solver, stability]


async def route_tool(name: str, arguments: Any) -> List[TextContent]:
    for module in _MODULES:
        result = await module.handle(name, arguments or {})
        if result is not None:
            return result
    raise ValueError(f"Unknown tool: {name}")
