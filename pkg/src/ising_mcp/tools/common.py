from __future__ import annotations

from functools import lru_cache
from typing import Any, List

from mcp.types import TextContent

from ising_mcp.config import Settings, load_settings
from ising_mcp.errors import IsingError
from ising_mcp.graph import Graph, parse_graph, read_graph

GRAPH_PROPERTIES = {
    "graph_path": {"type": "string", "description": "Path to a rudy graph file (header 'N M', then 'i j w' lines)"},
    "graph_text": {"type": "string", "description": "Inline rudy graph text, used when graph_path is not given"},
    "graph_name": {
        "type": "string",
        "description": "Name for graph_text; a G-set name (G1..G5) of matching size enables the best-known comparison",
    },
}


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    return load_settings()


def graph_from_arguments(arguments: dict[str, Any]) -> Graph:
    if arguments.get("graph_path"):
        return read_graph(arguments["graph_path"])
    if arguments.get("graph_text"):
        return parse_graph(arguments["graph_text"], name=arguments.get("graph_name"))
    raise IsingError("either graph_path or graph_text is required")


def reply(lines: List[str] | str) -> List[TextContent]:
    text = lines if isinstance(lines, str) else "\n".join(lines)
    return [TextContent(type="text", text=text)]


def error_reply(e: Exception) -> List[TextContent]:
    return reply(f"Error: {type(e).__name__}: {e}")
