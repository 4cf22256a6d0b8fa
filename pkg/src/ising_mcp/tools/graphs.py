from __future__ import annotations

import asyncio
from typing import Any, List

from mcp.types import TextContent, Tool

from ising_mcp.graph import couplings, format_spins, generate_random_graph, render_graph, write_graph
from ising_mcp.oracle import exact_ground_state
from ising_mcp.tools.common import GRAPH_PROPERTIES, error_reply, get_settings, graph_from_arguments, reply

TOOL_DEFINITIONS: List[Tool] = [
    Tool(
        name="generate_graph",
        description=(
            "Generate a seeded random graph with exactly the requested number of distinct edges. "
            "Returns the graph as rudy text; also writes it when out_path is given."
        ),
        inputSchema={
            "type": "object",
            "properties": {
                "nodes": {"type": "number", "description": "Node count"},
                "edges": {"type": "number", "description": "Edge count"},
                "seed": {"type": "number", "description": "Generator seed (default 0)"},
                "weight": {"type": "number", "description": "Weight on every edge (default 1)"},
                "out_path": {"type": "string", "description": "Optional file to write"},
            },
            "required": ["nodes", "edges"],
        },
    ),
    Tool(
        name="exact_ground_state",
        description=(
            "Exact Ising ground state and Max-Cut of a small graph by exhaustive enumeration. "
            "Refuses graphs above the configured node limit unless force is set."
        ),
        inputSchema={
            "type": "object",
            "properties": {
                **GRAPH_PROPERTIES,
                "force": {"type": "boolean", "description": "Enumerate beyond the node limit"},
                "max_minimizers": {"type": "number", "description": "How many minimizers to list (default 10)"},
            },
        },
    ),
]


async def handle(name: str, arguments: Any) -> List[TextContent] | None:
    if name == "generate_graph":
        try:
            g = generate_random_graph(int(arguments["nodes"]), int(arguments["edges"]),
                                      float(arguments.get("weight", 1.0)), int(arguments.get("seed", 0)))
            text = render_graph(g)
            if arguments.get("out_path"):
                write_graph(g, arguments["out_path"])
                return reply([f"Wrote {g.name} (n={g.n}, m={g.m}) to {arguments['out_path']}", text])
            return reply(text)
        except Exception as e:
            return error_reply(e)

    if name == "exact_ground_state":
        try:
            g = graph_from_arguments(arguments)
            settings = get_settings()
            result = await asyncio.to_thread(
                exact_ground_state, couplings(g), settings.oracle.n_limit,
                graph=g, force=bool(arguments.get("force", False)), workers=settings.harness.workers,
            )
            shown = int(arguments.get("max_minimizers", 10))
            lines = [
                f"Graph: n={g.n}, m={g.m}",
                f"H_min: {result.H_min:g}",
                f"Optimal cut: {result.optimal_cut:g}",
                f"Degeneracy (flip pairs): {result.degeneracy}",
                "Minimizers (spin 0 fixed to +):",
            ]
            lines.extend("  " + format_spins(s) for s in result.minimizers[:shown])
            if result.degeneracy > shown:
                lines.append(f"  ... {result.degeneracy - shown} more")
            return reply(lines)
        except Exception as e:
            return error_reply(e)

    return None
