from __future__ import annotations

import asyncio
import io
from typing import Any, List

from mcp.types import TextContent, Tool

from ising_mcp.dynamics import ModelKind
from ising_mcp.graph import couplings, parse_spins
from ising_mcp.stability import graph_thresholds, selective_stabilization, stability_scan, write_scan_rows
from ising_mcp.tools.common import GRAPH_PROPERTIES, error_reply, get_settings, graph_from_arguments, reply

TOOL_DEFINITIONS: List[Tool] = [
    Tool(
        name="stability_scan",
        description=(
            "Largest Jacobian eigenvalue of every {0, pi} fixed point, grouped by Ising energy "
            "(CSV: H, lambda_min, lambda_max, count, stable_count), plus whether the ground "
            "state can be selectively stabilized."
        ),
        inputSchema={
            "type": "object",
            "properties": {
                **GRAPH_PROPERTIES,
                "model": {"type": "string", "enum": ["dim", "oim"], "description": "Model (default dim)"},
                "K": {"type": "number", "description": "Coupling strength (default 1)"},
                "Ks": {"type": "number", "description": "Second-harmonic strength"},
            },
            "required": ["Ks"],
        },
    ),
    Tool(
        name="critical_thresholds",
        description=(
            "Critical Ks values: where the pi/2 state destabilizes, where given {0, pi} "
            "configurations stabilize, and where the ground states become energetically favoured."
        ),
        inputSchema={
            "type": "object",
            "properties": {
                **GRAPH_PROPERTIES,
                "K": {"type": "number", "description": "Coupling strength (default 1)"},
                "spins": {
                    "type": "array",
                    "items": {"type": "string"},
                    "description": "Configurations as +/- strings; defaults to the exact ground states",
                },
            },
        },
    ),
]


async def handle(name: str, arguments: Any) -> List[TextContent] | None:
    if name == "stability_scan":
        try:
            settings = get_settings()
            g = graph_from_arguments(arguments)
            Ks = float(arguments["Ks"])
            rows = await asyncio.to_thread(
                stability_scan, ModelKind(arguments.get("model", "dim")), couplings(g),
                float(arguments.get("K", 1.0)), Ks, settings.oracle.n_limit, settings.harness.workers,
            )
            buf = io.StringIO()
            write_scan_rows(rows, buf)
            sel = selective_stabilization(rows, Ks)
            lines = [buf.getvalue().rstrip()]
            lines.append(f"Ground state selectively stabilizable: {'yes' if sel.selective else 'no'}")
            if sel.window:
                lines.append(f"Selective Ks window: [{sel.window[0]:.6g}, {sel.window[1]:.6g})")
            return reply(lines)
        except Exception as e:
            return error_reply(e)

    if name == "critical_thresholds":
        try:
            g = graph_from_arguments(arguments)
            configs = [parse_spins(s, g.n) for s in arguments.get("spins", [])]
            H_min, report = await asyncio.to_thread(
                graph_thresholds, g, float(arguments.get("K", 1.0)), configs, get_settings().oracle.n_limit,
            )
            lines = [f"pi/2 destabilizes above Ks = {report.ks_destabilize_halfpi:.9g}"]
            for key, value in report.ks_stabilize_zeropi.items():
                lines.append(f"{key} stabilizes above Ks = {value:.9g}")
            if report.ks_energy_crossover is not None:
                lines.append(f"H_min = {H_min:g}; ground states favoured above Ks = {report.ks_energy_crossover:.9g}")
            else:
                lines.append("Graph too large for the exact ground energy; energy crossover not computed")
            return reply(lines)
        except Exception as e:
            return error_reply(e)

    return None
