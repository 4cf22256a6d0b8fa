from __future__ import annotations

import asyncio
from typing import Any, List

from mcp.types import TextContent, Tool

from ising_mcp.bifurcation import run_estimate
from ising_mcp.dynamics import AnnealSchedule, IntegratorConfig, ModelKind
from ising_mcp.harness import GraphSource, TrialSpec, run_portfolio
from ising_mcp.report import export_report
from ising_mcp.tools.common import GRAPH_PROPERTIES, error_reply, get_settings, graph_from_arguments, reply

SCHEDULE_PROPERTIES = {
    "K": {"type": "number", "description": "Coupling strength K"},
    "ks_max": {"type": "number", "description": "Final Ks of the linear ramp"},
    "t_end": {"type": "number", "description": "Total simulated time"},
    "seed": {"type": "number", "description": "Base seed (default 0)"},
}

TOOL_DEFINITIONS: List[Tool] = [
    Tool(
        name="run_portfolio",
        description=(
            "Run seeded trials of the DIM and/or OIM on a graph. Both models share the initial "
            "phases and noise of every trial. Reports best cut and success count per model."
        ),
        inputSchema={
            "type": "object",
            "properties": {
                **GRAPH_PROPERTIES,
                **SCHEDULE_PROPERTIES,
                "models": {
                    "type": "array",
                    "items": {"type": "string", "enum": ["dim", "oim"]},
                    "description": "Models to run (default both)",
                },
                "trials": {"type": "number", "description": "Trials per model"},
                "noise_amplitude": {"type": "number", "description": "Noise amplitude"},
                "out_path": {"type": "string", "description": "Optional YAML report path"},
            },
        },
    ),
    Tool(
        name="estimate_ground_state",
        description=(
            "Estimate the Ising ground energy and Max-Cut of a graph from the Ks at which the DIM "
            "leaves the pi/2 state under a ramped schedule."
        ),
        inputSchema={
            "type": "object",
            "properties": {
                **GRAPH_PROPERTIES,
                **SCHEDULE_PROPERTIES,
                "threshold": {"type": "number", "description": "Deviation threshold (default 0.006)"},
                "aggregation": {"type": "string", "enum": ["max", "mean"], "description": "Deviation aggregation"},
            },
        },
    ),
]


def _schedule(arguments: dict[str, Any]) -> AnnealSchedule:
    s = get_settings().schedule
    return AnnealSchedule.linear_ramp(K=float(arguments.get("K", s.K)),
                                      ks_max=float(arguments.get("ks_max", s.ks_max)),
                                      t_end=float(arguments.get("t_end", s.t_end)))


def _source(arguments: dict[str, Any]) -> GraphSource:
    if arguments.get("graph_path"):
        return GraphSource(path=arguments["graph_path"])
    return GraphSource(text=arguments.get("graph_text"))


async def handle(name: str, arguments: Any) -> List[TextContent] | None:
    if name == "run_portfolio":
        try:
            settings = get_settings()
            source = _source(arguments)
            g = source.load()
            integ = settings.integrator
            spec = TrialSpec(
                graph_source=source,
                models=tuple(ModelKind(m) for m in arguments.get("models", ["dim", "oim"])),
                n_trials=int(arguments.get("trials", settings.harness.trials)),
                base_seed=int(arguments.get("seed", 0)),
                schedule=_schedule(arguments),
                integrator=IntegratorConfig(
                    dt=integ.dt,
                    noise_amplitude=float(arguments.get("noise_amplitude", integ.noise_amplitude)),
                    record_stride=integ.record_stride,
                ),
                workers=settings.harness.workers,
            )
            report = await asyncio.to_thread(run_portfolio, spec, g)
            lines = [f"Portfolio on n={g.n}, m={g.m}, {spec.n_trials} trials:"]
            for model, summary in report.models.items():
                hist = ", ".join(f"H={h}: {c}" for h, c in summary.histogram.items())
                lines.append(f"  {model.value}: best cut {summary.best_cut:g} in {summary.success_count} trials ({hist})")
            lines.append(f"Portfolio best cut: {report.portfolio_best_cut:g}")
            lines.append(f"Preferred model: {report.preferred_model}")
            if arguments.get("out_path"):
                export_report(report, arguments["out_path"])
                lines.append(f"Report written to {arguments['out_path']}")
            return reply(lines)
        except Exception as e:
            return error_reply(e)

    if name == "estimate_ground_state":
        try:
            settings = get_settings()
            est = settings.estimate
            g = graph_from_arguments(arguments)
            cfg = IntegratorConfig(dt=est.dt, noise_amplitude=est.noise_amplitude,
                                   seed=int(arguments.get("seed", 0)), record_stride=est.record_stride)
            estimate, _ = await asyncio.to_thread(
                run_estimate, g, _schedule(arguments), cfg,
                float(arguments.get("threshold", est.threshold)), est.debounce,
                arguments.get("aggregation", est.aggregation),
            )
            lines = [
                f"Bifurcation at t={estimate.t_star:.6g}, Ks_E={estimate.ks_E:.6g}",
                f"Estimated H_min: {estimate.H_est}",
                f"Estimated cut: {estimate.cut_est:g}",
            ]
            if estimate.ratio_percent is not None:
                lines.append(f"Best known cut: {estimate.best_known:g} ({estimate.ratio_percent:.2f}%)")
            return reply(lines)
        except Exception as e:
            return error_reply(e)

    return None
