"""Command-line interface: solve, estimate, scan, oracle, gen, thresholds, replay, serve."""

from __future__ import annotations

import argparse
import asyncio
import logging
import sys
from pathlib import Path
from typing import Sequence

from ising_mcp.bifurcation import AGGREGATIONS, run_estimate
from ising_mcp.config import Settings, configure_logging, load_settings
from ising_mcp.dynamics import AnnealSchedule, IntegratorConfig, ModelKind, write_trajectory_csv
from ising_mcp.errors import INPUT_ERRORS, NUMERICAL_ERRORS, IsingError, NoBifurcationError
from ising_mcp.graph import couplings, format_spins, generate_random_graph, parse_spins, read_graph, render_graph, write_graph
from ising_mcp.harness import GraphSource, PortfolioReport, TrialSpec, run_portfolio
from ising_mcp.oracle import exact_ground_state
from ising_mcp.report import export_estimate, export_report, replay
from ising_mcp.stability import graph_thresholds, stability_scan, write_scan_csv, write_scan_rows

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NUMERICAL = 3
EXIT_NO_BIFURCATION = 4

MODEL_CHOICES = {
    "dim": (ModelKind.DIM,),
    "oim": (ModelKind.OIM,),
    "both": (ModelKind.DIM, ModelKind.OIM),
}


def _add_dynamics_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--graph", required=True, help="rudy graph file")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--k", dest="K", type=float, help="coupling strength K")
    p.add_argument("--ks-max", type=float)
    p.add_argument("--t-end", type=float)
    p.add_argument("--dt", type=float)
    p.add_argument("--noise", type=float, help="noise amplitude")
    p.add_argument("--stride", type=int, help="record every Nth step")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ising-mcp", description="OIM/DIM dynamical Ising machine toolkit")
    parser.add_argument("--config", help="settings file (default: $ISING_MCP_CONFIG or ./config.yaml)")
    parser.add_argument("--log-level", help="override logging.level")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="run a seeded DIM/OIM portfolio")
    _add_dynamics_options(p)
    p.add_argument("--model", choices=sorted(MODEL_CHOICES), default="both")
    p.add_argument("--trials", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--out", help="write the YAML report here")

    p = sub.add_parser("estimate", help="estimate the ground energy from the DIM bifurcation")
    _add_dynamics_options(p)
    p.add_argument("--threshold", type=float)
    p.add_argument("--debounce", type=int)
    p.add_argument("--aggregation", choices=AGGREGATIONS)
    p.add_argument("--out", help="write the YAML estimate report here")
    p.add_argument("--trace", help="write the trajectory CSV here")

    p = sub.add_parser("scan", help="lambda_L per Ising energy over every {0, pi} configuration")
    p.add_argument("--graph", required=True)
    p.add_argument("--model", choices=["dim", "oim"], default="dim")
    p.add_argument("--k", dest="K", type=float, default=1.0)
    p.add_argument("--ks", type=float, required=True)
    p.add_argument("--limit", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--out", help="write the CSV here instead of stdout")

    p = sub.add_parser("oracle", help="exact ground state by enumeration")
    p.add_argument("--graph", required=True)
    p.add_argument("--limit", type=int)
    p.add_argument("--force", action="store_true", help="enumerate beyond --limit")
    p.add_argument("--workers", type=int)

    p = sub.add_parser("gen", help="seeded random graph with a fixed edge count")
    p.add_argument("--nodes", type=int, required=True)
    p.add_argument("--edges", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--weight", type=float, default=1.0)
    p.add_argument("--out", help="rudy output file (default: stdout)")

    p = sub.add_parser("thresholds", help="critical Ks values for a graph")
    p.add_argument("--graph", required=True)
    p.add_argument("--k", dest="K", type=float, default=1.0)
    p.add_argument("--spins", action="append", default=[],
                   help="{0, pi} configuration as a +/- string; repeatable")
    p.add_argument("--limit", type=int)

    p = sub.add_parser("replay", help="rerun the portfolio recorded in a report")
    p.add_argument("--report", required=True)
    p.add_argument("--workers", type=int)
    p.add_argument("--out")

    sub.add_parser("serve", help="run the MCP server on stdio")
    return parser


def _pick(value, default):
    return default if value is None else value


def _schedule(args: argparse.Namespace, settings: Settings) -> AnnealSchedule:
    s = settings.schedule
    return AnnealSchedule.linear_ramp(K=_pick(args.K, s.K), ks_max=_pick(args.ks_max, s.ks_max),
                                      t_end=_pick(args.t_end, s.t_end))


def _print_portfolio(report: PortfolioReport) -> None:
    print(f"graph: n={report.manifest['graph']['n']} m={report.manifest['graph']['m']}")
    print(f"{'model':<6} {'best_cut':>10} {'#':>5}")
    for model, summary in report.models.items():
        print(f"{model.value:<6} {summary.best_cut:>10g} {summary.success_count:>5}")
    print(f"portfolio best_cut: {report.portfolio_best_cut:g}")
    print(f"preferred_model: {report.preferred_model}")


def cmd_solve(args: argparse.Namespace, settings: Settings) -> int:
    integ = settings.integrator
    spec = TrialSpec(
        graph_source=GraphSource(path=args.graph),
        models=MODEL_CHOICES[args.model],
        n_trials=_pick(args.trials, settings.harness.trials),
        base_seed=args.seed,
        schedule=_schedule(args, settings),
        integrator=IntegratorConfig(dt=_pick(args.dt, integ.dt), noise_amplitude=_pick(args.noise, integ.noise_amplitude),
                                    record_stride=_pick(args.stride, integ.record_stride)),
        workers=_pick(args.workers, settings.harness.workers),
    )
    report = run_portfolio(spec)
    _print_portfolio(report)
    if args.out:
        export_report(report, args.out)
    return EXIT_OK


def cmd_estimate(args: argparse.Namespace, settings: Settings) -> int:
    est = settings.estimate
    g = read_graph(args.graph)
    schedule = _schedule(args, settings)
    cfg = IntegratorConfig(dt=_pick(args.dt, est.dt), noise_amplitude=_pick(args.noise, est.noise_amplitude),
                           seed=args.seed, record_stride=_pick(args.stride, est.record_stride))
    estimate, traj = run_estimate(
        g, schedule, cfg,
        threshold=_pick(args.threshold, est.threshold),
        debounce=_pick(args.debounce, est.debounce),
        aggregation=_pick(args.aggregation, est.aggregation),
    )
    if args.trace:
        write_trajectory_csv(traj, args.trace)
    print(f"t_star: {estimate.t_star:.6g}")
    print(f"ks_E: {estimate.ks_E:.6g}")
    print(f"H_est: {estimate.H_est}")
    print(f"cut_est: {estimate.cut_est:g}")
    if estimate.ratio_percent is not None:
        print(f"best_known: {estimate.best_known:g} ({estimate.ratio_percent:.2f}%)")
    if args.out:
        manifest = {
            "graph": {"path": args.graph, "n": g.n, "m": g.m, "digest": g.digest},
            "seed": args.seed,
            "schedule": schedule.to_dict(),
            "integrator": {"dt": cfg.dt, "noise_amplitude": cfg.noise_amplitude, "record_stride": cfg.record_stride},
        }
        export_estimate(estimate, manifest, args.out)
    return EXIT_OK


def cmd_scan(args: argparse.Namespace, settings: Settings) -> int:
    g = read_graph(args.graph)
    rows = stability_scan(ModelKind(args.model), couplings(g), args.K, args.ks,
                          n_limit=_pick(args.limit, settings.oracle.n_limit),
                          workers=_pick(args.workers, settings.harness.workers))
    if args.out:
        write_scan_csv(rows, args.out)
    else:
        write_scan_rows(rows, sys.stdout)
    return EXIT_OK


def cmd_oracle(args: argparse.Namespace, settings: Settings) -> int:
    g = read_graph(args.graph)
    result = exact_ground_state(couplings(g), _pick(args.limit, settings.oracle.n_limit), graph=g,
                                force=args.force, workers=_pick(args.workers, settings.harness.workers))
    print(f"H_min: {result.H_min:g}")
    print(f"optimal_cut: {result.optimal_cut:g}")
    print(f"degeneracy: {result.degeneracy}")
    for s in result.minimizers:
        print(format_spins(s))
    return EXIT_OK


def cmd_gen(args: argparse.Namespace, settings: Settings) -> int:
    g = generate_random_graph(args.nodes, args.edges, args.weight, args.seed)
    if args.out:
        write_graph(g, args.out)
        logger.info("Wrote %s (n=%d, m=%d)", args.out, g.n, g.m)
    else:
        sys.stdout.write(render_graph(g))
    return EXIT_OK


def cmd_thresholds(args: argparse.Namespace, settings: Settings) -> int:
    g = read_graph(args.graph)
    configs = [parse_spins(s, g.n) for s in args.spins]
    H_min, report = graph_thresholds(g, args.K, configs, n_limit=_pick(args.limit, settings.oracle.n_limit))
    print(f"ks_destabilize_halfpi: {report.ks_destabilize_halfpi:.9g}")
    for key, value in report.ks_stabilize_zeropi.items():
        print(f"ks_stabilize_zeropi[{key}]: {value:.9g}")
    if report.ks_energy_crossover is not None:
        print(f"H_min: {H_min:g}")
        print(f"ks_energy_crossover: {report.ks_energy_crossover:.9g}")
    return EXIT_OK


def cmd_replay(args: argparse.Namespace, settings: Settings) -> int:
    report = replay(args.report, workers=_pick(args.workers, settings.harness.workers))
    _print_portfolio(report)
    if args.out:
        export_report(report, args.out)
    return EXIT_OK


def cmd_serve(args: argparse.Namespace, settings: Settings) -> int:
    from ising_mcp import server

    asyncio.run(server.main())
    return EXIT_OK


COMMANDS = {
    "solve": cmd_solve,
    "estimate": cmd_estimate,
    "scan": cmd_scan,
    "oracle": cmd_oracle,
    "gen": cmd_gen,
    "thresholds": cmd_thresholds,
    "replay": cmd_replay,
    "serve": cmd_serve,
}


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        settings = load_settings(Path(args.config) if args.config else None)
        configure_logging(args.log_level or settings.logging.level)
        return COMMANDS[args.command](args, settings)
    except NoBifurcationError as e:
        logger.error("%s", e)
        return EXIT_NO_BIFURCATION
    except NUMERICAL_ERRORS as e:
        logger.error("%s: %s", type(e).__name__, e)
        return EXIT_NUMERICAL
    except (*INPUT_ERRORS, IsingError, OSError) as e:
        logger.error("%s: %s", type(e).__name__, e)
        return EXIT_INPUT
