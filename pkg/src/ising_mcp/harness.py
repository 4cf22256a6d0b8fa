"""Portfolio runs: many seeded trials of each model from shared initial conditions."""

from __future__ import annotations

import hashlib
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from ising_mcp import __version__
from ising_mcp.dynamics import (AnnealSchedule, IntegratorConfig, ModelKind, integrate, random_phases,
                                round_to_spins)
from ising_mcp.errors import IntegrationError, IsingError, ModelAbsentError, TrialError
from ising_mcp.graph import (Graph, couplings, cut_of_spins, generate_random_graph, ising_energy, parse_graph,
                             read_graph)

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1
INIT_STREAM = 0
NOISE_STREAM = 1


@dataclass(frozen=True)
class GraphSource:
    """Where a trial graph comes from: a rudy file, inline rudy text or the seeded generator."""

    path: str | None = None
    text: str | None = None
    nodes: int | None = None
    edges: int | None = None
    weight: float = 1.0
    seed: int = 0

    def __post_init__(self):
        given = sum(x is not None for x in (self.path, self.text, self.nodes))
        if given != 1:
            raise IsingError("graph source needs exactly one of a path, inline text or generator parameters")

    def load(self) -> Graph:
        if self.path is not None:
            return read_graph(self.path)
        if self.text is not None:
            return parse_graph(self.text)
        return generate_random_graph(self.nodes, self.edges or 0, self.weight, self.seed)

    def to_dict(self) -> dict[str, Any]:
        if self.path is not None:
            return {"path": self.path}
        if self.text is not None:
            return {"text": self.text}
        return {"nodes": self.nodes, "edges": self.edges, "weight": self.weight, "seed": self.seed}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> GraphSource:
        if "path" in data:
            return cls(path=str(data["path"]))
        if "text" in data:
            return cls(text=str(data["text"]))
        return cls(nodes=int(data["nodes"]), edges=int(data["edges"]),
                   weight=float(data.get("weight", 1.0)), seed=int(data.get("seed", 0)))


@dataclass(frozen=True)
class TrialSpec:
    graph_source: GraphSource
    models: tuple[ModelKind, ...]
    n_trials: int
    base_seed: int
    schedule: AnnealSchedule
    integrator: IntegratorConfig = field(default_factory=IntegratorConfig)
    workers: int = 1

    def __post_init__(self):
        if self.n_trials < 1:
            raise IsingError(f"n_trials must be >= 1, got {self.n_trials}")
        if not self.models:
            raise IsingError("at least one model is required")
        object.__setattr__(self, "models", tuple(ModelKind(m) for m in self.models))


@dataclass(frozen=True)
class TrialRecord:
    trial_id: int
    H: float
    cut: float
    spin_hash: str
    initial_digest: str


@dataclass(frozen=True)
class ModelSummary:
    model: ModelKind
    trials: tuple[TrialRecord, ...]

    @property
    def best_cut(self) -> float:
        return max(r.cut for r in self.trials)

    @property
    def success_count(self) -> int:
        best = self.best_cut
        return sum(1 for r in self.trials if r.cut == best)

    @property
    def histogram(self) -> dict[float, int]:
        counts: dict[float, int] = {}
        for r in self.trials:
            key = energy_key(r.H)
            counts[key] = counts.get(key, 0) + 1
        return dict(sorted(counts.items()))


@dataclass(frozen=True)
class PortfolioReport:
    manifest: dict[str, Any]
    models: dict[ModelKind, ModelSummary]
    metadata: dict[str, Any] = field(default_factory=dict, compare=False)

    @property
    def portfolio_best_cut(self) -> float:
        return max(s.best_cut for s in self.models.values())

    @property
    def preferred_model(self) -> str:
        """Model with more trials at the portfolio best, or 'tie'."""
        best = self.portfolio_best_cut
        counts = {m: sum(1 for r in s.trials if r.cut == best) for m, s in self.models.items()}
        top = max(counts.values())
        leaders = [m for m, c in counts.items() if c == top]
        return leaders[0].value if len(leaders) == 1 else "tie"


def energy_key(H: float) -> float:
    """Histogram key: the exact integer for integral energies, else H to 9 decimals."""
    return int(H) if float(H).is_integer() else round(H, 9)


def trial_seed(base_seed: int, trial_id: int, stream: int) -> int:
    """Stable per-trial seed: numpy SeedSequence over (base_seed, trial_id, stream)."""
    return int(np.random.SeedSequence([base_seed, trial_id, stream]).generate_state(1)[0])


def canonical_spin_hash(spins: np.ndarray) -> str:
    """Hash that identifies a spin configuration up to a global flip."""
    canonical = spins if spins[0] > 0 else -spins
    return hashlib.sha256(np.asarray(canonical, dtype=np.int8).tobytes()).hexdigest()[:16]


def _run_trial(args: tuple) -> list[TrialRecord]:
    g, models, schedule, integrator, base_seed, trial_id = args
    J = couplings(g)
    phi0 = random_phases(g.n, np.random.default_rng(trial_seed(base_seed, trial_id, INIT_STREAM)))
    initial_digest = hashlib.sha256(phi0.tobytes()).hexdigest()[:16]
    cfg = IntegratorConfig(dt=integrator.dt, noise_amplitude=integrator.noise_amplitude,
                           seed=trial_seed(base_seed, trial_id, NOISE_STREAM),
                           record_stride=integrator.record_stride)
    records = []
    for model in models:
        try:
            traj = integrate(model, J, phi0, schedule, cfg)
        except IntegrationError as exc:
            raise TrialError(model.value, trial_id, exc) from exc
        spins = round_to_spins(traj.final_state.phi)
        records.append(TrialRecord(
            trial_id=trial_id,
            H=ising_energy(J, spins),
            cut=cut_of_spins(g, spins),
            spin_hash=canonical_spin_hash(spins),
            initial_digest=initial_digest,
        ))
    logger.debug("Trial %d: %s", trial_id, [(m.value, r.H) for m, r in zip(models, records)])
    return records


def build_manifest(spec: TrialSpec, g: Graph) -> dict[str, Any]:
    return {
        "schema_version": SCHEMA_VERSION,
        "package_version": __version__,
        "numpy_version": np.__version__,
        "graph": {**spec.graph_source.to_dict(), "n": g.n, "m": g.m, "digest": g.digest},
        "models": [m.value for m in spec.models],
        "n_trials": spec.n_trials,
        "base_seed": spec.base_seed,
        "schedule": spec.schedule.to_dict(),
        "integrator": {
            "dt": spec.integrator.dt,
            "noise_amplitude": spec.integrator.noise_amplitude,
            "record_stride": spec.integrator.record_stride,
        },
    }


def spec_from_manifest(manifest: dict[str, Any], workers: int = 1) -> TrialSpec:
    integ = manifest["integrator"]
    return TrialSpec(
        graph_source=GraphSource.from_dict(manifest["graph"]),
        models=tuple(ModelKind(m) for m in manifest["models"]),
        n_trials=int(manifest["n_trials"]),
        base_seed=int(manifest["base_seed"]),
        schedule=AnnealSchedule.from_dict(manifest["schedule"]),
        integrator=IntegratorConfig(dt=float(integ["dt"]), noise_amplitude=float(integ["noise_amplitude"]),
                                    record_stride=int(integ["record_stride"])),
        workers=workers,
    )


def run_portfolio(spec: TrialSpec, graph: Graph | None = None) -> PortfolioReport:
    """Run every model on every trial; trials share initial phases and noise across models."""
    g = graph if graph is not None else spec.graph_source.load()
    jobs = [(g, spec.models, spec.schedule, spec.integrator, spec.base_seed, t) for t in range(spec.n_trials)]
    logger.info("Running %d trials of %s on n=%d m=%d", spec.n_trials,
                "+".join(m.value for m in spec.models), g.n, g.m)
    if spec.workers > 1 and spec.n_trials > 1:
        with ProcessPoolExecutor(max_workers=spec.workers) as pool:
            results = list(pool.map(_run_trial, jobs))
    else:
        results = [_run_trial(job) for job in jobs]

    models = {
        model: ModelSummary(model=model, trials=tuple(trial[k] for trial in results))
        for k, model in enumerate(spec.models)
    }
    report = PortfolioReport(manifest=build_manifest(spec, g), models=models)
    logger.info("Portfolio best cut %s (%s)", report.portfolio_best_cut,
                ", ".join(f"{m.value}: {s.best_cut} x{s.success_count}" for m, s in models.items()))
    return report


def emit_histogram(report: PortfolioReport, model: ModelKind) -> dict[float, int]:
    model = ModelKind(model)
    if model not in report.models:
        raise ModelAbsentError(f"model {model.value} is not part of this report")
    return report.models[model].histogram

