"""Detect the DIM pitchfork from a trajectory and turn K_s,E into a ground-state estimate."""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass
from decimal import ROUND_HALF_UP, Decimal

import numpy as np
from numpy.typing import NDArray

from ising_mcp.dynamics import (AnnealSchedule, IntegratorConfig, ModelKind, Trajectory, integrate,
                                random_phases)
from ising_mcp.errors import IsingError, NoBifurcationError
from ising_mcp.graph import Graph, couplings
from ising_mcp.reference import best_known_cut

logger = logging.getLogger(__name__)

DEFAULT_THRESHOLD = 0.006
DEFAULT_DEBOUNCE = 3
AGGREGATIONS = ("max", "mean")


@dataclass(frozen=True)
class DeviationTrace:
    times: NDArray[np.float64]
    deltas: NDArray[np.float64]
    ks_values: NDArray[np.float64]
    aggregation: str = "max"


@dataclass(frozen=True)
class BifurcationEstimate:
    t_star: float
    ks_E: float
    H_est: int
    cut_est: float
    threshold_used: float
    aggregation: str = "max"
    best_known: float | None = None

    @property
    def ratio_percent(self) -> float | None:
        if not self.best_known:
            return None
        return 100.0 * self.cut_est / self.best_known

    def to_dict(self) -> dict:
        out = asdict(self)
        out["ratio_percent"] = self.ratio_percent
        return out


def halfpi_distance(phases: NDArray[np.float64]) -> NDArray[np.float64]:
    """Circular distance to the nearest odd multiple of pi/2, in [0, pi/2]."""
    x = np.mod(phases - math.pi / 2, math.pi)
    return np.minimum(x, math.pi - x)


def deviation_trace(traj: Trajectory, aggregation: str = "max") -> DeviationTrace:
    if len(traj) == 0:
        raise IsingError("empty trajectory")
    if aggregation not in AGGREGATIONS:
        raise IsingError(f"aggregation must be one of {AGGREGATIONS}, got {aggregation!r}")
    dist = halfpi_distance(traj.phases)
    deltas = dist.max(axis=1) if aggregation == "max" else dist.mean(axis=1)
    return DeviationTrace(times=np.asarray(traj.times), deltas=deltas,
                          ks_values=np.asarray(traj.ks_values), aggregation=aggregation)


def detect_bifurcation(trace: DeviationTrace, threshold: float = DEFAULT_THRESHOLD,
                       debounce: int = DEFAULT_DEBOUNCE) -> tuple[float, float]:
    """First upward crossing after the global minimum that holds for ``debounce`` more samples.

    A crossing too close to the end of the trace is accepted if every remaining sample holds.
    """
    if not threshold > 0:
        raise IsingError(f"threshold must be positive, got {threshold}")
    deltas = trace.deltas
    if deltas.size == 0:
        raise IsingError("empty deviation trace")
    k_min = int(np.argmin(deltas))
    above = deltas > threshold
    for k in range(k_min + 1, deltas.size):
        if above[k] and not above[k - 1] and np.all(above[k:k + debounce + 1]):
            return float(trace.times[k]), float(trace.ks_values[k])
    raise NoBifurcationError(
        f"deviation never rose above {threshold} after its minimum "
        f"(max Ks reached {float(trace.ks_values[-1]):.4g}); raise ks_max or t_end"
    )


def round_half_away(x: float) -> int:
    return int(Decimal(repr(float(x))).quantize(Decimal(1), rounding=ROUND_HALF_UP))


def estimate_ground_state(ks_E: float, K: float, n: int, xi: float) -> tuple[int, float]:
    """H_min = Ks_E * N / K - xi, rounded to the nearest integer; cut = (xi - H) / 2."""
    if not K > 0 or n <= 0:
        raise IsingError(f"need K > 0 and n > 0, got K={K}, n={n}")
    ks_E, K, xi = float(ks_E), float(K), float(xi)
    H_est = round_half_away(ks_E * n / K - xi)
    cut_est = (xi - H_est) / 2.0
    if float(xi).is_integer() and (int(xi) - H_est) % 2:
        logger.warning("Estimated H=%d has the wrong parity for xi=%s; cut estimate %.1f is fractional",
                       H_est, xi, cut_est)
    return H_est, cut_est


def run_estimate(
    g: Graph,
    sched: AnnealSchedule,
    cfg: IntegratorConfig,
    threshold: float = DEFAULT_THRESHOLD,
    debounce: int = DEFAULT_DEBOUNCE,
    aggregation: str = "max",
) -> tuple[BifurcationEstimate, Trajectory]:
    """Run the DIM from seeded random phases and read the ground energy off the bifurcation."""
    J = couplings(g)
    phi0 = random_phases(g.n, np.random.default_rng(np.random.SeedSequence([cfg.seed, 0])))
    traj = integrate(ModelKind.DIM, J, phi0, sched, cfg)
    trace = deviation_trace(traj, aggregation=aggregation)
    t_star, ks_E = detect_bifurcation(trace, threshold=threshold, debounce=debounce)
    H_est, cut_est = estimate_ground_state(ks_E, sched.K, g.n, g.xi)
    estimate = BifurcationEstimate(
        t_star=t_star, ks_E=ks_E, H_est=H_est, cut_est=cut_est, threshold_used=threshold,
        aggregation=aggregation, best_known=best_known_cut(g.name, g.n, g.m),
    )
    logger.info("Bifurcation at t=%.4g (Ks=%.4g): H_est=%d, cut_est=%s", t_star, ks_E, H_est, cut_est)
    return estimate, traj
