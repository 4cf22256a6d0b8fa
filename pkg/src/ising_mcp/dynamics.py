"""OIM and DIM phase dynamics, their energies, and the Euler-Maruyama integrator."""

from __future__ import annotations

import csv
import enum
import logging
import math
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray

from ising_mcp.errors import DimensionError, IntegrationError, IsingError
from ising_mcp.graph import CouplingMatrix, SpinConfig, as_spins, ising_energy

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi
PhaseVector = NDArray[np.float64]
_SNAP = 1e-12


class ModelKind(str, enum.Enum):
    OIM = "oim"
    DIM = "dim"


def _sin(x: NDArray[np.float64]) -> NDArray[np.float64]:
    """Sine that returns exact zeros at integer multiples of pi (Type I residuals)."""
    out = np.sin(x)
    r = x - np.pi * np.rint(x / np.pi)
    out[np.abs(r) <= _SNAP * np.maximum(1.0, np.abs(x))] = 0.0
    return out


def wrap_phases(phi: ArrayLike) -> PhaseVector:
    wrapped = np.mod(np.asarray(phi, dtype=np.float64), TWO_PI)
    # np.mod can round tiny negatives up to exactly 2*pi
    return np.where(wrapped >= TWO_PI, 0.0, wrapped)


@dataclass(frozen=True)
class PhaseState:
    phi: PhaseVector
    t: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "phi", wrap_phases(self.phi))


@dataclass(frozen=True)
class AnnealSchedule:
    """Constant K with a piecewise-linear K_s(t), held flat past the last breakpoint."""

    K: float
    ks_points: tuple[tuple[float, float], ...]
    total_time: float

    def __post_init__(self):
        if not self.K > 0:
            raise IsingError(f"coupling strength K must be positive, got {self.K}")
        if not self.ks_points:
            raise IsingError("schedule needs at least one (t, Ks) breakpoint")
        times = [t for t, _ in self.ks_points]
        if any(b <= a for a, b in zip(times, times[1:])):
            raise IsingError("schedule breakpoint times must be strictly increasing")
        if any(ks < 0 for _, ks in self.ks_points):
            raise IsingError("Ks breakpoints must be non-negative")
        if not self.total_time > 0:
            raise IsingError(f"total_time must be positive, got {self.total_time}")

    @classmethod
    def linear_ramp(cls, K: float, ks_max: float, t_end: float, ks_start: float = 0.0) -> AnnealSchedule:
        return cls(K=K, ks_points=((0.0, ks_start), (t_end, ks_max)), total_time=t_end)

    @classmethod
    def constant(cls, K: float, Ks: float, t_end: float) -> AnnealSchedule:
        return cls(K=K, ks_points=((0.0, Ks),), total_time=t_end)

    @cached_property
    def _breakpoints(self) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
        points = np.asarray(self.ks_points, dtype=np.float64)
        return points[:, 0], points[:, 1]

    def ks(self, t: float | NDArray[np.float64]) -> float | NDArray[np.float64]:
        times, values = self._breakpoints
        out = np.interp(t, times, values)
        return float(out) if np.ndim(out) == 0 else out

    def to_dict(self) -> dict:
        return {"K": self.K, "ks_points": [list(p) for p in self.ks_points], "total_time": self.total_time}

    @classmethod
    def from_dict(cls, data: dict) -> AnnealSchedule:
        return cls(K=float(data["K"]),
                   ks_points=tuple((float(t), float(ks)) for t, ks in data["ks_points"]),
                   total_time=float(data["total_time"]))


@dataclass(frozen=True)
class IntegratorConfig:
    dt: float = 0.01
    noise_amplitude: float = 0.05
    seed: int = 0
    record_stride: int = 1

    def __post_init__(self):
        if not self.dt > 0:
            raise IsingError(f"dt must be positive, got {self.dt}")
        if self.noise_amplitude < 0:
            raise IsingError(f"noise amplitude must be non-negative, got {self.noise_amplitude}")
        if self.record_stride < 1:
            raise IsingError(f"record_stride must be >= 1, got {self.record_stride}")


@dataclass(frozen=True)
class Trajectory:
    times: NDArray[np.float64]
    phases: NDArray[np.float64]
    ks_values: NDArray[np.float64]
    energies: NDArray[np.float64]
    final_state: PhaseState
    model: ModelKind = ModelKind.DIM
    K: float = 1.0

    def __post_init__(self):
        lengths = {len(self.times), len(self.phases), len(self.ks_values), len(self.energies)}
        if len(lengths) != 1:
            raise DimensionError(f"trajectory arrays have unequal lengths {sorted(lengths)}")

    def __len__(self) -> int:
        return len(self.times)


def _check_phases(J: CouplingMatrix, phi: ArrayLike) -> PhaseVector:
    phi = np.asarray(phi.phi if isinstance(phi, PhaseState) else phi, dtype=np.float64)
    if phi.shape != (J.n,):
        raise DimensionError(f"phase vector has shape {phi.shape}, couplings are {J.n}x{J.n}")
    return phi


def model_rhs(model: ModelKind, J: CouplingMatrix, phi: ArrayLike, K: float, Ks: float) -> PhaseVector:
    """dphi/dt for either model, summed over edges only."""
    phi = _check_phases(J, phi)
    model = ModelKind(model)
    i, j, w = J.rows, J.cols, J.values
    if model is ModelKind.DIM:
        s = _sin(phi[i] + phi[j])
        sign_j = 1.0
    else:
        s = _sin(phi[i] - phi[j])
        sign_j = -1.0
    term = -K * w * s
    coupling = (np.bincount(i, weights=term, minlength=J.n)
                + sign_j * np.bincount(j, weights=term, minlength=J.n))
    return coupling - Ks * _sin(2.0 * phi)


def model_energy(model: ModelKind, J: CouplingMatrix, phi: ArrayLike, K: float, Ks: float) -> float:
    """E = -K sum_{i, j!=i} J_ij cos(phi_i -/+ phi_j) - Ks sum_i cos(2 phi_i)."""
    phi = _check_phases(J, phi)
    model = ModelKind(model)
    i, j, w = J.rows, J.cols, J.values
    pair = phi[i] + phi[j] if model is ModelKind.DIM else phi[i] - phi[j]
    # ordered double sum counts each edge twice
    return float(-2.0 * K * np.sum(w * np.cos(pair)) - Ks * np.sum(np.cos(2.0 * phi)))


def energy_gradient(model: ModelKind, J: CouplingMatrix, phi: ArrayLike, K: float, Ks: float) -> PhaseVector:
    return -2.0 * model_rhs(model, J, phi, K, Ks)


def energy_rate(model: ModelKind, J: CouplingMatrix, phi: ArrayLike, K: float, Ks: float) -> float:
    rhs = model_rhs(model, J, phi, K, Ks)
    return float(-2.0 * np.dot(rhs, rhs))


def fixed_point_energy(J: CouplingMatrix, s: ArrayLike, K: float, Ks: float) -> float:
    """Model energy at the {0, pi} embedding of s: 2K*H(s) - N*Ks."""
    return 2.0 * K * ising_energy(J, s) - J.n * Ks


def phases_from_spins(s: ArrayLike) -> PhaseVector:
    s = as_spins(s)
    return np.where(s > 0, 0.0, math.pi)


def round_to_spins(phi: ArrayLike) -> SpinConfig:
    """+1 when the phase lies within pi/2 of 0 (mod 2pi); a tie at exactly pi/2 gives +1."""
    phi = np.asarray(phi.phi if isinstance(phi, PhaseState) else phi, dtype=np.float64)
    wrapped = wrap_phases(phi)
    distance = np.minimum(wrapped, TWO_PI - wrapped)
    return np.where(distance <= math.pi / 2, 1, -1).astype(np.int8)


def random_phases(n: int, rng: np.random.Generator) -> PhaseVector:
    return rng.uniform(0.0, TWO_PI, size=n)


def integrate(
    model: ModelKind,
    J: CouplingMatrix,
    phi0: ArrayLike,
    sched: AnnealSchedule,
    cfg: IntegratorConfig,
) -> Trajectory:
    """Euler-Maruyama: phi <- wrap(phi + rhs*dt + sigma*sqrt(dt)*zeta), Ks re-read every step."""
    model = ModelKind(model)
    phi = wrap_phases(_check_phases(J, phi0))
    rng = np.random.default_rng(cfg.seed)
    n_steps = int(round(sched.total_time / cfg.dt))
    noise_scale = cfg.noise_amplitude * math.sqrt(cfg.dt)
    K = sched.K

    n_records = n_steps // cfg.record_stride + 1
    times = np.empty(n_records)
    phases = np.empty((n_records, J.n))
    ks_values = np.empty(n_records)
    energies = np.empty(n_records)

    def record(slot: int, t: float, ks: float):
        times[slot] = t
        phases[slot] = phi
        ks_values[slot] = ks
        energies[slot] = model_energy(model, J, phi, K, ks)

    record(0, 0.0, sched.ks(0.0))
    slot = 1
    for step in range(1, n_steps + 1):
        t_prev = (step - 1) * cfg.dt
        ks = sched.ks(t_prev)
        drift = model_rhs(model, J, phi, K, ks)
        update = phi + drift * cfg.dt
        if noise_scale > 0.0:
            update += noise_scale * rng.standard_normal(J.n)
        if not np.all(np.isfinite(update)):
            raise IntegrationError(f"non-finite phase state (dt={cfg.dt} may be too large)", step=step)
        phi = wrap_phases(update)
        if step % cfg.record_stride == 0:
            t = step * cfg.dt
            record(slot, t, sched.ks(t))
            slot += 1

    t_final = n_steps * cfg.dt
    logger.debug("Integrated %s for %d steps (n=%d)", model.value, n_steps, J.n)
    return Trajectory(
        times=times[:slot],
        phases=phases[:slot],
        ks_values=ks_values[:slot],
        energies=energies[:slot],
        final_state=PhaseState(phi=phi.copy(), t=t_final),
        model=model,
        K=K,
    )


def write_trajectory_csv(traj: Trajectory, path: str | Path) -> None:
    path = Path(path)
    n = traj.phases.shape[1]
    try:
        with path.open("w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["t", "Ks", "E"] + [f"phi_{k}" for k in range(n)])
            for t, ks, e, row in zip(traj.times, traj.ks_values, traj.energies, traj.phases):
                writer.writerow([repr(float(t)), repr(float(ks)), repr(float(e))]
                                + [repr(float(x)) for x in row])
    except OSError as exc:
        raise IsingError(f"cannot write trajectory {path}: {exc}") from exc


def read_trajectory_csv(path: str | Path, model: ModelKind = ModelKind.DIM, K: float = 1.0) -> Trajectory:
    path = Path(path)
    try:
        with path.open("r", newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            rows: list[Sequence[str]] = list(reader)
    except OSError as exc:
        raise IsingError(f"cannot read trajectory {path}: {exc}") from exc
    if header is None or header[:3] != ["t", "Ks", "E"]:
        raise IsingError(f"{path}: not a trajectory CSV (header {header})")
    data = np.array(rows, dtype=np.float64).reshape(len(rows), len(header))
    phases = data[:, 3:]
    final = PhaseState(phi=phases[-1].copy(), t=float(data[-1, 0])) if len(rows) else PhaseState(np.empty(0))
    return Trajectory(times=data[:, 0], phases=phases, ks_values=data[:, 1], energies=data[:, 2],
                      final_state=final, model=ModelKind(model), K=K)
