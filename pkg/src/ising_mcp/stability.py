"""Jacobians at Type I fixed points, largest Lyapunov exponents, SHI thresholds and landscape scans.

The Jacobian of either model is A = K*D - 2*Ks*Delta, with Delta = diag(cos 2phi_i).
The "Lyapunov exponents" here are the eigenvalues of that symmetric matrix.
"""

from __future__ import annotations

import csv
import enum
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy import linalg

from ising_mcp.dynamics import ModelKind, PhaseVector, model_rhs
from ising_mcp.errors import (DimensionError, FixedPointClassError, GraphTooLargeError, IsingError,
                              NotSymmetricError)
from ising_mcp.graph import CouplingMatrix, Graph, SpinConfig, as_spins, config_spins, couplings, format_spins
from ising_mcp.oracle import DEFAULT_N_LIMIT, exact_ground_state

logger = logging.getLogger(__name__)

SYMMETRY_TOL = 1e-12
NSD_TOL = 1e-10
ENERGY_DECIMALS = 9
SCAN_BLOCK = 4096

# cos(q * pi/2) for q mod 4, exact
_QUARTER_COS = np.array([1.0, 0.0, -1.0, 0.0])


class FixedPointClass(str, enum.Enum):
    ZERO_PI = "zero_pi"
    HALF_PI = "half_pi"


@dataclass(frozen=True)
class TypeIFixedPoint:
    """Phases on the pi/2 lattice, all in {0, pi} or all in {pi/2, 3pi/2}.

    Stored as quarter-turn counts so cosines at the point are exact.
    """

    quarters: NDArray[np.int64]

    def __post_init__(self):
        q = np.mod(np.asarray(self.quarters, dtype=np.int64), 4)
        if q.ndim != 1 or q.size == 0:
            raise FixedPointClassError("fixed point needs a non-empty phase vector")
        parity = q % 2
        if not (np.all(parity == 0) or np.all(parity == 1)):
            raise FixedPointClassError("mixed fixed point: phases must all lie in {0, pi} or all in {pi/2, 3pi/2}")
        q.setflags(write=False)
        object.__setattr__(self, "quarters", q)

    @property
    def n(self) -> int:
        return self.quarters.size

    @property
    def kind(self) -> FixedPointClass:
        return FixedPointClass.ZERO_PI if self.quarters[0] % 2 == 0 else FixedPointClass.HALF_PI

    @property
    def phis(self) -> PhaseVector:
        return self.quarters * (math.pi / 2)

    @classmethod
    def from_phases(cls, phis: ArrayLike, atol: float = 1e-9) -> TypeIFixedPoint:
        phis = np.asarray(phis, dtype=np.float64)
        q = np.rint(phis / (math.pi / 2))
        if np.any(np.abs(phis - q * (math.pi / 2)) > atol):
            raise FixedPointClassError("phases are not integer multiples of pi/2")
        return cls(q.astype(np.int64))

    @classmethod
    def from_spins(cls, s: ArrayLike) -> TypeIFixedPoint:
        """{0, pi} embedding: +1 -> 0, -1 -> pi."""
        s = as_spins(s)
        return cls(np.where(s > 0, 0, 2).astype(np.int64))

    @classmethod
    def half_pi(cls, n: int, signs: ArrayLike | None = None) -> TypeIFixedPoint:
        """All pi/2, or pi/2 / 3pi/2 chosen by +1 / -1 signs."""
        if signs is None:
            return cls(np.ones(n, dtype=np.int64))
        return cls(np.where(as_spins(signs, n) > 0, 1, 3).astype(np.int64))

    def spins(self) -> SpinConfig:
        if self.kind is not FixedPointClass.ZERO_PI:
            raise FixedPointClassError("only {0, pi} fixed points map to spins")
        return np.where(self.quarters == 0, 1, -1).astype(np.int8)


@dataclass(frozen=True)
class JacobianBundle:
    A: NDArray[np.float64]
    D: NDArray[np.float64]
    delta_diag: NDArray[np.float64]
    model: ModelKind


@dataclass(frozen=True)
class StabilityRow:
    config: SpinConfig
    H: float
    lambda_L: float

    @property
    def stable(self) -> bool:
        return self.lambda_L < 0


@dataclass(frozen=True)
class ScanRow:
    H: float
    lambda_min: float
    lambda_max: float
    count: int
    stable_count: int


@dataclass(frozen=True)
class ThresholdReport:
    ks_destabilize_halfpi: float
    ks_stabilize_zeropi: dict[str, float]
    ks_energy_crossover: float | None


@dataclass(frozen=True)
class SelectivityReport:
    ground_energy: float
    selective: bool
    ks_ground: float
    ks_excited: float

    @property
    def window(self) -> tuple[float, float] | None:
        """Ks range stabilizing some ground state while every excited state stays unstable."""
        return (self.ks_ground, self.ks_excited) if self.ks_ground < self.ks_excited else None


def _check_match(J: CouplingMatrix, fp: TypeIFixedPoint):
    if fp.n != J.n:
        raise DimensionError(f"fixed point has {fp.n} phases, couplings are {J.n}x{J.n}")


def _d_matrix(model: ModelKind, J: NDArray[np.float64], pair_cos: NDArray[np.float64]) -> NDArray[np.float64]:
    """D with off-diagonal -/+ J_ij cos(.) and diagonal -sum_j J_ij cos(.).

    ``pair_cos`` holds cos(phi_i + phi_j) for the DIM, cos(phi_i - phi_j) for the OIM.
    """
    weighted = J * pair_cos
    np.fill_diagonal(weighted, 0.0)
    diag = -weighted.sum(axis=1)
    D = -weighted if model is ModelKind.DIM else weighted.copy()
    np.fill_diagonal(D, diag)
    return D


def _assemble(model: ModelKind, D: NDArray[np.float64], cos2: NDArray[np.float64],
              K: float, Ks: float) -> JacobianBundle:
    A = K * D - 2.0 * Ks * np.diag(cos2)
    return JacobianBundle(A=A, D=D, delta_diag=cos2, model=model)


def jacobian(model: ModelKind, J: CouplingMatrix, fp: TypeIFixedPoint, K: float, Ks: float) -> JacobianBundle:
    model = ModelKind(model)
    _check_match(J, fp)
    q = fp.quarters
    combined = q[:, None] + q[None, :] if model is ModelKind.DIM else q[:, None] - q[None, :]
    pair_cos = _QUARTER_COS[np.mod(combined, 4)]
    cos2 = _QUARTER_COS[np.mod(2 * q, 4)]
    return _assemble(model, _d_matrix(model, J.J, pair_cos), cos2, K, Ks)


def jacobian_at(model: ModelKind, J: CouplingMatrix, phi: ArrayLike, K: float, Ks: float) -> JacobianBundle:
    """The same Jacobian evaluated at an arbitrary phase vector."""
    model = ModelKind(model)
    phi = np.asarray(phi, dtype=np.float64)
    if phi.shape != (J.n,):
        raise DimensionError(f"phase vector has shape {phi.shape}, couplings are {J.n}x{J.n}")
    combined = phi[:, None] + phi[None, :] if model is ModelKind.DIM else phi[:, None] - phi[None, :]
    return _assemble(model, _d_matrix(model, J.J, np.cos(combined)), np.cos(2.0 * phi), K, Ks)


def finite_difference_jacobian(model: ModelKind, J: CouplingMatrix, phi: ArrayLike, K: float, Ks: float,
                               h: float = 1e-6) -> NDArray[np.float64]:
    phi = np.asarray(phi, dtype=np.float64)
    cols = []
    for k in range(phi.size):
        step = np.zeros_like(phi)
        step[k] = h
        cols.append((model_rhs(model, J, phi + step, K, Ks) - model_rhs(model, J, phi - step, K, Ks)) / (2 * h))
    return np.column_stack(cols)


def aleph_matrix(J: CouplingMatrix, fp: TypeIFixedPoint, K: float) -> NDArray[np.float64]:
    """K * J_ij * cos(phi_i - phi_j) off the diagonal, so A_DIM = A_OIM - 2*aleph for every K."""
    _check_match(J, fp)
    if fp.kind is not FixedPointClass.ZERO_PI:
        raise FixedPointClassError("aleph is defined on the {0, pi} class only")
    q = fp.quarters
    aleph = K * J.J * _QUARTER_COS[np.mod(q[:, None] - q[None, :], 4)]
    np.fill_diagonal(aleph, 0.0)
    return aleph


def _check_symmetric(A: NDArray[np.float64]) -> float:
    A = np.asarray(A, dtype=np.float64)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {A.shape}")
    scale = max(1.0, float(np.linalg.norm(A)))
    if np.max(np.abs(A - A.T), initial=0.0) > SYMMETRY_TOL * scale:
        raise NotSymmetricError("matrix is not symmetric")
    return scale


def lambda_max(A: ArrayLike) -> float:
    A = np.asarray(A, dtype=np.float64)
    _check_symmetric(A)
    n = A.shape[0]
    values = linalg.eigh(A, eigvals_only=True, subset_by_index=[n - 1, n - 1])
    return float(values[-1])


def check_negative_semidefinite(M: ArrayLike) -> bool:
    M = np.asarray(M, dtype=np.float64)
    scale = _check_symmetric(M)
    return lambda_max(M) <= NSD_TOL * scale


def critical_ks_destabilize_halfpi(J: CouplingMatrix, K: float) -> float:
    """Ks above which the all-pi/2 point loses stability: -K * lambda_L(D_DIM(pi/2)) / 2.

    With J = -W, D_DIM(pi/2) = -Dg - W.
    """
    if np.any(J.values > 0):
        logger.warning("Couplings carry positive entries; the pi/2 threshold assumes J = -W with W >= 0")
    D = jacobian(ModelKind.DIM, J, TypeIFixedPoint.half_pi(J.n), K=1.0, Ks=0.0).D
    return max(0.0, -K * lambda_max(D) / 2.0)


def critical_ks_stabilize_zeropi(J: CouplingMatrix, K: float, fp: TypeIFixedPoint,
                                 *, model: ModelKind = ModelKind.DIM) -> float:
    """Ks above which a {0, pi} point becomes stable: K * lambda_L(D(fp)) / 2.

    Delta = I on the {0, pi} class for both models, so the OIM threshold has the same form.
    """
    if fp.kind is not FixedPointClass.ZERO_PI:
        raise FixedPointClassError("the stabilization threshold is defined on the {0, pi} class")
    D = jacobian(model, J, fp, K=1.0, Ks=0.0).D
    return K * lambda_max(D) / 2.0


def ks_energy_crossover(K: float, H_min: float, xi: float, n: int) -> float:
    if n <= 0:
        raise IsingError(f"node count must be positive, got {n}")
    return K * (H_min + xi) / n


def thresholds(J: CouplingMatrix, K: float, configs: Sequence[ArrayLike] = (),
               H_min: float | None = None, xi: float | None = None) -> ThresholdReport:
    zero_pi = {}
    for s in configs:
        s = as_spins(s, J.n)
        zero_pi[format_spins(s)] = critical_ks_stabilize_zeropi(J, K, TypeIFixedPoint.from_spins(s))
    crossover = None
    if H_min is not None and xi is not None:
        crossover = ks_energy_crossover(K, H_min, xi, J.n)
    return ThresholdReport(
        ks_destabilize_halfpi=critical_ks_destabilize_halfpi(J, K),
        ks_stabilize_zeropi=zero_pi,
        ks_energy_crossover=crossover,
    )


def graph_thresholds(g: Graph, K: float, configs: Sequence[ArrayLike] = (),
                     n_limit: int = DEFAULT_N_LIMIT) -> tuple[float | None, ThresholdReport]:
    """Thresholds for a graph, with the exact H_min when it can be enumerated.

    Without supplied configurations the exact ground states are used.
    """
    J = couplings(g)
    configs = list(configs)
    H_min = None
    if g.n <= n_limit:
        exact = exact_ground_state(J, n_limit, graph=g)
        H_min = exact.H_min
        configs = configs or list(exact.minimizers)
    return H_min, thresholds(J, K, configs, H_min=H_min, xi=g.xi)

def _scan_block(args: tuple) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    model, Jd, K, Ks, start, stop = args
    n = Jd.shape[0]
    spins = config_spins(np.arange(start, stop, dtype=np.int64), n).astype(np.float64)
    outer = spins[:, :, None] * spins[:, None, :]
    # at {0, pi}: cos(phi_i + phi_j) = cos(phi_i - phi_j) = s_i s_j
    weighted = Jd[None, :, :] * outer
    idx = np.arange(n)
    weighted[:, idx, idx] = 0.0
    diag = -weighted.sum(axis=2)
    D = -weighted if model is ModelKind.DIM else weighted
    D[:, idx, idx] = diag
    lam = K * np.linalg.eigvalsh(D)[:, -1] - 2.0 * Ks
    H = -0.5 * np.einsum("bi,ij,bj->b", spins, Jd, spins)
    return H, lam


def scan_configurations(model: ModelKind, J: CouplingMatrix, K: float, Ks: float,
                        n_limit: int = DEFAULT_N_LIMIT, workers: int = 1) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """(H, lambda_L) for every {0, pi} configuration with spin 0 fixed to +1, in config-index order."""
    model = ModelKind(model)
    n = J.n
    if n > n_limit:
        raise GraphTooLargeError(f"cannot enumerate {n} spins (limit {n_limit})")
    total = 1 << (n - 1)
    blocks = [(model, J.J, K, Ks, start, min(start + SCAN_BLOCK, total))
              for start in range(0, total, SCAN_BLOCK)]
    if workers > 1 and len(blocks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_scan_block, blocks))
    else:
        parts = [_scan_block(b) for b in blocks]
    return np.concatenate([p[0] for p in parts]), np.concatenate([p[1] for p in parts])


def stability_rows(model: ModelKind, J: CouplingMatrix, K: float, Ks: float,
                   n_limit: int = DEFAULT_N_LIMIT, workers: int = 1) -> list[StabilityRow]:
    H, lam = scan_configurations(model, J, K, Ks, n_limit=n_limit, workers=workers)
    spins = config_spins(np.arange(H.size, dtype=np.int64), J.n)
    return [StabilityRow(config=spins[k], H=float(H[k]), lambda_L=float(lam[k])) for k in range(H.size)]


def stability_scan(model: ModelKind, J: CouplingMatrix, K: float, Ks: float,
                   n_limit: int = DEFAULT_N_LIMIT, workers: int = 1) -> list[ScanRow]:
    """Min/max lambda_L per distinct Ising energy, sorted by H ascending."""
    H, lam = scan_configurations(model, J, K, Ks, n_limit=n_limit, workers=workers)
    keys = np.round(H, ENERGY_DECIMALS)
    levels, inverse = np.unique(keys, return_inverse=True)
    rows = []
    for k, level in enumerate(levels):
        members = lam[inverse == k]
        rows.append(ScanRow(H=float(level), lambda_min=float(members.min()), lambda_max=float(members.max()),
                            count=int(members.size), stable_count=int(np.sum(members < 0))))
    logger.info("Scanned %d configurations of %s into %d energy levels", H.size, ModelKind(model).value, len(rows))
    return rows


def selective_stabilization(rows: Sequence[ScanRow], Ks: float) -> SelectivityReport:
    """Whether the ground state stabilizes before every excited configuration as Ks grows.

    lambda_L = K*lambda_L(D) - 2Ks on the {0, pi} class, so each row's lambda_min maps
    back to the Ks at which its most stable member turns stable.
    """
    if not rows:
        raise IsingError("empty scan")
    ordered = sorted(rows, key=lambda r: r.H)
    ground, excited = ordered[0], ordered[1:]

    def ks_at(row: ScanRow) -> float:
        return (row.lambda_min + 2.0 * Ks) / 2.0

    ks_ground = ks_at(ground)
    ks_excited = min((ks_at(r) for r in excited), default=math.inf)
    return SelectivityReport(
        ground_energy=ground.H,
        selective=ground.lambda_min < min((r.lambda_min for r in excited), default=math.inf),
        ks_ground=ks_ground,
        ks_excited=ks_excited,
    )


def write_scan_csv(rows: Sequence[ScanRow], path: str | Path) -> None:
    path = Path(path)
    try:
        with path.open("w", newline="", encoding="utf-8") as fh:
            write_scan_rows(rows, fh)
    except OSError as exc:
        raise IsingError(f"cannot write scan {path}: {exc}") from exc


def write_scan_rows(rows: Sequence[ScanRow], fh) -> None:
    writer = csv.writer(fh)
    writer.writerow(["H", "lambda_min", "lambda_max", "count", "stable_count"])
    for r in rows:
        writer.writerow([repr(r.H), repr(r.lambda_min), repr(r.lambda_max), r.count, r.stable_count])
