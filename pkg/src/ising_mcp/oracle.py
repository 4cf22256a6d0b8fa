"""Exact ground states by exhaustive enumeration, for graphs small enough to enumerate.

Spin 0 is pinned to +1 (global flip symmetry), leaving 2^(n-1) configurations. Config
index c sets spin k (k >= 1) to -1 when bit k-1 of c is set. The low ``L`` free spins are
handled as one vectorised block per step; the high spins walk a Gray code, so each step
flips one high spin and updates the block energies incrementally.
"""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from ising_mcp.errors import GraphTooLargeError
from ising_mcp.graph import CouplingMatrix, Graph, SpinConfig, config_spins, cut_from_energy

logger = logging.getLogger(__name__)

DEFAULT_N_LIMIT = 24
LOW_BITS = 12
ENERGY_ATOL = 1e-9


@dataclass(frozen=True)
class ExactResult:
    H_min: float
    optimal_cut: float | None
    minimizers: list[SpinConfig] = field(repr=False)
    minimizer_indices: list[int] = field(repr=False)

    @property
    def degeneracy(self) -> int:
        return len(self.minimizers)


def _chunk_minimum(args: tuple) -> tuple[float, list[int]]:
    """Minimum energy and minimizing config indices over high-index range [h_start, h_stop)."""
    Jd, low, h_start, h_stop = args
    n = Jd.shape[0]
    high = n - 1 - low
    # block spins: spin 0 plus the low free spins
    block = config_spins(np.arange(1 << low, dtype=np.int64), low + 1).astype(np.float64)
    J_bb = Jd[: low + 1, : low + 1]
    J_bh = Jd[: low + 1, low + 1:]
    J_hh = Jd[low + 1:, low + 1:]
    block_energy = -0.5 * np.einsum("bi,ij,bj->b", block, J_bb, block)

    def high_spins(h: int) -> NDArray[np.float64]:
        g = h ^ (h >> 1)
        return 1.0 - 2.0 * ((g >> np.arange(high)) & 1)

    s_high = high_spins(h_start)
    field_hh = J_hh @ s_high
    cross = J_bh @ s_high
    h_energy = -0.5 * float(s_high @ field_hh)

    best = np.inf
    found: list[int] = []
    for h in range(h_start, h_stop):
        if h != h_start:
            k = (h & -h).bit_length() - 1
            old = s_high[k]
            # flipping spin k changes the high-high energy by 2*s_k*field_k
            h_energy += 2.0 * old * field_hh[k]
            field_hh -= 2.0 * old * J_hh[:, k]
            cross -= 2.0 * old * J_bh[:, k]
            s_high[k] = -old
        energies = block_energy + h_energy - block @ cross
        low_min = float(energies.min())
        if low_min < best - ENERGY_ATOL:
            best = low_min
            found = []
        if low_min <= best + ENERGY_ATOL:
            g = h ^ (h >> 1)
            hits = np.nonzero(energies <= best + ENERGY_ATOL)[0]
            found.extend(int((g << low) | b) for b in hits)
    return best, found


def exact_ground_state(
    J: CouplingMatrix,
    n_limit: int = DEFAULT_N_LIMIT,
    *,
    graph: Graph | None = None,
    force: bool = False,
    workers: int = 1,
) -> ExactResult:
    """Exact minimum of H over all spin configurations.

    ``optimal_cut`` is filled through cut_from_energy when the source graph is given.
    """
    n = J.n
    if n > n_limit:
        if not force:
            raise GraphTooLargeError(f"cannot enumerate {n} spins (limit {n_limit}; pass force to override)")
        logger.warning("Forcing exhaustive enumeration of %d spins", n)
    low = min(n - 1, LOW_BITS)
    high = n - 1 - low
    n_high = 1 << high
    if workers > 1 and n_high > 1:
        step = -(-n_high // workers)
        chunks = [(J.J, low, a, min(a + step, n_high)) for a in range(0, n_high, step)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_chunk_minimum, chunks))
    else:
        parts = [_chunk_minimum((J.J, low, 0, n_high))]

    H_min = min(p[0] for p in parts)
    indices = sorted(i for best, found in parts if best <= H_min + ENERGY_ATOL for i in found)
    spins = config_spins(np.asarray(indices, dtype=np.int64), n)
    result = ExactResult(
        H_min=float(H_min),
        optimal_cut=cut_from_energy(graph, H_min) if graph is not None else None,
        minimizers=[spins[k] for k in range(len(indices))],
        minimizer_indices=indices,
    )
    logger.info("Exact ground state over 2^%d configurations: H_min=%s, degeneracy=%d",
                n - 1, H_min, result.degeneracy)
    return result
