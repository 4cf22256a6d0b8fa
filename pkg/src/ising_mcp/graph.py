"""Graphs, rudy/G-set I/O, and the graph <-> Ising <-> Max-Cut mappings."""

from __future__ import annotations

import enum
import hashlib
import logging
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray

from ising_mcp.errors import DimensionError, GraphFormatError, IsingError

logger = logging.getLogger(__name__)

Edge = tuple[int, int, float]
SpinConfig = NDArray[np.int8]


class CouplingMode(str, enum.Enum):
    ANTIFERROMAGNETIC = "antiferromagnetic"
    FERROMAGNETIC = "ferromagnetic"


@dataclass(frozen=True)
class Graph:
    n: int
    edges: tuple[Edge, ...]
    name: str | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.n <= 0:
            raise GraphFormatError(f"node count must be positive, got {self.n}")
        seen: set[tuple[int, int]] = set()
        for i, j, _ in self.edges:
            if i == j:
                raise GraphFormatError(f"self-loop on node {i}")
            if not 0 <= i < j < self.n:
                raise GraphFormatError(f"edge ({i}, {j}) is not normalized to 0 <= i < j < {self.n}")
            if (i, j) in seen:
                raise GraphFormatError(f"duplicate edge ({i}, {j})")
            seen.add((i, j))
        object.__setattr__(self, "edges", tuple(sorted(self.edges, key=lambda e: (e[0], e[1]))))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[float]], name: str | None = None) -> Graph:
        """Build a graph from (i, j, w) triples in any orientation."""
        normalized = []
        for i, j, w in edges:
            i, j = int(i), int(j)
            normalized.append((min(i, j), max(i, j), float(w)))
        return cls(n=n, edges=tuple(normalized), name=name)

    @property
    def m(self) -> int:
        return len(self.edges)

    @cached_property
    def xi(self) -> float:
        """Total edge weight; the edge count for unit weights."""
        return float(sum(w for _, _, w in self.edges))

    @cached_property
    def edge_arrays(self) -> tuple[NDArray[np.intp], NDArray[np.intp], NDArray[np.float64]]:
        if not self.edges:
            return np.empty(0, np.intp), np.empty(0, np.intp), np.empty(0, np.float64)
        arr = np.asarray(self.edges, dtype=np.float64)
        return arr[:, 0].astype(np.intp), arr[:, 1].astype(np.intp), arr[:, 2].copy()

    @cached_property
    def weight_matrix(self) -> NDArray[np.float64]:
        W = np.zeros((self.n, self.n))
        rows, cols, w = self.edge_arrays
        W[rows, cols] = w
        W[cols, rows] = w
        W.setflags(write=False)
        return W

    @cached_property
    def degree_matrix(self) -> NDArray[np.float64]:
        return np.diag(self.weight_matrix.sum(axis=1))

    @cached_property
    def digest(self) -> str:
        return hashlib.sha256(render_graph(self).encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class CouplingMatrix:
    """Symmetric zero-diagonal couplings plus the sparse edge view used by the RHS."""

    J: NDArray[np.float64]
    rows: NDArray[np.intp]
    cols: NDArray[np.intp]
    values: NDArray[np.float64]

    @property
    def n(self) -> int:
        return self.J.shape[0]

    @classmethod
    def from_dense(cls, J: ArrayLike) -> CouplingMatrix:
        J = np.array(J, dtype=np.float64)
        if J.ndim != 2 or J.shape[0] != J.shape[1]:
            raise DimensionError(f"coupling matrix must be square, got shape {J.shape}")
        if not np.array_equal(J, J.T):
            raise IsingError("coupling matrix must be symmetric")
        if np.any(np.diag(J) != 0.0):
            raise IsingError("coupling matrix must have a zero diagonal")
        rows, cols = np.nonzero(np.triu(J, k=1))
        J.setflags(write=False)
        return cls(J=J, rows=rows.astype(np.intp), cols=cols.astype(np.intp), values=J[rows, cols].copy())


def couplings(g: Graph, mode: CouplingMode | str = CouplingMode.ANTIFERROMAGNETIC) -> CouplingMatrix:
    """J = -W for Max-Cut (antiferromagnetic), J = +W for the ferromagnetic case."""
    mode = CouplingMode(mode)
    sign = -1.0 if mode is CouplingMode.ANTIFERROMAGNETIC else 1.0
    rows, cols, w = g.edge_arrays
    J = sign * np.array(g.weight_matrix)
    J.setflags(write=False)
    return CouplingMatrix(J=J, rows=rows, cols=cols, values=sign * w)


def as_spins(values: ArrayLike, n: int | None = None) -> SpinConfig:
    s = np.asarray(values)
    if s.ndim != 1:
        raise DimensionError(f"spin configuration must be a vector, got shape {s.shape}")
    if n is not None and s.shape[0] != n:
        raise DimensionError(f"expected {n} spins, got {s.shape[0]}")
    if not np.all((s == 1) | (s == -1)):
        raise IsingError("spins must be exactly +1 or -1")
    return s.astype(np.int8)


def ising_energy(J: CouplingMatrix, s: ArrayLike) -> float:
    """H = -sum_{i<j} J_ij s_i s_j."""
    s = as_spins(s, J.n).astype(np.float64)
    return float(-np.sum(J.values * s[J.rows] * s[J.cols]))


def cut_of_spins(g: Graph, s: ArrayLike) -> float:
    s = as_spins(s, g.n)
    rows, cols, w = g.edge_arrays
    return float(np.sum(w[s[rows] != s[cols]]))


def cut_from_energy(g: Graph, H: float) -> float:
    return (g.xi - H) / 2.0


def parse_graph(text: str, name: str | None = None) -> Graph:
    """Parse rudy text: header "N M", then M lines "i j w" with 1-indexed nodes."""
    lines = [(no, line.split()) for no, line in enumerate(text.splitlines(), start=1)]
    lines = [(no, tokens) for no, tokens in lines if tokens]
    if not lines:
        raise GraphFormatError("empty input", line=1)

    header_no, header = lines[0]
    if len(header) != 2:
        raise GraphFormatError(f"header must be 'N M', got {' '.join(header)!r}", line=header_no)
    try:
        n, m = int(header[0]), int(header[1])
    except ValueError:
        raise GraphFormatError(f"header must hold two integers, got {' '.join(header)!r}", line=header_no)
    if n <= 0 or m < 0:
        raise GraphFormatError(f"invalid header counts n={n}, m={m}", line=header_no)

    body = lines[1:]
    if len(body) != m:
        raise GraphFormatError(f"header declares {m} edges but {len(body)} edge lines follow",
                               line=body[m][0] if len(body) > m else header_no)

    edges: list[Edge] = []
    seen: dict[tuple[int, int], int] = {}
    for no, tokens in body:
        if len(tokens) != 3:
            raise GraphFormatError(f"edge line must be 'i j w', got {' '.join(tokens)!r}", line=no)
        try:
            i, j = int(tokens[0]), int(tokens[1])
            w = float(tokens[2])
        except ValueError:
            raise GraphFormatError(f"non-numeric edge line {' '.join(tokens)!r}", line=no)
        if not (1 <= i <= n and 1 <= j <= n):
            raise GraphFormatError(f"node index out of range 1..{n}: {i} {j}", line=no)
        if i == j:
            raise GraphFormatError(f"self-loop on node {i}", line=no)
        key = (min(i, j) - 1, max(i, j) - 1)
        if key in seen:
            raise GraphFormatError(f"duplicate edge {i} {j} (first seen on line {seen[key]})", line=no)
        seen[key] = no
        edges.append((key[0], key[1], w))

    return Graph(n=n, edges=tuple(edges), name=name)


def _format_weight(w: float) -> str:
    return str(int(w)) if float(w).is_integer() else repr(float(w))


def render_graph(g: Graph) -> str:
    out = [f"{g.n} {g.m}"]
    out.extend(f"{i + 1} {j + 1} {_format_weight(w)}" for i, j, w in g.edges)
    return "\n".join(out) + "\n"


def read_graph(path: str | Path) -> Graph:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise GraphFormatError(f"cannot read graph file {path}: {exc}") from exc
    try:
        return parse_graph(text, name=path.stem)
    except GraphFormatError as exc:
        raise GraphFormatError(f"{path}: {exc.message}", line=exc.line) from exc


def write_graph(g: Graph, path: str | Path) -> None:
    path = Path(path)
    try:
        path.write_text(render_graph(g), encoding="utf-8")
    except OSError as exc:
        raise IsingError(f"cannot write graph file {path}: {exc}") from exc


def generate_random_graph(n: int, m: int, w: float = 1.0, seed: int = 0) -> Graph:
    """Fixed-count random graph: m distinct edges drawn uniformly without replacement."""
    max_edges = n * (n - 1) // 2
    if n <= 0:
        raise IsingError(f"node count must be positive, got {n}")
    if not 0 <= m <= max_edges:
        raise IsingError(f"cannot place {m} edges on {n} nodes (maximum {max_edges})")
    rng = np.random.default_rng(seed)
    rows, cols = np.triu_indices(n, k=1)
    picked = np.sort(rng.choice(max_edges, size=m, replace=False))
    edges = tuple((int(rows[k]), int(cols[k]), float(w)) for k in picked)
    logger.debug("Generated graph n=%d m=%d seed=%d", n, m, seed)
    return Graph(n=n, edges=edges, name=f"random_n{n}_m{m}_s{seed}")


def config_spins(indices: NDArray[np.int64], n: int) -> NDArray[np.int8]:
    """Spin rows for enumeration indices: spin 0 is +1, spin k>0 is -1 when bit k-1 is set."""
    bits = (indices[:, None] >> np.arange(n - 1)) & 1
    spins = np.ones((indices.size, n), dtype=np.int8)
    spins[:, 1:] = 1 - 2 * bits
    return spins


def format_spins(s: ArrayLike) -> str:
    """(1, -1, 1) -> '+-+'."""
    return "".join("+" if v > 0 else "-" for v in np.asarray(s))


def parse_spins(text: str, n: int | None = None) -> SpinConfig:
    """'+-+' -> (1, -1, 1)."""
    text = text.strip()
    if not text or set(text) - {"+", "-"}:
        raise IsingError(f"spin string may only contain '+' and '-': {text!r}")
    return as_spins([1 if c == "+" else -1 for c in text], n)
