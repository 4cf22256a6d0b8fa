"""Published reference values used to grade estimates."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class GsetEntry:
    name: str
    n: int
    m: int
    best_known_cut: int
    published_estimate: int


GSET = {
    e.name: e
    for e in (
        GsetEntry("G1", 800, 19176, 11624, 11623),
        GsetEntry("G2", 800, 19176, 11620, 11620),
        GsetEntry("G3", 800, 19176, 11622, 11620),
        GsetEntry("G4", 800, 19176, 11646, 11629),
        GsetEntry("G5", 800, 19176, 11631, 11604),
    )
}

# Worst published estimate-to-best-known ratio over G1..G5, in percent.
GSET_MIN_RATIO_PERCENT = 99.77


def best_known_cut(name: str | None, n: int | None = None, m: int | None = None) -> int | None:
    """Best-known cut for a G-set name, or None when the name or the size does not match."""
    entry = GSET.get(name.upper()) if name else None
    if entry is None or (n is not None and n != entry.n) or (m is not None and m != entry.m):
        return None
    return entry.best_known_cut
