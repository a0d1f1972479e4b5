"""Random graph sources: G(n, p), the configuration (pairing) model, and the
exact probability that a pairing leaves a vertex set isolated.

Randomness
----------
Every sampler takes an :class:`RngSeed`. The bit generator is numpy's
``PCG64`` seeded through ``SeedSequence(seed, spawn_key=stream)``; the
stream is a tuple of non-negative integers (strings in a stream are mapped
to integers with a truncated SHA-256, never with the salted builtin
``hash``). Identical ``(seed, stream)`` pairs give identical draws on every
platform, and distinct streams are statistically independent, which is what
lets replicates run in any order or process.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from .graph import Graph, GraphError, build_graph

__all__ = [
    "RngSeed",
    "DegreeSequence",
    "sample_gnp",
    "sample_configuration",
    "sample_pairings",
    "pairing_isolation_probability",
    "read_degree_sequence",
]


def _stream_word(part) -> int:
    if isinstance(part, (int, np.integer)):
        if part < 0:
            raise ValueError("stream components must be non-negative")
        return int(part)
    if isinstance(part, float):
        part = repr(part)
    digest = hashlib.sha256(str(part).encode()).digest()
    return int.from_bytes(digest[:4], "little")


@dataclass(frozen=True)
class RngSeed:
    """Root seed plus a derivation path such as ``("scaling", 4096, 3)``."""

    seed: int
    stream: tuple = field(default=())

    def __post_init__(self):
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must fit in 64 unsigned bits")
        object.__setattr__(self, "stream", tuple(self.stream))

    def child(self, *parts) -> "RngSeed":
        return RngSeed(self.seed, self.stream + parts)

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(int(self.seed), spawn_key=tuple(_stream_word(p) for p in self.stream))
        return np.random.Generator(np.random.PCG64(ss))


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, RngSeed):
        return seed.generator()
    if isinstance(seed, np.random.Generator):
        return seed
    return RngSeed(int(seed)).generator()


@dataclass(frozen=True)
class DegreeSequence:
    degrees: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "degrees", tuple(int(d) for d in self.degrees))
        if any(d < 0 for d in self.degrees):
            raise ValueError("degrees must be non-negative")

    @property
    def sum(self) -> int:
        return sum(self.degrees)

    @property
    def edge_count(self) -> int:
        return self.sum // 2

    def __len__(self):
        return len(self.degrees)

    def core_admissible(self) -> bool:
        """Every degree at least 2 and the total even."""
        return self.sum % 2 == 0 and all(d >= 2 for d in self.degrees)


def read_degree_sequence(path) -> DegreeSequence:
    return DegreeSequence(int(tok) for tok in Path(path).read_text().split())


def _pair_index_to_edges(k: np.ndarray, n: int) -> np.ndarray:
    # rank of pair (i, j), i < j, in lexicographic order
    start = np.arange(n, dtype=np.int64) * (2 * n - np.arange(n, dtype=np.int64) - 1) // 2
    i = np.searchsorted(start, k, side="right") - 1
    j = k - start[i] + i + 1
    return np.stack([i, j], axis=1)


def sample_gnp(n: int, p: float, seed) -> Graph:
    """Sample G(n, p) by geometric skipping over the lexicographic pair order.

    Expected cost is ``O(n + e*)``: only the gaps between present pairs are
    drawn.
    """
    if not 0.0 <= p <= 1.0 or math.isnan(p):
        raise GraphError(f"edge probability must lie in [0, 1], got {p}")
    n = int(n)
    total = n * (n - 1) // 2
    rng = _rng(seed)
    if p == 0.0 or total == 0:
        return build_graph(n, np.empty((0, 2), dtype=np.int64))
    if p == 1.0:
        return build_graph(n, _pair_index_to_edges(np.arange(total, dtype=np.int64), n))
    chunk = max(1024, int(1.2 * total * p) + 64)
    picks = []
    pos = -1
    while True:
        gaps = rng.geometric(p, size=chunk)
        idx = pos + np.cumsum(gaps, dtype=np.int64)
        inside = idx[idx < total]
        picks.append(inside)
        if len(inside) < chunk:
            break
        pos = int(idx[-1])
    k = np.concatenate(picks)
    return build_graph(n, _pair_index_to_edges(k, n))


def _points(ds: DegreeSequence) -> np.ndarray:
    if ds.sum % 2:
        raise GraphError(f"degree sum {ds.sum} is odd; no perfect matching exists")
    return np.repeat(np.arange(len(ds), dtype=np.int64), ds.degrees)


def sample_configuration(ds, seed) -> Graph:
    """Multigraph from a uniformly random perfect matching of degree points.

    Loops and parallel edges are kept. The output degree sequence equals
    ``ds`` exactly.
    """
    if not isinstance(ds, DegreeSequence):
        ds = DegreeSequence(ds)
    pts = _points(ds)
    rng = _rng(seed)
    pts = rng.permutation(pts)
    return build_graph(len(ds), pts.reshape(-1, 2), allow_multi=True)


def sample_pairings(ds, count: int, seed) -> np.ndarray:
    """``count`` independent uniform matchings as an array of shape
    ``(count, M, 2)`` holding vertex ids; the batched form of
    :func:`sample_configuration` used for frequency estimates."""
    if not isinstance(ds, DegreeSequence):
        ds = DegreeSequence(ds)
    pts = _points(ds)
    rng = _rng(seed)
    batch = rng.permuted(np.broadcast_to(pts, (count, len(pts))), axis=1)
    return batch.reshape(count, -1, 2)


def pairing_isolation_probability(M: int, dS: int, exact: bool = False):
    """Probability that a uniform matching on ``2M`` points pairs the ``dS``
    points of a vertex set only among themselves.

    Equals ``C(M, dS/2) / C(2M, dS)`` and the product
    ``(dS-1)/(2M-1) * (dS-3)/(2M-3) * ... * 1/(2M-dS+1)``. Returns a float
    computed in log space, or a :class:`~fractions.Fraction` when ``exact``.
    """
    M, dS = int(M), int(dS)
    if dS % 2:
        raise ValueError(f"d(S) must be even, got {dS}")
    if not 0 <= dS <= 2 * M:
        raise ValueError(f"d(S) must lie in [0, 2M] = [0, {2 * M}], got {dS}")
    if exact:
        out = Fraction(1)
        for k in range(dS // 2):
            out *= Fraction(dS - 1 - 2 * k, 2 * M - 1 - 2 * k)
        return out
    h = dS // 2
    lg = math.lgamma
    log_p = (lg(M + 1) - lg(h + 1) - lg(M - h + 1)) - (lg(2 * M + 1) - lg(dS + 1) - lg(2 * M - dS + 1))
    return math.exp(log_p)
