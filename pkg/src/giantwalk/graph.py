"""Immutable sparse undirected (multi)graphs and vertex-subset statistics.

Conventions used everywhere in the package:

* vertices are dense integers ``0 .. n-1``;
* a loop ``(v, v)`` counts once towards ``edge_count`` and twice towards
  ``degree[v]``, so ``degree.sum() == 2 * edge_count`` always holds;
* parallel edges are stored once with a multiplicity and are counted with
  that weight in ``e(S)`` and ``e_out(S)``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import NamedTuple, Sequence

import numpy as np
import scipy.sparse as sp

__all__ = [
    "Graph",
    "GraphError",
    "VertexSubset",
    "BipartiteCheck",
    "build_graph",
    "subset_stats",
    "is_bipartite",
    "as_mask",
    "read_edgelist",
    "write_edgelist",
    "format_edgelist",
]


class GraphError(ValueError):
    """Invalid graph input (bad vertex id, forbidden loop or duplicate...)."""


def _frozen(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


class Graph:
    """Sparse undirected multigraph in CSR form.

    Do not call the constructor directly; use :func:`build_graph`.

    Attributes
    ----------
    n : int
        Number of vertices.
    edge_count : int
        ``e*``, number of edges counted with multiplicity (loops once).
    is_multigraph : bool
        Whether loops / parallel edges were allowed at construction.
    indptr, indices, mult : ndarray
        CSR adjacency. Row ``v`` lists distinct neighbours sorted by id and
        the multiplicity of each. A loop appears once in its own row.
    degree : ndarray
        Degree of each vertex.
    """

    __slots__ = (
        "n",
        "edge_count",
        "is_multigraph",
        "indptr",
        "indices",
        "mult",
        "degree",
        "_eu",
        "_ev",
        "_em",
        "__dict__",
    )

    def __init__(self, n, eu, ev, em, is_multigraph):
        self.n = int(n)
        self.is_multigraph = bool(is_multigraph)
        self._eu = _frozen(eu)
        self._ev = _frozen(ev)
        self._em = _frozen(em)
        self.edge_count = int(em.sum())

        loop = eu == ev
        rows = np.concatenate([eu, ev[~loop]])
        cols = np.concatenate([ev, eu[~loop]])
        vals = np.concatenate([em, em[~loop]])
        order = np.lexsort((cols, rows))
        rows, cols, vals = rows[order], cols[order], vals[order]
        counts = np.bincount(rows, minlength=self.n)
        indptr = np.zeros(self.n + 1, dtype=np.int64)
        np.cumsum(counts, out=indptr[1:])
        self.indptr = _frozen(indptr)
        self.indices = _frozen(cols.astype(np.int64))
        self.mult = _frozen(vals.astype(np.int64))

        deg = np.bincount(eu, weights=em, minlength=self.n)
        deg += np.bincount(ev, weights=em, minlength=self.n)
        self.degree = _frozen(deg.astype(np.int64))

    def __repr__(self):
        kind = "multigraph" if self.is_multigraph else "graph"
        return f"<{kind} n={self.n} e*={self.edge_count}>"

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            self.n == other.n
            and self.is_multigraph == other.is_multigraph
            and np.array_equal(self._eu, other._eu)
            and np.array_equal(self._ev, other._ev)
            and np.array_equal(self._em, other._em)
        )

    def __hash__(self):
        return hash((self.n, self.edge_count, self._eu.tobytes(), self._ev.tobytes()))

    def neighbors(self, v: int) -> np.ndarray:
        return self.indices[self.indptr[v] : self.indptr[v + 1]]

    def adjacency(self, v: int) -> list[tuple[int, int]]:
        """``[(neighbour, multiplicity), ...]`` for vertex ``v``."""
        lo, hi = self.indptr[v], self.indptr[v + 1]
        return list(zip(self.indices[lo:hi].tolist(), self.mult[lo:hi].tolist()))

    def edge_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Distinct edges as ``(u, v, multiplicity)`` arrays with ``u <= v``."""
        return self._eu, self._ev, self._em

    def edges(self) -> list[tuple[int, int]]:
        """All edges with ``u <= v``, repeated by multiplicity, sorted."""
        reps = np.repeat(np.arange(len(self._eu)), self._em)
        return list(zip(self._eu[reps].tolist(), self._ev[reps].tolist()))

    @cached_property
    def weights(self) -> sp.csr_matrix:
        """Symmetric walk-weight matrix: multiplicity off the diagonal, twice
        the loop multiplicity on it. Row sums equal the degrees."""
        w = self.mult.astype(np.float64)
        rows = np.repeat(np.arange(self.n), np.diff(self.indptr))
        w = np.where(rows == self.indices, 2.0 * w, w)
        return sp.csr_matrix((w, self.indices, self.indptr), shape=(self.n, self.n))

    @cached_property
    def slots(self) -> tuple[np.ndarray, np.ndarray]:
        """Half-edge table ``(slot_ptr, slot_nbr)``: row ``v`` holds one entry
        per unit of degree, so a uniform slot is a uniform exit edge."""
        w = self.weights
        reps = w.data.astype(np.int64)
        nbr = np.repeat(self.indices, reps)
        return _frozen(np.concatenate([[0], np.cumsum(self.degree)])), _frozen(nbr)

    @cached_property
    def adjacency_lists(self) -> list[list[int]]:
        """Python neighbour lists (distinct neighbours), for traversal loops."""
        ind = self.indices.tolist()
        ptr = self.indptr.tolist()
        return [ind[ptr[v] : ptr[v + 1]] for v in range(self.n)]


def build_graph(n: int, edges, allow_multi: bool = False) -> Graph:
    """Build a :class:`Graph` on ``n`` vertices from a sequence of pairs.

    ``edges`` may be any iterable of pairs or an ``(m, 2)`` integer array.
    With ``allow_multi=False`` loops and repeated pairs raise
    :class:`GraphError` naming the offending edge.
    """
    n = int(n)
    if n < 0:
        raise GraphError(f"vertex count must be non-negative, got {n}")
    arr = np.asarray(edges, dtype=np.int64)
    if arr.size == 0:
        arr = arr.reshape(0, 2)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise GraphError("edges must be a sequence of vertex pairs")
    bad = (arr < 0) | (arr >= n)
    if bad.any():
        i = int(np.flatnonzero(bad.any(axis=1))[0])
        raise GraphError(f"edge {tuple(arr[i].tolist())} has a vertex outside [0, {n})")
    u = np.minimum(arr[:, 0], arr[:, 1])
    v = np.maximum(arr[:, 0], arr[:, 1])
    if not allow_multi:
        loops = np.flatnonzero(u == v)
        if len(loops):
            i = int(loops[0])
            raise GraphError(f"loop {tuple(arr[i].tolist())} not allowed in a simple graph")
    key = u * max(n, 1) + v
    uniq, first, counts = np.unique(key, return_index=True, return_counts=True)
    if not allow_multi and (counts > 1).any():
        i = int(first[np.flatnonzero(counts > 1)[0]])
        raise GraphError(f"duplicate edge {tuple(arr[i].tolist())} not allowed in a simple graph")
    eu = (uniq // max(n, 1)).astype(np.int64)
    ev = (uniq % max(n, 1)).astype(np.int64)
    return Graph(n, eu, ev, counts.astype(np.int64), allow_multi)


def as_mask(g: Graph, members) -> np.ndarray:
    """Boolean membership mask of length ``g.n`` from ids or a mask."""
    if isinstance(members, VertexSubset):
        return members.mask
    a = members if isinstance(members, np.ndarray) else np.asarray(list(members))
    if a.dtype == bool:
        if a.shape != (g.n,):
            raise GraphError("boolean mask has the wrong length")
        return a
    a = a.astype(np.int64)
    if a.size and (a.min() < 0 or a.max() >= g.n):
        raise GraphError("subset contains a vertex outside the graph")
    mask = np.zeros(g.n, dtype=bool)
    mask[a] = True
    return mask


@dataclass(frozen=True, eq=False)
class VertexSubset:
    """A vertex set with its cached edge counts.

    ``total_degree == 2 * e_in + e_out`` by construction.
    """

    mask: np.ndarray
    e_in: int
    e_out: int
    total_degree: int

    @property
    def members(self) -> np.ndarray:
        return np.flatnonzero(self.mask)

    def __len__(self):
        return int(self.mask.sum())


def subset_stats(g: Graph, members) -> VertexSubset:
    """``e(S)``, ``e_out(S)`` and ``d(S)`` for the vertex set ``members``."""
    mask = as_mask(g, members).copy()
    mask.flags.writeable = False
    eu, ev, em = g.edge_arrays()
    iu, iv = mask[eu], mask[ev]
    e_in = int(em[iu & iv].sum())
    e_out = int(em[iu ^ iv].sum())
    return VertexSubset(mask, e_in, e_out, int(g.degree[mask].sum()))


class BipartiteCheck(NamedTuple):
    bipartite: bool
    odd_walk: list[int] | None  # closed walk v0, v1, ..., v0 of odd length


def _component_bfs(g: Graph, comp: np.ndarray):
    """BFS over ``comp`` from its least vertex; returns (parent, depth, order)."""
    nbrs = g.adjacency_lists
    root = int(comp.min())
    parent = {root: -1}
    depth = {root: 0}
    order = [root]
    q = deque([root])
    while q:
        x = q.popleft()
        for y in nbrs[x]:
            if y not in parent:
                parent[y] = x
                depth[y] = depth[x] + 1
                order.append(y)
                q.append(y)
    return parent, depth, order


def is_bipartite(g: Graph, component) -> BipartiteCheck:
    """Two-colour a connected component; on failure return an odd closed walk."""
    comp = np.flatnonzero(as_mask(g, component))
    if comp.size == 0:
        raise GraphError("empty component")
    parent, depth, order = _component_bfs(g, comp)
    if len(order) != comp.size or not set(order) == set(comp.tolist()):
        raise GraphError("vertex set is not a connected component")
    nbrs = g.adjacency_lists
    for x in order:
        for y in nbrs[x]:
            if x == y:
                return BipartiteCheck(False, [x, x])
            if depth[x] % 2 == depth[y] % 2:
                return BipartiteCheck(False, _odd_walk(parent, depth, x, y))
    return BipartiteCheck(True, None)


def _odd_walk(parent, depth, x, y):
    # climb to the common ancestor; the two tree paths plus edge (x, y) close an odd cycle
    left, right = [x], [y]
    a, b = x, y
    while a != b:
        if depth[a] >= depth[b]:
            a = parent[a]
            left.append(a)
        else:
            b = parent[b]
            right.append(b)
    # left ends at lca, right ends at lca
    return left + right[-2::-1] + [x]


def format_edgelist(g: Graph) -> str:
    lines = [f"{g.n} {g.edge_count}"]
    lines.extend(f"{u} {v}" for u, v in g.edges())
    return "\n".join(lines) + "\n"


def write_edgelist(g: Graph, path) -> None:
    Path(path).write_text(format_edgelist(g))


def parse_edgelist(text: str, allow_multi: bool | None = None) -> Graph:
    """Parse the ``n m`` + ``u v`` lines format; lines starting with ``#``
    are comments."""
    tokens = " ".join(line for line in text.splitlines() if not line.lstrip().startswith("#")).split()
    if len(tokens) < 2:
        raise GraphError("edge list must start with 'n m'")
    n, m = int(tokens[0]), int(tokens[1])
    body = np.array(tokens[2:], dtype=np.int64)
    if body.size != 2 * m:
        raise GraphError(f"header declares {m} edges, found {body.size / 2:g}")
    pairs = body.reshape(m, 2)
    if allow_multi is None:
        lo, hi = np.minimum(pairs[:, 0], pairs[:, 1]), np.maximum(pairs[:, 0], pairs[:, 1])
        keys = lo * max(n, 1) + hi
        allow_multi = bool((lo == hi).any() or len(np.unique(keys)) != m)
    return build_graph(n, pairs, allow_multi=allow_multi)


def read_edgelist(path, allow_multi: bool | None = None) -> Graph:
    """Load the ``n m`` + ``u v`` lines format. Multigraph mode is inferred
    from the data unless ``allow_multi`` is given."""
    return parse_edgelist(Path(path).read_text(), allow_multi)


def component_edge_total(g: Graph, comp: Sequence[int] | np.ndarray) -> int:
    """Twice the number of edges inside a component (its volume)."""
    return int(g.degree[np.asarray(comp, dtype=np.int64)].sum())
