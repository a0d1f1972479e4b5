"""Structural decomposition of a graph around its giant component.

The 2-core of a vertex set is what survives repeated deletion of vertices
of degree at most one. Everything the core deletes from the giant falls
into trees ("decorations"), each hanging off a single core vertex. Long
chains of degree-2 vertices between branch points are collected separately
since they are where a random walk gets stuck.
"""

from __future__ import annotations

import json
import random
from collections import Counter, deque
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse.csgraph as csgraph

from .graph import Graph, as_mask

__all__ = [
    "DecompositionError",
    "RootedTree",
    "Degree2Paths",
    "DecompositionReport",
    "components",
    "two_core",
    "decorations",
    "dangling_trees",
    "dangling_mass",
    "degree2_paths",
    "decompose",
    "bfs_ball",
]


class DecompositionError(RuntimeError):
    """The input violates a structural fact the decomposition relies on."""


@dataclass(frozen=True)
class RootedTree:
    """A tree given by its vertex ids and a distinguished root.

    ``attachment`` is the core vertex the tree hangs from, or ``None`` for a
    tree that is a whole component. ``deepest`` is a vertex at maximum
    distance ``depth`` from the root.
    """

    root: int
    vertices: tuple[int, ...]
    attachment: int | None
    depth: int
    deepest: int

    @property
    def size(self) -> int:
        return len(self.vertices)


@dataclass(frozen=True)
class Degree2Paths:
    """Maximal paths whose interior vertices all have degree exactly two.

    Each path is a vertex sequence ``(a, x1, ..., xk, b)`` with
    ``deg(a), deg(b) >= 3``; an edge between two branch vertices is a path
    with empty interior. ``cycles`` holds components made only of degree-2
    vertices.
    """

    paths: tuple[tuple[int, ...], ...]
    cycles: tuple[tuple[int, ...], ...]

    @property
    def longest_interior(self) -> int:
        return max((len(p) - 2 for p in self.paths), default=0)

    def interior_lengths(self) -> list[int]:
        return [len(p) - 2 for p in self.paths]


@dataclass(frozen=True)
class DecompositionReport:
    components: list[np.ndarray]
    giant: int
    core: np.ndarray
    decorations: list[RootedTree]
    dangling_trees: list[RootedTree]
    degree2: Degree2Paths
    meta: dict = field(default_factory=dict)

    @property
    def giant_vertices(self) -> np.ndarray:
        return self.components[self.giant]

    @property
    def degree2_paths(self):
        return self.degree2.paths

    def summary(self) -> dict:
        """JSON-ready digest: sizes and histograms."""

        def hist(values):
            return {str(k): v for k, v in sorted(Counter(values).items())}

        return {
            "component_sizes": [int(len(c)) for c in self.components],
            "giant_size": int(len(self.giant_vertices)),
            "core_size": int(len(self.core)),
            "decoration_sizes": hist(t.size for t in self.decorations),
            "dangling_tree_sizes": hist(t.size for t in self.dangling_trees),
            "path_interior_lengths": hist(self.degree2.interior_lengths()),
            "pure_cycles": len(self.degree2.cycles),
            "longest_path": int(self.degree2.longest_interior),
        }

    def to_json(self, **extra) -> str:
        return json.dumps({**extra, **self.summary()}, indent=2, sort_keys=True)


def components(g: Graph) -> list[np.ndarray]:
    """Connected components, largest first; ties by smallest vertex id."""
    if g.n == 0:
        return []
    _, labels = csgraph.connected_components(g.weights, directed=False)
    order = np.argsort(labels, kind="stable")
    cuts = np.flatnonzero(np.diff(labels[order])) + 1
    comps = np.split(order, cuts)
    comps.sort(key=lambda c: (-len(c), int(c[0])))
    return comps


def two_core(g: Graph, within=None, order: str | int = "fifo") -> np.ndarray:
    """Vertices of the 2-core of the subgraph induced by ``within``.

    Peels degree-<=1 vertices with a queue. ``order`` may be an integer
    seed to shuffle the processing order; the result does not depend on it.
    """
    alive = np.ones(g.n, dtype=bool) if within is None else as_mask(g, within).copy()
    deg = np.zeros(g.n, dtype=np.int64)
    if g.n:
        w = g.weights
        deg = np.asarray(w @ alive.astype(np.float64)).astype(np.int64)
        deg[~alive] = 0
    nbrs = g.adjacency_lists
    mult = g.mult.tolist()
    ptr = g.indptr.tolist()
    start = np.flatnonzero(alive & (deg <= 1)).tolist()
    shuffle = None
    if order != "fifo":
        shuffle = random.Random(order)
        shuffle.shuffle(start)
    queue = deque(start)
    queued = set(start)
    degl = deg.tolist()
    alivel = alive.tolist()
    while queue:
        if shuffle is not None and len(queue) > 1:
            k = shuffle.randrange(len(queue))
            queue.rotate(-k)
        x = queue.popleft()
        alivel[x] = False
        base = ptr[x]
        for k, y in enumerate(nbrs[x]):
            if y == x or not alivel[y]:
                continue
            degl[y] -= mult[base + k]
            if degl[y] <= 1 and y not in queued:
                queued.add(y)
                queue.append(y)
    return np.flatnonzero(np.array(alivel, dtype=bool))


def _tree_info(nbrs, verts: set[int], root: int):
    depth = {root: 0}
    q = deque([root])
    far = root
    while q:
        x = q.popleft()
        if depth[x] > depth[far]:
            far = x
        for y in nbrs[x]:
            if y in verts and y not in depth:
                depth[y] = depth[x] + 1
                q.append(y)
    return depth[far], far


def _pieces(g: Graph, mask: np.ndarray) -> list[np.ndarray]:
    """Components of the subgraph induced by ``mask``."""
    idx = np.flatnonzero(mask)
    if idx.size == 0:
        return []
    sub = g.weights[idx][:, idx]
    _, labels = csgraph.connected_components(sub, directed=False)
    order = np.argsort(labels, kind="stable")
    cuts = np.flatnonzero(np.diff(labels[order])) + 1
    parts = [idx[p] for p in np.split(order, cuts)]
    parts.sort(key=lambda c: int(c[0]))
    return parts


def _central_root(g: Graph, verts: np.ndarray) -> int:
    d = g.degree[verts]
    return int(verts[np.flatnonzero(d == d.max())[0]])


def decorations(g: Graph, giant, core) -> list[RootedTree]:
    """Trees of ``giant - core``, each rooted at its vertex adjacent to the core.

    If the core is empty the giant itself is a tree; it is returned as a
    single decoration with no attachment, rooted at a vertex of maximum
    degree, so that sizes still add up to ``|giant| - |core|``.
    """
    gmask = as_mask(g, giant)
    cmask = as_mask(g, core)
    rest = gmask & ~cmask
    nbrs = g.adjacency_lists
    mult = g.mult
    ptr = g.indptr
    out = []
    for piece in _pieces(g, rest):
        verts = set(piece.tolist())
        contacts = []
        for x in piece.tolist():
            for k, y in enumerate(nbrs[x]):
                if cmask[y]:
                    contacts.append((x, y, int(mult[ptr[x] + k])))
        if not contacts:
            if cmask.any():
                raise DecompositionError(f"tree containing vertex {int(piece[0])} is not attached to the core")
            root = _central_root(g, piece)
            attach = None
        else:
            if len(contacts) != 1 or contacts[0][2] != 1:
                raise DecompositionError(
                    f"tree containing vertex {int(piece[0])} meets the core at {len(contacts)} places; "
                    "core argument is not the 2-core of the giant"
                )
            root, attach, _ = contacts[0]
        depth, far = _tree_info(nbrs, verts, root)
        out.append(RootedTree(int(root), tuple(piece.tolist()), attach, depth, int(far)))
    return out


def dangling_trees(g: Graph) -> list[RootedTree]:
    """All maximal dangling trees of ``g``.

    A tree hanging off the 2-core is rooted at its core attachment vertex;
    its ``vertices`` are the hanging (non-root) vertices, merged over all
    trees attached to the same core vertex. A component that is a tree is
    rooted at its vertex of maximum degree (smallest id on ties) and lists
    all its vertices.
    """
    core_mask = np.zeros(g.n, dtype=bool)
    core_mask[two_core(g)] = True
    nbrs = g.adjacency_lists
    by_attach: dict[int, list[int]] = {}
    whole = []
    for piece in _pieces(g, ~core_mask):
        contact = None
        for x in piece.tolist():
            for y in nbrs[x]:
                if core_mask[y]:
                    contact = y
                    break
            if contact is not None:
                break
        if contact is None:
            whole.append(piece)
        else:
            by_attach.setdefault(contact, []).extend(piece.tolist())
    out = []
    for piece in whole:
        root = _central_root(g, piece)
        verts = set(piece.tolist())
        depth, far = _tree_info(nbrs, verts, root)
        out.append(RootedTree(root, tuple(piece.tolist()), None, depth, int(far)))
    for attach, hanging in by_attach.items():
        verts = set(hanging) | {attach}
        depth, far = _tree_info(nbrs, verts, attach)
        out.append(RootedTree(attach, tuple(sorted(hanging)), attach, depth, int(far)))
    out.sort(key=lambda t: (-t.size, t.root))
    return out


def dangling_mass(trees, min_size: int) -> int:
    """Number of vertices lying in dangling trees of size ``min_size`` or more."""
    return sum(t.size for t in trees if t.size >= min_size)


def degree2_paths(g: Graph, within=None) -> Degree2Paths:
    """Maximal induced degree-2 paths between branch vertices (degree >= 3).

    Degrees are taken in ``g``. Paths are reported once each, oriented from
    the endpoint with the smaller id; parallel edges between branch
    vertices give one empty-interior path per copy.
    """
    inside = np.ones(g.n, dtype=bool) if within is None else as_mask(g, within)
    deg = g.degree.tolist()
    nbrs = g.adjacency_lists
    mult = g.mult.tolist()
    ptr = g.indptr.tolist()
    ins = inside.tolist()
    seen = [False] * g.n
    paths = []

    def other_exit(v, came_from):
        # degree-2 vertex: leave by the half-edge not just used
        slots = []
        for k, y in enumerate(nbrs[v]):
            slots.extend([y] * mult[ptr[v] + k])
        slots.remove(came_from)
        return slots[0]

    for a in range(g.n):
        if not ins[a] or deg[a] < 3:
            continue
        base = ptr[a]
        for k, b in enumerate(nbrs[a]):
            m = mult[base + k]
            if deg[b] >= 3:
                if a < b or a == b:
                    paths.extend([(a, b)] * m)
                continue
            for _ in range(m):
                if deg[b] != 2 or seen[b]:
                    break
                seq = [a]
                prev, cur = a, b
                while deg[cur] == 2 and not seen[cur]:
                    seen[cur] = True
                    seq.append(cur)
                    prev, cur = cur, other_exit(cur, prev)
                if deg[cur] >= 3:
                    seq.append(cur)
                    if seq[0] > seq[-1]:
                        seq.reverse()
                    paths.append(tuple(seq))
    cycles = []
    for v in range(g.n):
        if ins[v] and deg[v] == 2 and not seen[v]:
            comp = [v]
            seen[v] = True
            q = deque([v])
            pure = True
            while q:
                x = q.popleft()
                for y in nbrs[x]:
                    if deg[y] != 2:
                        pure = False
                    elif not seen[y]:
                        seen[y] = True
                        comp.append(y)
                        q.append(y)
            if pure:
                cycles.append(tuple(_cycle_order(comp, nbrs)))
    paths.sort()
    return Degree2Paths(tuple(paths), tuple(cycles))


def _cycle_order(comp, nbrs):
    start = min(comp)
    order = [start]
    prev, cur = None, start
    while True:
        nxt = [y for y in nbrs[cur] if y != prev and y != cur]
        if not nxt:
            break
        y = min(nxt) if prev is None else nxt[0]
        if y == start:
            break
        order.append(y)
        prev, cur = cur, y
    return order


def bfs_ball(g: Graph, root: int, size: int, within=None) -> np.ndarray:
    """The first ``size`` vertices reached by BFS from ``root`` (a connected set)."""
    inside = None if within is None else as_mask(g, within)
    nbrs = g.adjacency_lists
    seen = {root}
    order = [root]
    q = deque([root])
    while q and len(order) < size:
        x = q.popleft()
        for y in nbrs[x]:
            if y not in seen and (inside is None or inside[y]):
                seen.add(y)
                order.append(y)
                q.append(y)
                if len(order) >= size:
                    break
    return np.array(order, dtype=np.int64)


def decompose(g: Graph) -> DecompositionReport:
    """Full report: components, giant, its 2-core, decorations, dangling
    trees of the whole graph and the degree-2 path census of the giant."""
    comps = components(g)
    if not comps:
        empty = np.empty(0, dtype=np.int64)
        return DecompositionReport([], 0, empty, [], [], Degree2Paths((), ()))
    giant = comps[0]
    core = two_core(g, giant)
    return DecompositionReport(
        components=comps,
        giant=0,
        core=core,
        decorations=decorations(g, giant, core),
        dangling_trees=dangling_trees(g),
        degree2=degree2_paths(g, giant),
    )
