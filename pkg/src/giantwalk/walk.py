"""Simple and lazy random walks on one connected component.

Mixing times are computed by exact evolution of point-mass starts. Taking
the supremum over point masses only loses nothing: for a fixed ``t`` the map
``x0 -> d_TV(x0 P^t, pi)`` is convex, and every distribution is a convex
combination of point masses, so the maximum over all ``x0`` is attained at
one of them. The same argument applies to the time-averaged distribution
``(1/t) sum_{s<t} x0 P^s``, which is linear in ``x0``.

``d_TV(x0 P^t, pi)`` never increases with ``t`` because a stochastic matrix
contracts total variation and ``pi P = pi``. The first crossing below
``epsilon`` is therefore found by stepping once and checking the distance
after every step; the monotonicity is asserted along the way. The averaged
distance has no such guarantee, so for the Cesaro time the *first* horizon
below ``epsilon`` is reported.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .generators import RngSeed, _rng
from .graph import Graph, GraphError, as_mask, is_bipartite

__all__ = [
    "BudgetExceeded",
    "Distribution",
    "WalkConfig",
    "WalkResult",
    "stationary",
    "point_mass",
    "step",
    "tv_distance",
    "mixing_time",
    "cesaro_mixing_time",
    "mixing_report",
    "trajectory_escape_probability",
    "heuristic_worst_starts",
    "walk_report_json",
]

MONOTONE_SLACK = 1e-12


class BudgetExceeded(RuntimeError):
    """The exact computation would exceed its configured size or step budget."""


@dataclass(frozen=True, eq=False)
class Distribution:
    """Probability masses over ``support`` (sorted vertex ids).

    ``mass`` is a float array, or an object array of Fractions when built in
    exact mode.
    """

    support: np.ndarray
    mass: np.ndarray

    def __post_init__(self):
        if len(self.support) != len(self.mass):
            raise ValueError("support and mass lengths differ")

    def __getitem__(self, v):
        i = int(np.searchsorted(self.support, v))
        if i >= len(self.support) or self.support[i] != v:
            return 0
        return self.mass[i]

    def total(self):
        return sum(self.mass) if self.mass.dtype == object else float(self.mass.sum())


@dataclass(frozen=True)
class WalkConfig:
    """Walk parameters.

    ``starts`` is ``"all"``, an integer ``k`` (sample ``k`` start vertices
    with ``seed``), or an explicit sequence of vertex ids. ``max_vertices``
    and ``max_matvecs`` bound the exact evolution; a start evolved for one
    step costs one mat-vec.
    """

    laziness: float = 0.0
    epsilon: float = 1 / math.e
    starts: object = "all"
    seed: int = 0
    max_vertices: int = 200_000
    max_matvecs: int = 1_000_000
    block: int = 256

    def __post_init__(self):
        if not 0.0 <= self.laziness < 1.0:
            raise ValueError(f"laziness must lie in [0, 1), got {self.laziness}")
        if not 0.0 < self.epsilon < 1.0:
            raise ValueError(f"epsilon must lie in (0, 1), got {self.epsilon}")


@dataclass
class WalkResult:
    """Per-start crossing times and the final distance at each crossing."""

    kind: str
    times: dict[int, int]
    final_tv: dict[int, float]
    laziness: float
    epsilon: float
    matvecs: int
    meta: dict = field(default_factory=dict)

    @property
    def value(self) -> int:
        return max(self.times.values())

    @property
    def worst_start(self) -> int:
        return min(v for v, t in self.times.items() if t == self.value)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "value": self.value,
            "worst_start": self.worst_start,
            "laziness": self.laziness,
            "epsilon": self.epsilon,
            "step_budget": self.meta.get("max_matvecs"),
            "matvecs_used": self.matvecs,
            "per_start": [
                {"start": v, "t": self.times[v], "final_tv": self.final_tv[v]} for v in sorted(self.times)
            ],
        }


def _component_ids(g: Graph, component) -> np.ndarray:
    comp = np.flatnonzero(as_mask(g, component))
    if comp.size == 0:
        raise GraphError("empty component")
    return comp


def _check_connected(g: Graph, comp: np.ndarray) -> None:
    from .decompose import bfs_ball

    reach = bfs_ball(g, int(comp[0]), comp.size + 1, within=comp)
    if reach.size != comp.size:
        raise GraphError("vertex set is not connected")
    if int(g.degree[comp].sum()) != int(g.weights[comp][:, comp].sum()):
        raise GraphError("vertex set is not a whole component (edges leave it)")


def stationary(g: Graph, component, exact: bool = False) -> Distribution:
    """``pi_v = d(v) / (2 e*)`` on a connected component."""
    comp = _component_ids(g, component)
    _check_connected(g, comp)
    deg = g.degree[comp]
    vol = int(deg.sum())
    if vol == 0:
        raise GraphError("component has no edges; the walk is undefined")
    if exact:
        mass = np.array([Fraction(int(d), vol) for d in deg], dtype=object)
    else:
        mass = deg / vol
    return Distribution(comp, mass)


def point_mass(component: Sequence[int] | np.ndarray, v: int) -> Distribution:
    comp = np.sort(np.asarray(component, dtype=np.int64))
    mass = (comp == v).astype(np.float64)
    if mass.sum() != 1:
        raise GraphError(f"vertex {v} is not in the support")
    return Distribution(comp, mass)


def step(g: Graph, x: Distribution, laziness: float = 0.0) -> Distribution:
    """One step of the (lazy) walk: ``y = laziness x + (1 - laziness) x P``."""
    if not 0.0 <= laziness <= 1.0:
        raise ValueError("laziness must lie in [0, 1]")
    sup = x.support
    deg = g.degree[sup]
    if (deg == 0).any():
        raise GraphError(f"vertex {int(sup[np.flatnonzero(deg == 0)[0]])} is isolated; no step is defined")
    full = np.zeros(g.n)
    full[sup] = np.asarray(x.mass, dtype=np.float64) / deg
    moved = g.weights @ full
    leaked = moved.sum() - moved[sup].sum()
    if abs(leaked) > 1e-12:
        raise GraphError("support is not closed under adjacency; pass a whole component")
    y = laziness * np.asarray(x.mass, dtype=np.float64) + (1.0 - laziness) * moved[sup]
    return Distribution(sup, y)


def tv_distance(a: Distribution, b: Distribution):
    """Half the L1 distance, which equals ``max_A |a(A) - b(A)|`` (take
    ``A = {v : a_v > b_v}``)."""
    if len(a.support) != len(b.support) or not np.array_equal(a.support, b.support):
        raise ValueError("distributions have different supports")
    if a.mass.dtype == object or b.mass.dtype == object:
        return sum(abs(p - q) for p, q in zip(a.mass, b.mass)) / 2
    return 0.5 * float(np.abs(a.mass - b.mass).sum())


class _Chain:
    """Walk operator restricted to one component, in local indices."""

    def __init__(self, g: Graph, comp: np.ndarray, laziness: float):
        self.comp = comp
        self.w = g.weights[comp][:, comp].tocsr()
        deg = g.degree[comp].astype(np.float64)
        if (deg == 0).any():
            raise GraphError("component contains an isolated vertex")
        self.inv_deg = 1.0 / deg
        self.pi = deg / deg.sum()
        self.laziness = laziness

    def advance(self, Y: np.ndarray) -> np.ndarray:
        # columns of Y are distributions; the weight matrix is symmetric
        moved = self.w @ (Y * self.inv_deg[:, None])
        if self.laziness:
            moved *= 1.0 - self.laziness
            moved += self.laziness * Y
        return moved

    def tv(self, Y: np.ndarray) -> np.ndarray:
        return 0.5 * np.abs(Y - self.pi[:, None]).sum(axis=0)


def _resolve_starts(comp: np.ndarray, cfg: WalkConfig) -> list[int]:
    policy = cfg.starts
    if isinstance(policy, str):
        if policy != "all":
            raise ValueError(f"unknown start policy {policy!r}")
        return comp.tolist()
    if isinstance(policy, (int, np.integer)):
        k = int(policy)
        if k >= comp.size:
            return comp.tolist()
        rng = _rng(RngSeed(cfg.seed, ("starts",)))
        return sorted(rng.choice(comp, size=k, replace=False).tolist())
    starts = sorted(set(int(v) for v in policy))
    member = set(comp.tolist())
    missing = [v for v in starts if v not in member]
    if missing:
        raise GraphError(f"start vertex {missing[0]} is not in the component")
    return starts


def _prepare(g, component, cfg):
    comp = _component_ids(g, component)
    if comp.size > cfg.max_vertices:
        raise BudgetExceeded(f"component has {comp.size} vertices, budget is {cfg.max_vertices}")
    _check_connected(g, comp)
    return comp, _Chain(g, comp, cfg.laziness), _resolve_starts(comp, cfg)


def _run(g, component, cfg: WalkConfig, cesaro: bool) -> WalkResult:
    comp, chain, starts = _prepare(g, component, cfg)
    pos = {v: i for i, v in enumerate(comp.tolist())}
    times, final = {}, {}
    used = 0
    m = comp.size
    for lo in range(0, len(starts), cfg.block):
        ids = np.array(starts[lo : lo + cfg.block])
        Y = np.zeros((m, ids.size))
        Y[[pos[v] for v in ids.tolist()], np.arange(ids.size)] = 1.0
        acc = Y.copy() if cesaro else None
        prev_tv = chain.tv(Y)
        t = 0
        while ids.size:
            t += 1
            dist = chain.tv(acc / t if cesaro else Y)
            if not cesaro:
                if (dist > prev_tv + MONOTONE_SLACK).any():
                    raise AssertionError("total variation increased along an evolution")
                prev_tv = dist
            done = dist < cfg.epsilon
            if done.any():
                # the point mass itself is time 0 for T_mix; averages start at horizon 1
                for v, dv in zip(ids[done].tolist(), dist[done].tolist()):
                    times[v] = t if cesaro else t - 1
                    final[v] = dv
                keep = ~done
                ids, Y, prev_tv = ids[keep], Y[:, keep], prev_tv[keep]
                if cesaro:
                    acc = acc[:, keep]
                if not ids.size:
                    break
            used += ids.size
            if used > cfg.max_matvecs:
                raise BudgetExceeded(
                    f"{'Cesaro ' if cesaro else ''}mixing not reached within {cfg.max_matvecs} mat-vecs"
                )
            Y = chain.advance(Y)
            if cesaro:
                acc += Y
    return WalkResult(
        kind="t_mix_cesaro" if cesaro else "t_mix",
        times=times,
        final_tv=final,
        laziness=cfg.laziness,
        epsilon=cfg.epsilon,
        matvecs=used,
        meta={"max_matvecs": cfg.max_matvecs, "component_size": int(comp.size)},
    )


def mixing_report(g: Graph, component, cfg: WalkConfig | None = None, cesaro: bool = False) -> WalkResult:
    """Per-start crossing times for ``T_mix`` (or ``T'_mix`` if ``cesaro``)."""
    cfg = cfg or WalkConfig()
    if not cesaro and cfg.laziness == 0.0:
        check = is_bipartite(g, component)
        if check.bipartite:
            raise GraphError(
                "component is bipartite (it has no odd cycle), so the non-lazy walk is periodic "
                "and never mixes; use laziness > 0 or the Cesaro mixing time"
            )
    return _run(g, component, cfg, cesaro)


def mixing_time(g: Graph, component, cfg: WalkConfig | None = None) -> int:
    """``max`` over starts of ``min{t : d_TV(x0 P^t, pi) < epsilon}``."""
    return mixing_report(g, component, cfg, cesaro=False).value


def cesaro_mixing_time(g: Graph, component, cfg: WalkConfig | None = None) -> int:
    """``max`` over starts of the least horizon ``t >= 1`` at which the
    average of ``x0 P^s`` over ``s < t`` is within ``epsilon`` of ``pi``."""
    return mixing_report(g, component, cfg, cesaro=True).value


def trajectory_escape_probability(
    g: Graph, path: Sequence[int], t: int, walks: int, seed, laziness: float = 0.0
) -> float:
    """Fraction of ``walks`` simulated walks, started at the middle vertex of
    ``path``, that have not visited either end of ``path`` within ``t`` steps.

    For a path with an even number of vertices the middle is the lower-index
    one of the two central positions.
    """
    path = [int(v) for v in path]
    if len(path) < 3:
        raise ValueError("path needs at least three vertices")
    if t < 0 or walks <= 0:
        raise ValueError("t must be >= 0 and walks > 0")
    mid = path[(len(path) - 1) // 2]
    ends = np.array([path[0], path[-1]])
    if t == 0:
        return 1.0
    slot_ptr, slot_nbr = g.slots
    deg = g.degree
    rng = _rng(seed)
    pos = np.full(walks, mid, dtype=np.int64)
    alive = np.ones(walks, dtype=bool)
    for _ in range(t):
        idx = np.flatnonzero(alive)
        if not idx.size:
            break
        cur = pos[idx]
        pick = slot_ptr[cur] + (rng.random(idx.size) * deg[cur]).astype(np.int64)
        nxt = slot_nbr[pick]
        if laziness:
            stay = rng.random(idx.size) < laziness
            nxt = np.where(stay, cur, nxt)
        pos[idx] = nxt
        alive[idx[np.isin(nxt, ends)]] = False
    return float(alive.mean())


def heuristic_worst_starts(g: Graph, component, report, k: int, seed=0) -> list[int]:
    """Up to ``k`` likely slow starts in ``component``.

    Order: midpoints of the longest degree-2 paths, then the deepest
    vertices of the deepest decorations, then uniform samples.
    """
    comp = _component_ids(g, component)
    if k >= comp.size:
        return comp.tolist()
    member = set(comp.tolist())
    out: list[int] = []
    seen: set[int] = set()

    def take(v):
        if v in member and v not in seen and len(out) < k:
            seen.add(v)
            out.append(v)

    paths = sorted(
        (p for p in report.degree2.paths if len(p) > 2), key=lambda p: (-(len(p) - 2), p)
    )
    for p in paths:
        take(int(p[(len(p) - 1) // 2]))
    trees = sorted(report.decorations, key=lambda tr: (-tr.depth, tr.root))
    for tr in trees:
        if tr.depth > 0:
            take(int(tr.deepest))
    if len(out) < k:
        rng = _rng(RngSeed(int(seed), ("worst-starts",)))
        for v in rng.permutation(comp).tolist():
            take(v)
            if len(out) >= k:
                break
    return out


def walk_report_json(result: WalkResult, cesaro: WalkResult | None = None, **extra) -> str:
    body = {**extra, "t_mix": result.to_dict() if result else None}
    if cesaro is not None:
        body["t_mix_cesaro"] = cesaro.to_dict()
    return json.dumps(body, indent=2, sort_keys=True)
