"""Conductance of vertex sets, its minimum over connected sets, the dyadic
conductance profile, and the mixing-time bounds built from them.

For a connected component with volume ``D = 2 e*``::

    Q(S)   = e_out(S) / D
    pi(S)  = d(S) / D
    Phi(S) = Q(S) / (pi(S) pi(V - S)) = e_out(S) D / (d(S) (D - d(S)))

All exact routines work on these integers and return
:class:`~fractions.Fraction` values, so comparisons are exact.
"""

from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, NamedTuple, Sequence

import numpy as np
import scipy.sparse.csgraph as csgraph

from .generators import RngSeed, _rng
from .graph import Graph, GraphError, as_mask, subset_stats
from .walk import BudgetExceeded, _check_connected, _component_ids

__all__ = [
    "Conductance",
    "CutResult",
    "ScaleEntry",
    "ConductanceProfile",
    "DyadicBound",
    "q_of",
    "phi_of",
    "connected_subsets",
    "exact_min_conductance",
    "heuristic_min_conductance",
    "heuristic_candidates",
    "conductance_profile",
    "scale_count",
    "bound_lower",
    "bound_jerrum_sinclair",
    "bound_dyadic_sum",
    "talagrand_tail",
]


class Conductance(NamedTuple):
    phi: Fraction
    surrogate: Fraction  # e_out / d(S), within a factor 2 of phi when pi(S) <= 1/2


class CutResult(NamedTuple):
    phi: Fraction
    witness: tuple[int, ...]
    method: str


def _volume(g: Graph, comp: np.ndarray) -> int:
    return int(g.degree[comp].sum())


def _phi(e_out: int, d_s: int, vol: int) -> Fraction:
    return Fraction(e_out * vol, d_s * (vol - d_s))


def q_of(g: Graph, component, S) -> Fraction:
    """Stationary escape flow ``Q(S) = e_out(S) / (2 e*)`` of the component."""
    comp = _component_ids(g, component)
    st = subset_stats(g, S)
    if (st.mask & ~as_mask(g, comp)).any():
        raise GraphError("S is not contained in the component")
    return Fraction(st.e_out, _volume(g, comp))


def phi_of(g: Graph, component, S) -> Conductance:
    """``Phi(S)`` and the surrogate ``e_out(S) / (2 e(S) + e_out(S))``."""
    comp = _component_ids(g, component)
    st = subset_stats(g, S)
    if (st.mask & ~as_mask(g, comp)).any():
        raise GraphError("S is not contained in the component")
    vol = _volume(g, comp)
    if st.total_degree == 0 or st.total_degree == vol:
        raise GraphError("pi(S) must lie strictly between 0 and 1")
    return Conductance(_phi(st.e_out, st.total_degree, vol), Fraction(st.e_out, st.total_degree))


# ---------------------------------------------------------------- exact search


def _local_tables(g: Graph, comp: np.ndarray):
    pos = {v: i for i, v in enumerate(comp.tolist())}
    n = comp.size
    adj = [0] * n
    weight = [dict() for _ in range(n)]
    loops = [0] * n
    for i, v in enumerate(comp.tolist()):
        for u, m in g.adjacency(v):
            j = pos[u]
            if j == i:
                loops[i] = m
            else:
                adj[i] |= 1 << j
                weight[i][j] = m
    simple = all(m == 1 for w in weight for m in w.values()) and not any(loops)
    return adj, weight, loops, simple


def connected_subsets(g: Graph, component, max_volume: int | None = None, max_sets: int = 5_000_000):
    """Yield ``(bitmask, d(S), e(S))`` for every connected ``S`` in the
    component with ``d(S) <= max_volume``, each exactly once.

    Bit ``i`` of the mask is the ``i``-th smallest vertex of the component.
    Sets grow from their least vertex and only by vertices that are larger
    and not adjacent to an earlier member, so every set has one canonical
    growth sequence. Because ``d`` only grows along a sequence, branches over
    the volume cap are cut without losing any feasible set.
    """
    comp = _component_ids(g, component)
    n = comp.size
    adj, weight, loops, simple = _local_tables(g, comp)
    deg = g.degree[comp].tolist()
    cap = math.inf if max_volume is None else max_volume
    produced = 0

    def inner(w, S):
        if simple:
            return (adj[w] & S).bit_count()
        total, bits = 0, adj[w] & S
        while bits:
            low = bits & -bits
            total += weight[w][low.bit_length() - 1]
            bits ^= low
        return total

    for v in range(n):
        if deg[v] > cap:
            continue
        above = ~((1 << (v + 1)) - 1)
        stack = [(1 << v, adj[v] & above, adj[v] | (1 << v), deg[v], loops[v])]
        while stack:
            S, ext, nbh, d_s, e_in = stack.pop()
            produced += 1
            if produced > max_sets:
                raise BudgetExceeded(f"more than {max_sets} connected sets; use heuristic_min_conductance")
            yield S, d_s, e_in
            while ext:
                low = ext & -ext
                ext ^= low
                w = low.bit_length() - 1
                nd = d_s + deg[w]
                if nd > cap:
                    continue
                fresh = adj[w] & ~nbh & above
                stack.append((S | low, ext | fresh, nbh | adj[w], nd, e_in + inner(w, S) + loops[w]))


def _mask_to_tuple(mask: int, comp_list: list[int]) -> tuple[int, ...]:
    out = []
    while mask:
        low = mask & -mask
        out.append(comp_list[low.bit_length() - 1])
        mask ^= low
    return tuple(out)


def _better(a_num, a_den, wit_a, b_num, b_den, wit_b) -> bool:
    lhs, rhs = a_num * b_den, b_num * a_den
    return lhs < rhs or (lhs == rhs and wit_a < wit_b)


def exact_min_conductance(g: Graph, component, size_budget: int = 40) -> CutResult:
    """Minimum of ``Phi(S)`` over connected ``S`` with ``0 < pi(S) <= 1/2``.

    The witness is the lexicographically least minimiser (as a sorted tuple
    of vertex ids). Components larger than ``size_budget`` are refused.
    """
    comp = _component_ids(g, component)
    if comp.size > size_budget:
        raise BudgetExceeded(
            f"component has {comp.size} vertices, exact budget is {size_budget}; "
            "use heuristic_min_conductance"
        )
    _check_connected(g, comp)
    vol = _volume(g, comp)
    if comp.size < 2 or vol == 0:
        raise GraphError("need a connected component with at least two vertices")
    comp_list = comp.tolist()
    best = None
    for S, d_s, e_in in connected_subsets(g, comp, max_volume=vol // 2):
        e_out = d_s - 2 * e_in
        num, den = e_out * vol, d_s * (vol - d_s)
        if best is None:
            best = (num, den, _mask_to_tuple(S, comp_list))
            continue
        lhs, rhs = num * best[1], best[0] * den
        if lhs < rhs:
            best = (num, den, _mask_to_tuple(S, comp_list))
        elif lhs == rhs:
            wit = _mask_to_tuple(S, comp_list)
            if wit < best[2]:
                best = (num, den, wit)
    return CutResult(Fraction(best[0], best[1]), best[2], "exact")


# ------------------------------------------------------------ heuristic search


def _prefix_stats(g: Graph, order: np.ndarray):
    """``d`` and ``e_out`` of every prefix of a vertex ordering."""
    rank = np.full(g.n, -1, dtype=np.int64)
    rank[order] = np.arange(order.size)
    eu, ev, em = g.edge_arrays()
    ru, rv = rank[eu], rank[ev]
    both = (ru >= 0) & (rv >= 0)
    closes = np.maximum(ru[both], rv[both])
    e_in = np.cumsum(np.bincount(closes, weights=em[both], minlength=order.size))
    d = np.cumsum(g.degree[order])
    return d.astype(np.int64), (d - 2 * e_in).astype(np.int64)


def _bfs_order(g: Graph, sub, local_root: int) -> np.ndarray:
    return csgraph.breadth_first_order(sub, local_root, directed=False, return_predecessors=False)


class _Candidates:
    """Collects candidate connected sets; keeps the best per family and per
    dyadic scale."""

    def __init__(self, g: Graph, comp: np.ndarray, num_scales: int):
        self.g = g
        self.comp = comp
        self.vol = _volume(g, comp)
        self.best: dict[str, tuple] = {}
        self.scales: dict[int, tuple] = {}
        self.num_scales = num_scales
        self.sets: list[tuple[int, ...]] = []

    def _offer(self, family, num, den, wit, d_s):
        cur = self.best.get(family)
        if cur is None or _better(num, den, wit, cur[0], cur[1], cur[2]):
            self.best[family] = (num, den, wit)
        for j in _scales_of(d_s, self.vol, self.num_scales):
            cur = self.scales.get(j)
            if cur is None or _better(num, den, wit, cur[0], cur[1], cur[2]):
                self.scales[j] = (num, den, wit)

    def add_order(self, family: str, order: np.ndarray, connected_prefixes: bool):
        """Offer every prefix of ``order`` (global ids) with ``pi <= 1/2``."""
        d, e_out = _prefix_stats(self.g, order)
        ok = (2 * d <= self.vol) & (d > 0)
        if not ok.any():
            return
        idx = np.flatnonzero(ok)
        phi = e_out[idx] * self.vol / (d[idx] * (self.vol - d[idx]))
        if connected_prefixes:
            lv, lv2 = _scale_arrays(d[idx], self.vol, self.num_scales)
            keep = {int(idx[np.argmin(phi)])}
            for levels in (lv, lv2):
                for j in np.unique(levels[levels > 0]):
                    sel = levels == j
                    keep.add(int(idx[sel][np.argmin(phi[sel])]))
            for k in sorted(keep):
                dk = int(d[k])
                wit = tuple(sorted(order[: k + 1].tolist()))
                self._offer(family, int(e_out[k]) * self.vol, dk * (self.vol - dk), wit, dk)
        else:
            for k in idx[np.argsort(phi, kind="stable")[:8]]:
                for part in _split_components(self.g, order[: k + 1]):
                    self.add_set(family, part)

    def add_set(self, family: str, members):
        st = subset_stats(self.g, members)
        d_s = st.total_degree
        if d_s == 0 or 2 * d_s > self.vol:
            return
        wit = tuple(np.flatnonzero(st.mask).tolist())
        self._offer(family, st.e_out * self.vol, d_s * (self.vol - d_s), wit, d_s)


def _scales_of(d_s: int, vol: int, num_scales: int) -> list[int]:
    """Dyadic levels ``j`` in ``1..num_scales`` with ``2^-(j+1) <= d_s/vol <= 2^-j``."""
    if d_s <= 0 or 2 * d_s > vol:
        return []
    j = (vol // d_s).bit_length() - 1
    out = []
    if 1 <= j <= num_scales and (vol <= (d_s << (j + 1))) and ((d_s << j) <= vol):
        out.append(j)
    if vol == (d_s << j) and 1 <= j - 1 <= num_scales:
        out.insert(0, j - 1)
    return out


def _scale_arrays(d: np.ndarray, vol: int, num_scales: int):
    """Vectorised :func:`_scales_of`: primary level per entry and the second
    level for masses that sit exactly on a dyadic boundary (0 = none)."""
    j = np.floor(np.log2(vol / d)).astype(np.int64)
    j[(d << (j + 1)) <= vol] += 1
    j[(d << j) > vol] -= 1
    second = np.where((d << j) == vol, j - 1, 0)
    j = np.where((j >= 1) & (j <= num_scales), j, 0)
    second = np.where((second >= 1) & (second <= num_scales), second, 0)
    return j, second


def _split_components(g: Graph, members: np.ndarray) -> list[np.ndarray]:
    idx = np.sort(np.asarray(members, dtype=np.int64))
    sub = g.weights[idx][:, idx]
    k, labels = csgraph.connected_components(sub, directed=False)
    if k == 1:
        return [idx]
    return [idx[labels == c] for c in range(k)]


def _second_vector(g: Graph, comp: np.ndarray, seed, iters: int = 500, tol: float = 1e-8) -> np.ndarray:
    """Approximate second eigenvector of the lazy walk, via power iteration
    on the symmetrised operator with the stationary direction projected out."""
    w = g.weights[comp][:, comp].tocsr()
    deg = g.degree[comp].astype(np.float64)
    s = np.sqrt(deg)
    top = s / np.linalg.norm(s)
    inv_s = 1.0 / s
    rng = _rng(seed)
    u = rng.standard_normal(comp.size)
    u -= top * (top @ u)
    u /= np.linalg.norm(u)
    for _ in range(iters):
        au = 0.5 * (u + inv_s * (w @ (inv_s * u)))
        au -= top * (top @ au)
        lam = u @ au
        resid = np.linalg.norm(au - lam * u)
        nrm = np.linalg.norm(au)
        if nrm == 0:
            break
        u = au / nrm
        if resid < tol:
            break
    return u * inv_s


def _path_cut_sides(g: Graph, comp_mask: np.ndarray, path: Sequence[int]):
    """Cut the middle edge of ``path``; if that disconnects the component,
    return the side containing the first half and its BFS order from the cut."""
    L = len(path)
    h = (L - 1) // 2 if L > 2 else 0
    a, b = int(path[h]), int(path[h + 1])
    if a == b:
        return None
    nbrs = g.adjacency_lists
    m = dict(g.adjacency(a)).get(b, 0)
    if m != 1:
        return None
    seen = {a}
    order = [a]
    q = deque([a])
    while q:
        x = q.popleft()
        for y in nbrs[x]:
            if (x == a and y == b) or (x == b and y == a):
                continue
            if y not in seen and comp_mask[y]:
                seen.add(y)
                order.append(y)
                q.append(y)
    if b in seen:
        return None
    return np.array(order, dtype=np.int64)


def heuristic_candidates(
    g: Graph,
    component,
    report=None,
    seed=0,
    roots: int = 32,
    path_limit: int = 16,
    num_scales: int | None = None,
) -> _Candidates:
    """Run the three candidate families and collect per-family and per-scale
    minima. ``roots`` BFS roots are sampled (all vertices if the component
    has at most ``2 * roots``)."""
    comp = _component_ids(g, component)
    _check_connected(g, comp)
    vol = _volume(g, comp)
    if num_scales is None:
        num_scales = scale_count(int(g.degree[comp].min()), vol)
    cands = _Candidates(g, comp, num_scales)
    comp_mask = as_mask(g, comp)
    sub = g.weights[comp][:, comp].tocsr()
    pos = {v: i for i, v in enumerate(comp.tolist())}
    seed = seed if isinstance(seed, RngSeed) else RngSeed(int(seed))
    rng = _rng(seed.child("roots"))

    paths = []
    if report is not None:
        paths = [p for p in report.degree2.paths if len(p) > 2 and comp_mask[p[0]] and comp_mask[p[-1]]]
        paths.sort(key=lambda p: (-(len(p) - 2), p))
        paths = paths[:path_limit]

    # (a) BFS-ball sweeps
    if comp.size <= 2 * roots:
        root_list = comp.tolist()
    else:
        root_list = sorted(rng.choice(comp, size=roots, replace=False).tolist())
    root_list += [int(p[(len(p) - 1) // 2]) for p in paths]
    for r in dict.fromkeys(root_list):
        order = comp[_bfs_order(g, sub, pos[r])]
        cands.add_order("bfs", order, connected_prefixes=True)

    # (b) spectral sweep
    if comp.size >= 2:
        f = _second_vector(g, comp, seed.child("power"))
        asc = comp[np.argsort(f, kind="stable")]
        cands.add_order("spectral", asc, connected_prefixes=False)
        cands.add_order("spectral", asc[::-1].copy(), connected_prefixes=False)

    # (c) degree-2 path half-segments
    for p in paths:
        side = _path_cut_sides(g, comp_mask, p)
        if side is not None:
            cands.add_set("path", side)
            rest = comp[~np.isin(comp, side)]
            cands.add_set("path", rest)
            cands.add_order("path", side, connected_prefixes=True)
        interior = np.array(p[1:-1], dtype=np.int64)
        mid = (len(interior) - 1) // 2
        seg_order = [interior[mid]]
        lo, hi = mid - 1, mid + 1
        while lo >= 0 or hi < len(interior):
            if lo >= 0:
                seg_order.append(interior[lo])
                lo -= 1
            if hi < len(interior):
                seg_order.append(interior[hi])
                hi += 1
        cands.add_order("path", np.array(seg_order, dtype=np.int64), connected_prefixes=True)
    return cands


def heuristic_min_conductance(g: Graph, component, report=None, seed=0, **kw) -> CutResult:
    """Upper bound on the minimum conductance from BFS sweeps, a spectral
    sweep and degree-2 path cuts; ``method`` names the winning family."""
    cands = heuristic_candidates(g, component, report, seed, **kw)
    best = None
    for family in ("bfs", "spectral", "path"):
        cur = cands.best.get(family)
        if cur is None:
            continue
        if best is None or _better(cur[0], cur[1], cur[2], best[0], best[1], best[2]):
            best = (*cur, family)
    if best is None:
        raise GraphError("no candidate set with 0 < pi(S) <= 1/2")
    return CutResult(Fraction(best[0], best[1]), best[2], best[3])


# ------------------------------------------------------------------- profile


def scale_count(min_degree: int, volume: int) -> int:
    """``ceil(log2(1 / pi_min))`` with ``pi_min = min_degree / volume``."""
    return scale_count_from_pi(Fraction(min_degree, volume))


@dataclass(frozen=True)
class ScaleEntry:
    j: int
    phi: Fraction
    witness: tuple[int, ...]
    method: str

    @property
    def pi_low(self) -> Fraction:
        return Fraction(1, 2 ** (self.j + 1))

    @property
    def pi_high(self) -> Fraction:
        return Fraction(1, 2**self.j)

    def to_dict(self) -> dict:
        return {
            "j": self.j,
            "pi_low": float(self.pi_low),
            "pi_high": float(self.pi_high),
            "phi": float(self.phi),
            "method": self.method,
            "witness_size": len(self.witness),
        }


@dataclass(frozen=True)
class ConductanceProfile:
    """Best conductance found at each dyadic stationary-mass level."""

    scales: tuple[ScaleEntry, ...]
    pi_min: Fraction
    global_phi: Fraction
    global_witness: tuple[int, ...]
    global_method: str
    meta: dict = field(default_factory=dict)

    @property
    def num_scales(self) -> int:
        return len(self.scales)

    def verify(self, g: Graph, component) -> None:
        """Recheck every witness against the definitions; raise on mismatch."""
        comp = _component_ids(g, component)
        vol = _volume(g, comp)
        for s in self.scales:
            if s.method == "default-1":
                if s.witness or s.phi != 1:
                    raise AssertionError(f"scale {s.j}: default entry must be 1 with no witness")
                continue
            st = subset_stats(g, s.witness)
            pi = Fraction(st.total_degree, vol)
            if not s.pi_low <= pi <= s.pi_high:
                raise AssertionError(f"scale {s.j}: witness mass {pi} outside [{s.pi_low}, {s.pi_high}]")
            if len(_split_components(g, np.array(s.witness))) != 1:
                raise AssertionError(f"scale {s.j}: witness is not connected")
            if _phi(st.e_out, st.total_degree, vol) != s.phi:
                raise AssertionError(f"scale {s.j}: stored conductance does not match the witness")

    def to_dict(self) -> dict:
        return {
            "pi_min": float(self.pi_min),
            "num_scales": self.num_scales,
            "phi_global": float(self.global_phi),
            "phi_global_method": self.global_method,
            "scales": [s.to_dict() for s in self.scales],
        }


def conductance_profile(
    g: Graph, component, report=None, budget: int = 20, seed=0, **kw
) -> ConductanceProfile:
    """Per-level minimum conductance of connected sets with
    ``2^-(j+1) <= pi(S) <= 2^-j`` for ``j = 1 .. ceil(log2 1/pi_min)``.

    Components of at most ``budget`` vertices are enumerated exactly; larger
    ones use the heuristic candidate families (values are upper bounds).
    Levels without any qualifying set get the value 1.
    """
    comp = _component_ids(g, component)
    _check_connected(g, comp)
    vol = _volume(g, comp)
    dmin = int(g.degree[comp].min())
    J = scale_count(dmin, vol)
    found: dict[int, tuple] = {}
    if comp.size <= budget:
        method = "exact"
        comp_list = comp.tolist()
        glob = None
        for S, d_s, e_in in connected_subsets(g, comp, max_volume=vol // 2):
            e_out = d_s - 2 * e_in
            num, den = e_out * vol, d_s * (vol - d_s)
            levels = _scales_of(d_s, vol, J)
            wit = None
            if glob is None or num * glob[1] <= glob[0] * den:
                wit = _mask_to_tuple(S, comp_list)
                if glob is None or _better(num, den, wit, *glob):
                    glob = (num, den, wit)
            for j in levels:
                cur = found.get(j)
                if cur is None or num * cur[1] <= cur[0] * den:
                    wit = wit or _mask_to_tuple(S, comp_list)
                    if cur is None or _better(num, den, wit, *cur):
                        found[j] = (num, den, wit)
        gmethod = "exact"
    else:
        method = "heuristic"
        cands = heuristic_candidates(g, comp, report, seed, num_scales=J, **kw)
        found = dict(cands.scales)
        glob, gmethod = None, "heuristic"
        for family in ("bfs", "spectral", "path"):
            cur = cands.best.get(family)
            if cur is not None and (glob is None or _better(*cur, *glob)):
                glob, gmethod = cur, f"heuristic:{family}"
    entries = []
    for j in range(1, J + 1):
        if j in found:
            num, den, wit = found[j]
            entries.append(ScaleEntry(j, Fraction(num, den), wit, method))
        else:
            entries.append(ScaleEntry(j, Fraction(1), (), "default-1"))
    if glob is None:
        raise GraphError("no connected set with 0 < pi(S) <= 1/2")
    prof = ConductanceProfile(
        tuple(entries), Fraction(dmin, vol), Fraction(glob[0], glob[1]), glob[2], gmethod, {"volume": vol}
    )
    prof.verify(g, comp)
    return prof


# -------------------------------------------------------------------- bounds


def bound_lower(g: Graph, component, candidates: Iterable) -> Fraction:
    """``max_S pi(S) / (10 Q(S)) = max_S d(S) / (10 e_out(S))`` over the
    candidate sets (each with ``0 < pi(S) <= 1/2``)."""
    comp = _component_ids(g, component)
    vol = _volume(g, comp)
    cmask = as_mask(g, comp)
    best = None
    for S in candidates:
        st = subset_stats(g, S)
        if (st.mask & ~cmask).any():
            raise GraphError("candidate is not inside the component")
        if st.total_degree == 0 or 2 * st.total_degree > vol:
            raise GraphError("candidate must satisfy 0 < pi(S) <= 1/2")
        if st.e_out == 0:
            raise GraphError("candidate has no boundary edge; the component is not connected")
        val = Fraction(st.total_degree, 10 * st.e_out)
        best = val if best is None else max(best, val)
    if best is None:
        raise ValueError("empty candidate list")
    return best


def bound_jerrum_sinclair(phi, pi_min, C: float = 1.0) -> float:
    """``C * Phi^-2 * ln(1 / pi_min)``; ``C`` is unknown and reported as given."""
    phi = float(phi)
    if not phi > 0:
        raise ValueError(f"conductance must be positive, got {phi}")
    if not 0 < float(pi_min) <= 1:
        raise ValueError("pi_min must lie in (0, 1]")
    return C * math.log(1.0 / float(pi_min)) / phi**2


@dataclass(frozen=True)
class DyadicBound:
    value: object  # C * sum_j Phi_j^-2, a Fraction when C is exact
    integral: float  # trapezoid estimate of the integral of dx / (x Phi(x)^2)
    C: object
    num_scales: int

    def to_dict(self) -> dict:
        return {
            "bound_dyadic": float(self.value),
            "integral_surrogate": self.integral,
            "C": float(self.C),
            "note": f"assuming C={self.C}; the constant is not known",
        }


def bound_dyadic_sum(profile: ConductanceProfile, C=1) -> DyadicBound:
    """``C * sum_{j=1..J} Phi(2^-j)^-2`` plus the integral surrogate over
    ``[pi_min / 2, 1/2]`` by the trapezoid rule on the dyadic grid."""
    J = scale_count_from_pi(profile.pi_min)
    js = [s.j for s in profile.scales]
    if js != list(range(1, J + 1)):
        raise ValueError(f"profile must cover scales 1..{J}, got {js}")
    total = sum((1 / (s.phi * s.phi) for s in profile.scales), Fraction(0))
    exact_c = isinstance(C, (int, Fraction))
    value = total * C if exact_c else float(total) * C
    xs = [float(profile.pi_min) / 2] + [2.0**-j for j in range(J, 0, -1)]
    phis = [float(profile.scales[-1].phi)] + [float(profile.scales[j - 1].phi) for j in range(J, 0, -1)]
    ys = [1.0 / (x * p * p) for x, p in zip(xs, phis)]
    integral = float(C) * float(np.trapezoid(ys, xs))
    return DyadicBound(value, integral, C, J)


def scale_count_from_pi(pi_min: Fraction) -> int:
    q = 1 / Fraction(pi_min)
    j = 0
    while (1 << j) < q:
        j += 1
    return j


def talagrand_tail(expectation: float, t: float, gamma: float = 1.0) -> float:
    """``4 exp(-gamma t^2 / (E + t))``; ``gamma`` is a free parameter."""
    if not t > 0:
        raise ValueError(f"t must be positive, got {t}")
    if not gamma > 0:
        raise ValueError(f"gamma must be positive, got {gamma}")
    if expectation < 0:
        raise ValueError("expectation must be non-negative")
    return 4.0 * math.exp(-gamma * t * t / (expectation + t))


def profile_json(profile: ConductanceProfile, bounds: dict, **extra) -> str:
    return json.dumps({**extra, "profile": profile.to_dict(), "bounds": bounds}, indent=2, sort_keys=True)
