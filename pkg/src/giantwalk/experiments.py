"""Seeded, replayable experiments on G(n, d/n).

Every record is a pure function of ``(experiment_id, cell, seed, replicate)``:
its random stream is ``RngSeed(seed, (experiment_id, n, d-label, replicate))``.
Records can be computed in any order, by any number of worker processes,
and the CSV is written sorted by ``(experiment, n, d, replicate)``.

Statements that hold "asymptotically almost surely" are checked as
frequencies over replicates, with the thresholds stored alongside the
results rather than treated as truth.
"""

from __future__ import annotations

import csv
import io
import json
import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Callable, Iterable, NamedTuple, Sequence

import numpy as np

from . import conductance as cond
from .decompose import bfs_ball, components, decompose, degree2_paths
from .generators import DegreeSequence, RngSeed, _rng, sample_configuration, sample_gnp
from .graph import Graph, build_graph, is_bipartite, subset_stats
from .walk import (
    BudgetExceeded,
    WalkConfig,
    heuristic_worst_starts,
    mixing_report,
    trajectory_escape_probability,
)

__all__ = [
    "CSV_FIELDS",
    "ExperimentRecord",
    "PredictorSet",
    "predictors",
    "TreeCount",
    "expected_tree_count",
    "run_path_census",
    "run_expansion_check",
    "run_scaling_study",
    "ScalingConfig",
    "CensusSummary",
    "ExpansionSummary",
    "ScalingSummary",
    "REGIMES",
    "obstruction_graph",
    "expander_blob",
    "ObstructionReport",
    "run_obstruction_demo",
    "regime_degree",
    "records_to_csv",
    "write_plot_data",
    "write_svg",
    "summary_json",
]

CSV_FIELDS = [
    "experiment_id",
    "n",
    "d",
    "p",
    "seed",
    "replicate",
    "giant_size",
    "core_size",
    "longest_path",
    "t_mix",
    "t_mix_cesaro",
    "phi_global",
    "bound_lower",
    "bound_js",
    "bound_dyadic",
    "censored",
]


@dataclass
class ExperimentRecord:
    experiment_id: str
    n: int
    d: float
    seed: int
    replicate: int
    metrics: dict = field(default_factory=dict)
    censored: bool = False
    label: str = ""

    @property
    def p(self) -> float:
        return self.d / self.n

    def sort_key(self):
        return (self.experiment_id, self.n, self.d, self.replicate)

    def row(self) -> dict:
        out = {
            "experiment_id": self.experiment_id,
            "n": self.n,
            "d": _fmt(self.d),
            "p": _fmt(self.p),
            "seed": self.seed,
            "replicate": self.replicate,
            "censored": int(self.censored),
        }
        for key in CSV_FIELDS:
            if key not in out:
                out[key] = _fmt(self.metrics.get(key))
        return out


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, Fraction):
        x = float(x)
    return repr(float(x))


def records_to_csv(records: Iterable[ExperimentRecord]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_FIELDS, lineterminator="\n")
    w.writeheader()
    for r in sorted(records, key=ExperimentRecord.sort_key):
        w.writerow(r.row())
    return buf.getvalue()


# ---------------------------------------------------------------- predictors


@dataclass(frozen=True)
class PredictorSet:
    local_obstruction: float  # (ln n / d)^2
    diameter_term: float  # ln n / ln d
    threshold_p: float  # sqrt(ln n ln ln n) / n
    path_lower: float  # ln n / (4 d)
    path_upper: float  # 10 ln n / d


def predictors(n: float, d: float) -> PredictorSet:
    if n < 3:
        raise ValueError("n must be at least 3")
    if d <= 1:
        raise ValueError(f"d = {d} is not supercritical; need d > 1")
    ln = math.log(n)
    return PredictorSet(
        local_obstruction=(ln / d) ** 2,
        diameter_term=ln / math.log(d),
        threshold_p=math.sqrt(ln * math.log(ln)) / n,
        path_lower=ln / (4 * d),
        path_upper=10 * ln / d,
    )


class TreeCount(NamedTuple):
    expected: float
    upper: float


def expected_tree_count(n: int, k: int, p: float) -> TreeCount:
    """Expected number of ``k``-vertex trees in G(n, p), i.e.
    ``C(n, k) k^(k-2) p^(k-1)`` (``k^(k-2) = 1`` at ``k = 1``), together with
    the cruder ``n (e d)^k`` with ``d = p n``."""
    if not 1 <= k <= n:
        raise ValueError("need 1 <= k <= n")
    log_binom = math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)
    log_trees = (k - 2) * math.log(k) if k > 1 else 0.0
    if p == 0:
        expected = float(n) if k == 1 else 0.0
    else:
        expected = math.exp(log_binom + log_trees + (k - 1) * math.log(p))
    d = p * n
    upper = n * (math.e * d) ** k
    return TreeCount(expected, upper)


# ------------------------------------------------------------ shared helpers


def _replicate_seed(seed: int, experiment: str, n: int, dlabel, replicate: int) -> RngSeed:
    return RngSeed(seed, (experiment, n, str(dlabel), replicate))


def _map(fn: Callable, tasks: list, workers: int) -> list:
    if workers <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, tasks))


def _giant(g: Graph):
    rep = decompose(g)
    return rep, rep.giant_vertices


# ---------------------------------------------------------------- path census


def _census_one(task) -> ExperimentRecord:
    n, d, seed, rep_id = task
    g = sample_gnp(n, d / n, _replicate_seed(seed, "paths", n, d, rep_id))
    giant = components(g)[0]
    paths = degree2_paths(g, giant)
    pr = predictors(n, d)
    longest = paths.longest_interior
    rec = ExperimentRecord("paths", n, d, seed, rep_id)
    rec.metrics = {
        "giant_size": int(giant.size),
        "longest_path": int(longest),
        "above_lower": longest >= pr.path_lower,
        "below_upper": longest <= pr.path_upper,
    }
    return rec


@dataclass
class CensusSummary:
    records: list[ExperimentRecord]
    path_lower: float
    path_upper: float
    frac_above_lower: float
    frac_below_upper: float
    above_lower: list[bool]
    below_upper: list[bool]


def run_path_census(n: int, d: float, replicates: int, seed: int, workers: int = 1) -> CensusSummary:
    """Longest induced degree-2 path interior in the giant, per replicate."""
    if d >= math.log(n) / 5:
        warnings.warn(f"d = {d} is outside the regime d < ln n / 5 = {math.log(n) / 5:.3f}", stacklevel=2)
    tasks = [(n, d, seed, r) for r in range(replicates)]
    recs = sorted(_map(_census_one, tasks, workers), key=ExperimentRecord.sort_key)
    pr = predictors(n, d)
    above = [bool(r.metrics["above_lower"]) for r in recs]
    below = [bool(r.metrics["below_upper"]) for r in recs]
    return CensusSummary(
        recs, pr.path_lower, pr.path_upper, sum(above) / len(recs), sum(below) / len(recs), above, below
    )


# ------------------------------------------------------------ expansion check


def _random_connected_growth(g: Graph, root: int, size: int, inside: np.ndarray, rng) -> np.ndarray:
    nbrs = g.adjacency_lists
    chosen = [root]
    member = {root}
    frontier = [y for y in nbrs[root] if inside[y] and y != root]
    while frontier and len(chosen) < size:
        i = int(rng.integers(len(frontier)))
        y = frontier[i]
        frontier[i] = frontier[-1]
        frontier.pop()
        if y in member:
            continue
        member.add(y)
        chosen.append(y)
        frontier.extend(z for z in nbrs[y] if inside[z] and z not in member)
    return np.array(chosen, dtype=np.int64)


def _expansion_one(task) -> ExperimentRecord:
    n, d, seed, rep_id, samples, c = task
    g = sample_gnp(n, d / n, _replicate_seed(seed, "expansion", n, d, rep_id))
    rng = _rng(_replicate_seed(seed, "expansion-sets", n, d, rep_id))
    rep, giant = _giant(g)
    inside = np.zeros(g.n, dtype=bool)
    inside[giant] = True
    core_mask = np.zeros(g.n, dtype=bool)
    core_mask[rep.core] = True
    vol = int(g.degree[giant].sum())
    min_size = max(1, math.ceil(c * math.log(n) / d))
    max_size = max(min_size, giant.size // 2)
    ratios_d, ratios_1, core_frac, dens = [], [], [], []
    skipped = 0
    for s in range(samples):
        root = int(giant[rng.integers(giant.size)])
        size = int(min(max_size, min_size * 2 ** rng.uniform(0, 6)))
        if s % 2 == 0:
            S = bfs_ball(g, root, size, within=inside)
        else:
            S = _random_connected_growth(g, root, size, inside, rng)
        st = subset_stats(g, S)
        if len(S) < min_size or 2 * st.total_degree > vol:
            skipped += 1
            continue
        ratios_d.append(st.e_out / (d * len(S)))
        ratios_1.append(st.e_out / len(S))
        core_frac.append(core_mask[S].mean())
        dens.append(st.total_degree / len(S))
    rec = ExperimentRecord("expansion", n, d, seed, rep_id)
    rec.metrics = {
        "giant_size": int(giant.size),
        "core_size": int(rep.core.size),
        "sets": len(ratios_d),
        "skipped": skipped,
        "min_eout_over_d_size": min(ratios_d) if ratios_d else None,
        "min_eout_over_size": min(ratios_1) if ratios_1 else None,
        "min_core_fraction": min(core_frac) if core_frac else None,
        "max_degree_density": max(dens) if dens else None,
        "violations": sum(1 for r in ratios_d if r <= 0),
    }
    return rec


@dataclass
class ExpansionSummary:
    records: list[ExperimentRecord]
    eps_hat: float  # min e_out / (d |S|)
    eps1_hat: float  # min e_out / |S|
    l_hat: float  # 1 / min core fraction
    L_hat: float  # max d(S) / |S|


def run_expansion_check(
    n: int, d: float, replicates: int, samples_per_graph: int, seed: int, c: float = 1.0, workers: int = 1
) -> ExpansionSummary:
    """Empirical edge expansion of sampled connected sets in the giant.

    Sets come from BFS balls and random connected growth, with
    ``|S| >= c ln n / d`` and ``d(S) <= d(H) / 2``. Fitted constants are
    reported, not tested against anything.
    """
    if d <= 1:
        raise ValueError("d must exceed 1")
    tasks = [(n, d, seed, r, samples_per_graph, c) for r in range(replicates)]
    recs = sorted(_map(_expansion_one, tasks, workers), key=ExperimentRecord.sort_key)

    def pick(key, fn):
        vals = [r.metrics[key] for r in recs if r.metrics[key] is not None]
        return fn(vals) if vals else float("nan")

    min_core = pick("min_core_fraction", min)
    return ExpansionSummary(
        recs,
        eps_hat=pick("min_eout_over_d_size", min),
        eps1_hat=pick("min_eout_over_size", min),
        l_hat=(1.0 / min_core) if min_core and min_core > 0 else float("inf"),
        L_hat=pick("max_degree_density", max),
    )


# -------------------------------------------------------------- scaling study

REGIMES = ("constant-d", "threshold", "dense")


def regime_degree(regime: str, n: int, d: float | None = None) -> float:
    ln = math.log(n)
    if regime == "constant-d":
        if d is None:
            raise ValueError("constant-d regime needs d")
        return float(d)
    if regime == "threshold":
        return math.sqrt(ln * math.log(ln))
    if regime == "dense":
        return 2 * ln
    raise ValueError(f"unknown regime {regime!r}; choose from {REGIMES}")


@dataclass(frozen=True)
class ScalingConfig:
    regime: str
    d: float | None = None
    worst_starts: int = 8
    sampled_starts: int = 8
    laziness: float = 0.0
    max_matvecs: int = 1_000_000
    max_vertices: int = 200_000
    all_starts_below: int = 0  # use every vertex as a start when the giant is this small
    profile_roots: int = 16
    C: int = 1


def _scaling_one(task) -> ExperimentRecord:
    n, cfg, seed, rep_id = task
    d = regime_degree(cfg.regime, n, cfg.d)
    label = cfg.regime if cfg.regime != "constant-d" else f"d={cfg.d}"
    rs = _replicate_seed(seed, "scaling", n, label, rep_id)
    g = sample_gnp(n, d / n, rs)
    rep, giant = _giant(g)
    rec = ExperimentRecord("scaling/" + cfg.regime, n, d, seed, rep_id, label=label)
    m = rec.metrics
    m["giant_size"] = int(giant.size)
    m["core_size"] = int(rep.core.size)
    m["longest_path"] = int(rep.degree2.longest_interior)
    pr = predictors(n, d)
    m["pred_local"] = pr.local_obstruction
    m["pred_diameter"] = pr.diameter_term
    if giant.size < 3:
        rec.censored = True
        return rec

    if giant.size <= cfg.all_starts_below:
        starts = "all"
    else:
        worst = heuristic_worst_starts(g, giant, rep, cfg.worst_starts, seed=rs.child("worst").seed)
        rng = _rng(rs.child("starts"))
        extra = rng.choice(giant, size=min(cfg.sampled_starts, giant.size), replace=False).tolist()
        starts = sorted(set(worst) | set(int(v) for v in extra))
    wc = WalkConfig(
        laziness=cfg.laziness, starts=starts, max_matvecs=cfg.max_matvecs, max_vertices=cfg.max_vertices
    )
    try:
        ces = mixing_report(g, giant, wc, cesaro=True)
        m["t_mix_cesaro"] = ces.value
    except BudgetExceeded:
        rec.censored = True
    try:
        if cfg.laziness == 0.0 and is_bipartite(g, giant).bipartite:
            raise BudgetExceeded("bipartite giant")
        plain = mixing_report(g, giant, wc, cesaro=False)
        m["t_mix"] = plain.value
    except BudgetExceeded:
        rec.censored = True

    cands = cond.heuristic_candidates(g, giant, rep, rs.child("phi"), roots=cfg.profile_roots)
    prof = cond.conductance_profile(g, giant, rep, budget=0, seed=rs.child("phi"), roots=cfg.profile_roots)
    m["phi_global"] = prof.global_phi
    witnesses = [c[2] for c in cands.best.values()] + [s.witness for s in prof.scales if s.witness]
    m["bound_lower"] = cond.bound_lower(g, giant, witnesses)
    m["bound_js"] = cond.bound_jerrum_sinclair(prof.global_phi, prof.pi_min, cfg.C)
    m["bound_dyadic"] = cond.bound_dyadic_sum(prof, cfg.C).value
    if "t_mix_cesaro" in m:
        m["ratio_local"] = m["t_mix_cesaro"] / pr.local_obstruction
        m["ratio_diameter"] = m["t_mix_cesaro"] / pr.diameter_term
    return rec


@dataclass
class ScalingSummary:
    records: list[ExperimentRecord]
    fit: dict


def run_scaling_study(
    ns: Sequence[int], cfg: ScalingConfig, replicates: int, seed: int, workers: int = 1
) -> ScalingSummary:
    """Measure ``T'_mix`` (and ``T_mix``) over a grid of ``n`` for one regime.

    The fit report gives, for each predictor, the spread ``max/min`` of the
    per-cell mean ratio measured / predictor across the grid.
    """
    tasks = [(n, cfg, seed, r) for n in ns for r in range(replicates)]
    recs = sorted(_map(_scaling_one, tasks, workers), key=ExperimentRecord.sort_key)
    fit = {"regime": cfg.regime, "cells": {}}
    for key in ("ratio_local", "ratio_diameter"):
        means = []
        for n in ns:
            vals = [r.metrics[key] for r in recs if r.n == n and key in r.metrics]
            if vals:
                mean = float(np.mean(vals))
                means.append(mean)
                fit["cells"].setdefault(str(n), {})[key] = mean
        fit[key + "_spread"] = (max(means) / min(means)) if len(means) >= 2 and min(means) > 0 else None
    fit["censored"] = sum(r.censored for r in recs)
    return ScalingSummary(recs, fit)


# -------------------------------------------------------- obstruction demo


def expander_blob(size: int, rng_seed: RngSeed) -> Graph:
    """A connected, simple, roughly 3-regular random graph on ``size`` vertices."""
    attempt = 0
    while True:
        g = sample_configuration(DegreeSequence([3] * (size - size % 2) + [2] * (size % 2)), rng_seed.child(attempt))
        eu, ev, _ = g.edge_arrays()
        keep = eu != ev
        simple = build_graph(size, np.stack([eu[keep], ev[keep]], axis=1))
        if len(components(simple)) == 1:
            return simple
        attempt += 1


def obstruction_graph(l: int, expander_n: int, seed: RngSeed):
    """Two expander blobs joined by a path ``p_0 .. p_2l`` of ``2l + 1`` new
    vertices. Returns the graph and the path's vertex ids."""
    a = expander_blob(expander_n, seed.child("left"))
    b = expander_blob(expander_n, seed.child("right"))
    off_b = expander_n
    off_p = 2 * expander_n
    path = list(range(off_p, off_p + 2 * l + 1))
    edges = [e for e in a.edges()]
    edges += [(u + off_b, v + off_b) for u, v in b.edges()]
    edges += list(zip(path[:-1], path[1:]))
    edges += [(0, path[0]), (off_b, path[-1])]
    return build_graph(off_p + len(path), edges), path


@dataclass
class ObstructionReport:
    l: int
    t: int
    escape_stay_probability: float
    walks: int
    bound_lower: Fraction
    t_mix: int | None
    t_mix_cesaro: int | None
    laziness: float
    n: int

    def to_dict(self) -> dict:
        out = asdict(self)
        out["bound_lower"] = float(self.bound_lower)
        return out


def run_obstruction_demo(
    l: int, expander_n: int, walks: int, seed: int, starts: str | int = "all", max_matvecs: int = 5_000_000
) -> ObstructionReport:
    """Random walk from the middle of a long path between two expanders.

    Reports the fraction of walks still inside the path after
    ``floor(l^2 / 10)`` steps, the lower bound ``pi(S) / (10 Q(S))`` for the
    half cut at the path middle, and the measured mixing times.
    """
    if l < 2:
        raise ValueError("l must be at least 2")
    rs = RngSeed(seed, ("obstruction", l, expander_n))
    g, path = obstruction_graph(l, expander_n, rs)
    t = (l * l) // 10
    stay = trajectory_escape_probability(g, path, t, walks, rs.child("walks"))
    comp = np.arange(g.n)
    half = np.array(list(range(expander_n)) + path[:l], dtype=np.int64)
    vol = int(g.degree.sum())
    st = subset_stats(g, half)
    if 2 * st.total_degree > vol:
        half = np.setdiff1d(comp, half)
    lower = cond.bound_lower(g, comp, [half])
    laziness = 0.0 if not is_bipartite(g, comp).bipartite else 0.5
    wc = WalkConfig(laziness=laziness, starts=starts, max_matvecs=max_matvecs, seed=seed)
    t_mix = mixing_report(g, comp, wc).value
    t_ces = mixing_report(g, comp, wc, cesaro=True).value
    return ObstructionReport(l, t, stay, walks, lower, t_mix, t_ces, laziness, g.n)


# --------------------------------------------------------------- plot output


def write_plot_data(path, xs, ys) -> None:
    """Two-column ``x y`` text file for one curve."""
    lines = [f"{_fmt(x)} {_fmt(y)}" for x, y in zip(xs, ys)]
    Path(path).write_text("\n".join(lines) + "\n")


def write_svg(path, curves: dict, title: str = "", width: int = 480, height: int = 320) -> None:
    """Minimal standalone SVG line chart; ``curves`` maps label -> (xs, ys)."""
    pts = [(float(x), float(y)) for xs, ys in curves.values() for x, y in zip(xs, ys)]
    if not pts:
        Path(path).write_text('<svg xmlns="http://www.w3.org/2000/svg"/>\n')
        return
    x0, x1 = min(p[0] for p in pts), max(p[0] for p in pts)
    y0, y1 = min(p[1] for p in pts), max(p[1] for p in pts)
    x1, y1 = (x1 if x1 > x0 else x0 + 1), (y1 if y1 > y0 else y0 + 1)
    pad = 40
    sx = lambda x: pad + (x - x0) / (x1 - x0) * (width - 2 * pad)  # noqa: E731
    sy = lambda y: height - pad - (y - y0) / (y1 - y0) * (height - 2 * pad)  # noqa: E731
    colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"]
    body = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
        f'<text x="{pad}" y="20" font-size="12">{title}</text>',
        f'<rect x="{pad}" y="{pad}" width="{width - 2 * pad}" height="{height - 2 * pad}" fill="none" stroke="#999"/>',
    ]
    for i, (label, (xs, ys)) in enumerate(curves.items()):
        poly = " ".join(f"{sx(float(x)):.2f},{sy(float(y)):.2f}" for x, y in zip(xs, ys))
        col = colors[i % len(colors)]
        body.append(f'<polyline fill="none" stroke="{col}" points="{poly}"/>')
        body.append(f'<text x="{width - pad - 100}" y="{pad + 14 * (i + 1)}" font-size="11" fill="{col}">{label}</text>')
    body.append("</svg>")
    Path(path).write_text("\n".join(body) + "\n")


def summary_json(obj) -> str:
    def default(o):
        if isinstance(o, Fraction):
            return float(o)
        if isinstance(o, (np.integer,)):
            return int(o)
        if isinstance(o, (np.floating,)):
            return float(o)
        if isinstance(o, ExperimentRecord):
            return o.row()
        raise TypeError(type(o))

    return json.dumps(obj, indent=2, sort_keys=True, default=default)
