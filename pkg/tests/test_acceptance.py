"""Acceptance criteria 1-10, each at its stated tolerance.

Every test records one PASS/FAIL line; the lines are printed together at
the end of the pytest run.
"""

import functools
import math
import time
from fractions import Fraction

import networkx as nx
import numpy as np

from giantwalk.conductance import (
    bound_dyadic_sum,
    bound_lower,
    conductance_profile,
    exact_min_conductance,
    heuristic_min_conductance,
)
from giantwalk.decompose import decompose
from giantwalk.experiments import (
    ScalingConfig,
    _scaling_one,
    predictors,
    records_to_csv,
    run_expansion_check,
    run_obstruction_demo,
    run_path_census,
    run_scaling_study,
)
from giantwalk.generators import RngSeed, pairing_isolation_probability, sample_pairings
from giantwalk.walk import WalkConfig, cesaro_mixing_time, mixing_time, tv_distance

from conftest import complete, cycle, random_connected, record_criterion
from test_walk import brute_tv, dist, oracle_times


@functools.lru_cache(maxsize=None)
def suite_small_nonbipartite():
    """200 random connected non-bipartite graphs with n <= 7."""
    rng = np.random.default_rng(20240601)
    out = []
    while len(out) < 200:
        n = int(rng.integers(3, 8))
        g, h = random_connected(rng, n, float(rng.uniform(0.3, 0.9)))
        if not nx.is_bipartite(h):
            out.append(g)
    return tuple(out)


@functools.lru_cache(maxsize=None)
def suite_conductance():
    """200 random connected graphs with 2 <= n <= 18."""
    rng = np.random.default_rng(20240602)
    out = []
    for _ in range(200):
        n = int(rng.integers(2, 19))
        g, h = random_connected(rng, n, float(rng.uniform(1.2, 4.0)) / n if n > 4 else 0.6)
        out.append((g, nx.is_bipartite(h)))
    return tuple(out)


def test_criterion_1_small_chain_oracle():
    t0 = time.time()
    bad = 0
    for g in suite_small_nonbipartite():
        tm, tc = oracle_times(g)
        bad += mixing_time(g, range(g.n)) != tm
        bad += cesaro_mixing_time(g, range(g.n)) != tc
    elapsed = time.time() - t0
    ok = bad == 0 and elapsed < 60
    record_criterion(1, ok, f"200 graphs n<=7, mismatches={bad}, {elapsed:.1f}s")
    assert ok


def test_criterion_2_tv_definition():
    t0 = time.time()
    rng = np.random.default_rng(2)
    worst = 0.0
    for _ in range(500):
        n = int(rng.integers(1, 11))
        a, b = rng.dirichlet(np.ones(n)), rng.dirichlet(np.ones(n))
        worst = max(worst, abs(tv_distance(dist(a), dist(b)) - brute_tv(a, b)))
    elapsed = time.time() - t0
    ok = worst <= 1e-12 and elapsed < 10
    record_criterion(2, ok, f"500 pairs n<=10, max |diff|={worst:.2e}, {elapsed:.1f}s")
    assert ok


def test_criterion_3_conductance_exactness():
    t0 = time.time()
    c8 = exact_min_conductance(cycle(8), range(8))
    k4 = exact_min_conductance(complete(4), range(4))
    arc = set(c8.witness)
    is_arc = len(arc) == 4 and all(((v + 1) % 8 in arc) or ((v - 1) % 8 in arc) for v in arc)
    fixed = c8.phi == Fraction(1, 2) and is_arc and k4.phi == Fraction(4, 3)
    below = 0
    worst = Fraction(1)
    for i, (g, _) in enumerate(suite_conductance()):
        exact = exact_min_conductance(g, range(g.n)).phi
        heur = heuristic_min_conductance(g, range(g.n), decompose(g), seed=i).phi
        below += heur < exact
        worst = max(worst, heur / exact)
    elapsed = time.time() - t0
    ok = fixed and below == 0 and worst <= 2 and elapsed < 300
    record_criterion(
        3,
        ok,
        f"C8={c8.phi} witness={c8.witness}, K4={k4.phi}, heuristic<exact: {below}, "
        f"max ratio={float(worst):.4f}, {elapsed:.1f}s",
    )
    assert ok


def isolation_cases():
    rng = np.random.default_rng(4)
    cases = []
    while len(cases) < 10:
        N = int(rng.integers(2, 13))
        degs = rng.integers(1, 5, size=N)
        if degs.sum() % 2:
            degs[int(rng.integers(N))] += 1
        S = np.flatnonzero(rng.random(N) < 0.4)
        dS = int(degs[S].sum())
        if dS % 2 or not 0 < dS < degs.sum():
            continue
        cases.append((degs.tolist(), S.tolist()))
    return cases


def test_criterion_4_pairing_isolation():
    t0 = time.time()
    worst_z = 0.0
    for k, (degs, S) in enumerate(isolation_cases()):
        M = sum(degs) // 2
        dS = sum(degs[v] for v in S)
        p = pairing_isolation_probability(M, dS, exact=True)
        inside = np.zeros(len(degs), dtype=bool)
        inside[S] = True
        pairs = sample_pairings(degs, 100_000, RngSeed(4, ("isolation", k)))
        isolated = (inside[pairs[:, :, 0]] == inside[pairs[:, :, 1]]).all(axis=1)
        se = math.sqrt(float(p) * (1 - float(p)) / 100_000)
        worst_z = max(worst_z, abs(isolated.mean() - float(p)) / se)
    elapsed = time.time() - t0
    ok = worst_z <= 3 and elapsed < 120
    record_criterion(4, ok, f"10 cases N<=12, 1e5 samples each, max |z|={worst_z:.2f}, {elapsed:.1f}s")
    assert ok


def test_criterion_5_cycle_scaling():
    t0 = time.time()
    cfg = WalkConfig(laziness=0.5)
    times = [cesaro_mixing_time(cycle(n), range(n), cfg) for n in (16, 32, 64, 128)]
    ratios = [b / a for a, b in zip(times, times[1:])]
    elapsed = time.time() - t0
    ok = all(3.3 <= r <= 4.7 for r in ratios) and elapsed < 60
    record_criterion(5, ok, f"T'_mix={times}, ratios={[round(r, 3) for r in ratios]}, {elapsed:.1f}s")
    assert ok


def test_criterion_6_obstruction_demo():
    t0 = time.time()
    rep = run_obstruction_demo(50, 100, 10_000, seed=6)
    elapsed = time.time() - t0
    ok = rep.escape_stay_probability > 0.5 and rep.bound_lower <= rep.t_mix and elapsed < 300
    record_criterion(
        6,
        ok,
        f"l=50, t={rep.t}, stay={rep.escape_stay_probability:.4f}, bound_lower={float(rep.bound_lower):.1f}, "
        f"T_mix={rep.t_mix} (laziness {rep.laziness}), {elapsed:.1f}s",
    )
    assert ok


def test_criterion_7_path_census():
    t0 = time.time()
    s = run_path_census(200_000, 1.5, 30, seed=7)
    above, below = sum(s.above_lower), sum(s.below_upper)
    elapsed = time.time() - t0
    ok = above >= 27 and below == 30 and elapsed < 600
    longest = [r.metrics["longest_path"] for r in s.records]
    record_criterion(
        7,
        ok,
        f"n=2e5 d=1.5: >= {s.path_lower:.3f} in {above}/30, <= {s.path_upper:.2f} in {below}/30, "
        f"longest range {min(longest)}..{max(longest)}, {elapsed:.1f}s",
    )
    assert ok


def test_criterion_8_dense_regime():
    t0 = time.time()
    n = 2**13
    cfg = ScalingConfig("dense", all_starts_below=n + 1)
    s = run_scaling_study([n], cfg, 10, seed=8)
    target = predictors(n, 2 * math.log(n)).diameter_term
    tm = [r.metrics.get("t_mix") for r in s.records]
    hits = sum(t is not None and abs(t - target) <= 3 for t in tm)
    elapsed = time.time() - t0
    ok = hits >= 9 and elapsed < 600
    record_criterion(8, ok, f"n=2^13 d=2ln n: ln n/ln d={target:.3f}, T_mix={tm}, within 3 in {hits}/10, {elapsed:.1f}s")
    assert ok


def _bound_checks():
    """Yield (graph, profile, lower bound, measured T_mix) over the graphs of criteria 1 and 3."""
    graphs = [(g, False) for g in suite_small_nonbipartite()] + list(suite_conductance())
    for g, bip in graphs:
        comp = range(g.n)
        prof = conductance_profile(g, comp)
        cands = [prof.global_witness] + [s.witness for s in prof.scales if s.witness]
        lb = bound_lower(g, comp, cands)
        # the simple walk on a bipartite graph never mixes; measure the lazy chain
        t = mixing_time(g, comp, WalkConfig(laziness=0.5 if bip else 0.0))
        yield g, prof, lb, t


@functools.lru_cache(maxsize=None)
def bound_rows():
    return tuple(_bound_checks())


def test_criterion_9_lower_bound():
    rows = bound_rows()
    violations = sum(lb > t for _, _, lb, t in rows)
    ok = violations == 0
    record_criterion("9a", ok, f"bound_lower <= T_mix on {len(rows)} graphs, violations={violations}")
    assert ok


def test_criterion_9_dyadic_identity():
    rows = bound_rows()
    literal = corrected = 0
    example = None
    for g, prof, _, _ in rows:
        value = bound_dyadic_sum(prof).value
        J = prof.num_scales
        if value > J / prof.global_phi**2:
            literal += 1
            if example is None or g.n < example[0].n:
                example = (g, value, J / prof.global_phi**2)
        corrected += value > J * max(Fraction(1), 1 / prof.global_phi**2)
    ok = literal == 0
    detail = f"bound_dyadic <= J * Phi_global^-2 fails on {literal}/{len(rows)} graphs"
    if example is not None:
        g, v, rhs = example
        detail += f" (smallest: n={g.n}, edges={g.edges()}, sum={v}, rhs={rhs})"
    detail += f"; with J * max(1, Phi_global^-2) failures={corrected}"
    record_criterion("9b", ok, detail)
    # the corrected comparison always holds; the literal one is reported as stated
    assert corrected == 0
    assert ok, detail


def test_criterion_10_determinism():
    t0 = time.time()
    cfg = ScalingConfig("constant-d", d=3, worst_starts=4, sampled_starts=4)
    grid = run_scaling_study([1024, 2048], cfg, 3, seed=10, workers=1)
    grid2 = run_scaling_study([1024, 2048], cfg, 3, seed=10, workers=2)
    same_grid = records_to_csv(grid.records) == records_to_csv(grid2.records)
    lines = records_to_csv(grid.records).splitlines()
    replay_ok = True
    for i, rec in enumerate(grid.records):
        again = _scaling_one((rec.n, cfg, rec.seed, rec.replicate))
        replay_ok &= records_to_csv([again]).splitlines()[1] == lines[i + 1]
    c1 = run_path_census(20_000, 1.5, 4, seed=10, workers=1)
    c2 = run_path_census(20_000, 1.5, 4, seed=10, workers=2)
    e1 = run_expansion_check(5000, 3, 2, 100, seed=10, workers=1)
    e2 = run_expansion_check(5000, 3, 2, 100, seed=10, workers=2)
    others = records_to_csv(c1.records) == records_to_csv(c2.records) and records_to_csv(e1.records) == records_to_csv(
        e2.records
    )
    elapsed = time.time() - t0
    ok = same_grid and replay_ok and others
    record_criterion(
        10,
        ok,
        f"workers 1 vs 2 identical={same_grid and others}, single-cell replay identical={replay_ok}, {elapsed:.1f}s",
    )
    assert ok
