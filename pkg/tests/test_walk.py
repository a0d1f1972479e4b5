import itertools
import json
import math
from fractions import Fraction

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from giantwalk.decompose import decompose
from giantwalk.experiments import obstruction_graph
from giantwalk.generators import RngSeed
from giantwalk.graph import GraphError, build_graph
from giantwalk.walk import (
    BudgetExceeded,
    Distribution,
    WalkConfig,
    cesaro_mixing_time,
    heuristic_worst_starts,
    mixing_report,
    mixing_time,
    point_mass,
    stationary,
    step,
    tv_distance,
    trajectory_escape_probability,
    walk_report_json,
)

from conftest import complete, cycle, path_graph, random_connected

EPS = 1 / math.e


def dist(values):
    return Distribution(np.arange(len(values)), np.array(values, dtype=np.float64))


def brute_tv(a, b):
    n = len(a)
    best = 0.0
    for r in range(n + 1):
        for A in itertools.combinations(range(n), r):
            best = max(best, abs(sum(a[i] for i in A) - sum(b[i] for i in A)))
    return best


def dense_kernel(g, laziness=Fraction(0)):
    """Exact transition matrix from the edge list."""
    n = g.n
    P = [[Fraction(0)] * n for _ in range(n)]
    for u, v in g.edges():
        P[u][v] += Fraction(1, int(g.degree[u]))
        P[v][u] += Fraction(1, int(g.degree[v]))
    return [[laziness * (i == j) + (1 - laziness) * P[i][j] for j in range(n)] for i in range(n)]


def oracle_times(g, laziness=Fraction(0), eps=EPS, horizon=400):
    """(T_mix, T'_mix) by explicit exact powering from every point mass."""
    n = g.n
    P = dense_kernel(g, laziness)
    vol = sum(int(d) for d in g.degree)
    pi = [Fraction(int(d), vol) for d in g.degree]
    t_mix = t_ces = 0
    for v in range(n):
        x = [Fraction(int(i == v)) for i in range(n)]
        acc = [Fraction(0)] * n
        tm = tc = None
        for t in range(horizon):
            if tm is None and sum(abs(a - b) for a, b in zip(x, pi)) / 2 < eps:
                tm = t
            acc = [a + b for a, b in zip(acc, x)]
            if tc is None and sum(abs(a / (t + 1) - b) for a, b in zip(acc, pi)) / 2 < eps:
                tc = t + 1
            if tm is not None and tc is not None:
                break
            x = [sum(x[i] * P[i][j] for i in range(n)) for j in range(n)]
        t_mix = max(t_mix, tm)
        t_ces = max(t_ces, tc)
    return t_mix, t_ces


# ---------------------------------------------------------------- stationary

def test_stationary_examples():
    assert stationary(path_graph(3), [0, 1, 2], exact=True).mass.tolist() == [
        Fraction(1, 4),
        Fraction(1, 2),
        Fraction(1, 4),
    ]
    assert stationary(complete(4), range(4), exact=True).mass.tolist() == [Fraction(1, 4)] * 4
    np.testing.assert_allclose(stationary(cycle(7), range(7)).mass, 1 / 7)


def test_stationary_multigraph_loop():
    # loop adds 2 to the degree of vertex 0: degrees (3, 1), e* = 2
    g = build_graph(2, [(0, 0), (0, 1)], allow_multi=True)
    assert stationary(g, [0, 1], exact=True).mass.tolist() == [Fraction(3, 4), Fraction(1, 4)]
    pi = stationary(g, [0, 1])
    np.testing.assert_allclose(step(g, pi).mass, pi.mass)


def test_stationary_rejects_disconnected():
    g = build_graph(4, [(0, 1), (2, 3)])
    with pytest.raises(GraphError):
        stationary(g, [0, 1, 2, 3])
    with pytest.raises(GraphError):
        stationary(g, [0, 2])
    # a proper subset of a component is not closed either
    with pytest.raises(GraphError):
        stationary(path_graph(3), [0, 1])


def test_reversibility_exact():
    rng = np.random.default_rng(4)
    for _ in range(20):
        g, _ = random_connected(rng, int(rng.integers(2, 9)), 0.5)
        pi = stationary(g, range(g.n), exact=True).mass
        P = dense_kernel(g)
        for u, v in g.edges():
            assert pi[u] * P[u][v] == pi[v] * P[v][u]


# ---------------------------------------------------------------------- step

def test_step_examples(K2):
    assert step(K2, dist([1, 0])).mass.tolist() == [0, 1]
    assert step(K2, dist([1, 0]), laziness=0.5).mass.tolist() == [0.5, 0.5]
    g = cycle(9)
    pi = stationary(g, range(9))
    for lz in (0.0, 0.3, 0.5):
        np.testing.assert_allclose(step(g, pi, lz).mass, pi.mass, atol=1e-15)


def test_step_rejects_isolated_and_leaks():
    g = build_graph(3, [(0, 1)])
    with pytest.raises(GraphError):
        step(g, Distribution(np.array([2]), np.array([1.0])))
    with pytest.raises(GraphError):
        step(path_graph(3), Distribution(np.array([0, 1]), np.array([0.0, 1.0])))


def test_step_matches_dense_kernel():
    rng = np.random.default_rng(9)
    for _ in range(20):
        g, _ = random_connected(rng, 7, 0.45)
        P = np.array([[float(x) for x in row] for row in dense_kernel(g)])
        x = rng.dirichlet(np.ones(7))
        np.testing.assert_allclose(step(g, dist(x)).mass, x @ P, atol=1e-14)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10**6), st.floats(0.0, 0.9))
def test_mass_preserved_and_tv_monotone(seed, lz):
    rng = np.random.default_rng(seed)
    g, _ = random_connected(rng, 10, 0.3)
    x = dist(rng.dirichlet(np.ones(10)))
    pi = stationary(g, range(10))
    prev = tv_distance(x, pi)
    for _ in range(30):
        x = step(g, x, lz)
        assert abs(x.total() - 1) < 1e-12
        cur = tv_distance(x, pi)
        assert cur <= prev + 1e-12
        prev = cur


# ------------------------------------------------------------------------ TV

def test_tv_examples():
    a = dist([0.2, 0.8])
    assert tv_distance(a, a) == 0
    assert tv_distance(dist([1, 0]), dist([0, 1])) == 1
    assert tv_distance(dist([0.5, 0.5]), dist([0.75, 0.25])) == pytest.approx(0.25)
    assert brute_tv([0.5, 0.5], [0.75, 0.25]) == pytest.approx(0.25)


def test_tv_rejects_mismatched_support():
    with pytest.raises(ValueError):
        tv_distance(dist([1.0]), dist([0.5, 0.5]))


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 10), st.integers(0, 10**6))
def test_tv_equals_subset_maximum(n, seed):
    rng = np.random.default_rng(seed)
    a, b = rng.dirichlet(np.ones(n)), rng.dirichlet(np.ones(n))
    assert tv_distance(dist(a), dist(b)) == pytest.approx(brute_tv(a, b), abs=1e-12)


def test_tv_exact_fractions():
    a = Distribution(np.arange(2), np.array([Fraction(1, 3), Fraction(2, 3)], dtype=object))
    b = Distribution(np.arange(2), np.array([Fraction(1, 2), Fraction(1, 2)], dtype=object))
    assert tv_distance(a, b) == Fraction(1, 6)


# -------------------------------------------------------------- mixing times

def test_k2_values(K2):
    assert mixing_time(K2, [0, 1], WalkConfig(laziness=0.5)) == 1
    assert cesaro_mixing_time(K2, [0, 1]) == 2
    assert cesaro_mixing_time(K2, [0, 1], WalkConfig(laziness=0.5)) == 2


def test_cesaro_from_stationary_start():
    # K3 with a point mass is not stationary, but epsilon close to 1 makes horizon 1 enough
    g = complete(3)
    assert cesaro_mixing_time(g, range(3), WalkConfig(epsilon=0.7)) == 1
    assert mixing_time(g, range(3), WalkConfig(epsilon=0.7)) == 0


def test_bipartite_rejected_without_laziness(C8):
    with pytest.raises(GraphError, match="odd cycle"):
        mixing_time(C8, range(8))
    assert mixing_time(C8, range(8), WalkConfig(laziness=0.5)) > 0
    assert cesaro_mixing_time(C8, range(8)) > 0


def test_triangle_matches_dense_oracle():
    g = complete(3)
    tm, tc = oracle_times(g)
    assert mixing_time(g, range(3)) == tm
    assert cesaro_mixing_time(g, range(3)) == tc


def small_nonbipartite_graphs(count, seed):
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        n = int(rng.integers(3, 8))
        g, h = random_connected(rng, n, float(rng.uniform(0.35, 0.9)))
        if not nx.is_bipartite(h):
            out.append(g)
    return out


@pytest.mark.parametrize("chunk", range(4))
def test_mixing_times_match_dense_oracle(chunk):
    graphs = small_nonbipartite_graphs(200, 123)[chunk * 50 : (chunk + 1) * 50]
    for g in graphs:
        tm, tc = oracle_times(g)
        assert mixing_time(g, range(g.n)) == tm
        assert cesaro_mixing_time(g, range(g.n)) == tc


def test_lazy_matches_dense_oracle():
    rng = np.random.default_rng(77)
    for _ in range(15):
        g, _ = random_connected(rng, int(rng.integers(2, 7)), 0.5)
        tm, tc = oracle_times(g, Fraction(1, 2))
        cfg = WalkConfig(laziness=0.5)
        assert mixing_time(g, range(g.n), cfg) == tm
        assert cesaro_mixing_time(g, range(g.n), cfg) == tc


def test_lazy_cycle_quadratic():
    cfg = WalkConfig(laziness=0.5, starts=[0])
    times = [mixing_time(cycle(n), range(n), cfg) for n in (16, 32, 64)]
    for a, b in zip(times, times[1:]):
        assert 3.3 <= b / a <= 4.7


def test_cycle_start_symmetry():
    # vertex-transitive: all starts give the same crossing time
    rep = mixing_report(cycle(11), range(11))
    assert len(set(rep.times.values())) == 1


def test_epsilon_amplification():
    # d(l T) <= (2 d(T))^l with d(T) < 1/e gives T_mix(eps=(2/e)^l) <= l T_mix
    g = complete(5)
    base = mixing_time(g, range(5), WalkConfig(laziness=0.5))
    for l in (2, 3):
        t = mixing_time(g, range(5), WalkConfig(laziness=0.5, epsilon=(2 / math.e) ** l))
        assert t <= l * base


def test_start_policies():
    g = cycle(9)
    rep = mixing_report(g, range(9), WalkConfig(starts=3, seed=2))
    assert len(rep.times) == 3
    again = mixing_report(g, range(9), WalkConfig(starts=3, seed=2))
    assert rep.times == again.times
    rep = mixing_report(g, range(9), WalkConfig(starts=[4, 2]))
    assert sorted(rep.times) == [2, 4]
    with pytest.raises(GraphError):
        mixing_report(g, range(9), WalkConfig(starts=[20]))


def test_block_size_does_not_change_results():
    g, _ = random_connected(np.random.default_rng(1), 30, 0.15)
    a = mixing_report(g, range(30), WalkConfig(laziness=0.5, block=4))
    b = mixing_report(g, range(30), WalkConfig(laziness=0.5, block=256))
    assert a.times == b.times


def test_budgets():
    g = cycle(64)
    with pytest.raises(BudgetExceeded):
        mixing_time(g, range(64), WalkConfig(laziness=0.5, max_matvecs=100))
    with pytest.raises(BudgetExceeded):
        mixing_time(g, range(64), WalkConfig(laziness=0.5, max_vertices=10))


def test_config_validation():
    for bad in (dict(laziness=1.0), dict(laziness=-0.1), dict(epsilon=0.0), dict(epsilon=1.0)):
        with pytest.raises(ValueError):
            WalkConfig(**bad)


def test_point_mass():
    x = point_mass([3, 1, 2], 2)
    assert x.support.tolist() == [1, 2, 3] and x.mass.tolist() == [0, 1, 0]
    with pytest.raises(GraphError):
        point_mass([1, 2], 5)


def test_report_json(K2):
    rep = mixing_report(K2, [0, 1], WalkConfig(laziness=0.5))
    ces = mixing_report(K2, [0, 1], WalkConfig(laziness=0.5), cesaro=True)
    body = json.loads(walk_report_json(rep, ces, graph="K2"))
    assert body["t_mix"]["value"] == 1 and body["t_mix_cesaro"]["value"] == 2
    assert body["t_mix"]["per_start"][0]["start"] == 0
    assert body["t_mix"]["laziness"] == 0.5


# ------------------------------------------------------------- escape probe

def one_d_stay(l, t, walks, seed):
    """Fraction of simple +-1 walks from 0 that avoid +-l for t steps."""
    rng = np.random.default_rng(seed)
    x = np.zeros(walks, dtype=np.int64)
    alive = np.ones(walks, dtype=bool)
    for _ in range(t):
        x += np.where(rng.random(walks) < 0.5, 1, -1)
        alive &= np.abs(x) < l
    return alive.mean()


def test_escape_trivial_cases():
    g = path_graph(3)
    assert trajectory_escape_probability(g, [0, 1, 2], 0, 10, 1) == 1.0
    assert trajectory_escape_probability(g, [0, 1, 2], 1, 100, 1) == 0.0
    with pytest.raises(ValueError):
        trajectory_escape_probability(g, [0, 1], 1, 10, 1)


def test_escape_even_path_uses_lower_center():
    # path 0-1-2-3 inside P4: start at vertex 1, one step hits vertex 0 half the time
    g = path_graph(4)
    p = trajectory_escape_probability(g, [0, 1, 2, 3], 1, 20_000, 3)
    assert abs(p - 0.5) < 0.02


def test_escape_long_path_matches_1d_walk():
    l = 50
    g, path = obstruction_graph(l, 60, RngSeed(5, ("escape",)))
    t = l * l // 10
    walks = 10_000
    p = trajectory_escape_probability(g, path, t, walks, RngSeed(5, ("walks",)))
    q = one_d_stay(l, t, walks, 6)
    assert p > 0.5
    se = math.sqrt(max(q * (1 - q), 1e-4) / walks)
    assert abs(p - q) < 5 * se * math.sqrt(2) + 1e-3


def test_escape_medium_path_matches_1d_walk():
    # a regime where escape is common, so the comparison has teeth
    l = 10
    g, path = obstruction_graph(l, 40, RngSeed(8, ("escape",)))
    walks = 20_000
    for t in (50, 100, 200):
        p = trajectory_escape_probability(g, path, t, walks, RngSeed(8, ("w", t)))
        q = one_d_stay(l, t, walks, t)
        se = math.sqrt(q * (1 - q) / walks)
        assert abs(p - q) < 5 * se * math.sqrt(2)


# ------------------------------------------------------------- worst starts

def test_worst_starts_long_path_first():
    g, path = obstruction_graph(6, 20, RngSeed(1, ("ws",)))
    rep = decompose(g)
    starts = heuristic_worst_starts(g, range(g.n), rep, 3, seed=0)
    longest = max(rep.degree2.paths, key=len)
    assert starts[0] == longest[(len(longest) - 1) // 2]
    assert starts[0] == path[6]
    assert len(starts) == 3 and len(set(starts)) == 3


def test_worst_starts_fallbacks(C8):
    rep = decompose(C8)
    assert sorted(heuristic_worst_starts(C8, range(8), rep, 20)) == list(range(8))
    a = heuristic_worst_starts(C8, range(8), rep, 3, seed=4)
    assert len(a) == 3 and a == heuristic_worst_starts(C8, range(8), rep, 3, seed=4)


def test_worst_starts_uses_decorations():
    # C5 with a pendant path of 4: the far leaf is offered
    edges = [(i, (i + 1) % 5) for i in range(5)] + [(0, 5), (5, 6), (6, 7), (7, 8)]
    g = build_graph(9, edges)
    starts = heuristic_worst_starts(g, range(9), decompose(g), 2)
    assert 8 in starts
