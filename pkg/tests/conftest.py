import itertools

import networkx as nx
import pytest

from giantwalk.graph import build_graph


def cycle(n):
    return build_graph(n, [(i, (i + 1) % n) for i in range(n)])


def complete(n):
    return build_graph(n, list(itertools.combinations(range(n), 2)))


def path_graph(n):
    return build_graph(n, [(i, i + 1) for i in range(n - 1)])


def to_nx(g):
    h = nx.MultiGraph()
    h.add_nodes_from(range(g.n))
    h.add_edges_from(g.edges())
    return h


def random_connected(rng, n, p):
    """Connected simple graph on n vertices, by rejection."""
    while True:
        edges = [(i, j) for i, j in itertools.combinations(range(n), 2) if rng.random() < p]
        h = nx.Graph()
        h.add_nodes_from(range(n))
        h.add_edges_from(edges)
        if nx.is_connected(h):
            return build_graph(n, edges), h


@pytest.fixture
def C8():
    return cycle(8)


@pytest.fixture
def K4():
    return complete(4)


@pytest.fixture
def K2():
    return complete(2)


# acceptance lines collected by tests/test_acceptance.py and printed at the end of the run
ACCEPTANCE: dict[str, str] = {}


def record_criterion(label, ok: bool, detail: str) -> bool:
    label = str(label)
    line = f"criterion {label:<4} {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE[label] = line
    print(line)
    return ok


def _label_key(label: str):
    digits = "".join(ch for ch in label if ch.isdigit())
    return int(digits), label


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.write_sep("=", "acceptance criteria")
        for k in sorted(ACCEPTANCE, key=_label_key):
            terminalreporter.write_line(ACCEPTANCE[k])
