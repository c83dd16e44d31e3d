import numpy as np
import pytest

from mlembed.graph import LayerGraph, MultilayerGraph


def triangle():
    return LayerGraph.from_edges(3, [(0, 1, 1.0), (0, 2, 1.0), (1, 2, 1.0)])


def path3():
    return LayerGraph.from_edges(3, [(0, 1, 1.0), (1, 2, 1.0)])


def random_connected_adjacency(rng, n, density=0.4):
    """Random spanning tree plus extra random edges, uniform weights in [0.1, 2]."""
    w = np.zeros((n, n))
    order = rng.permutation(n)
    for a in range(1, n):
        i, j = order[a], order[rng.integers(a)]
        w[i, j] = w[j, i] = rng.uniform(0.1, 2.0)
    extra = np.triu(rng.random((n, n)) < density, 1) & (w == 0)
    vals = rng.uniform(0.1, 2.0, size=(n, n))
    w[extra] = vals[extra]
    w = np.triu(w, 1)
    return w + w.T


def blob_graph(rng, sizes):
    """Disjoint union of random connected graphs with the given vertex counts."""
    n = sum(sizes)
    w = np.zeros((n, n))
    start = 0
    for s in sizes:
        if s > 1:
            w[start:start + s, start:start + s] = random_connected_adjacency(rng, s, 0.5)
        start += s
    return w


def random_multilayer(rng, n, n_layers, density=0.5):
    adj = []
    for _ in range(n_layers):
        w = np.triu(rng.uniform(0.1, 2.0, (n, n)) * (rng.random((n, n)) < density), 1)
        adj.append(w + w.T)
    return MultilayerGraph.from_adjacencies(adj)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# one PASS/FAIL line per acceptance criterion at the end of the run
_acceptance = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _acceptance[report.nodeid] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for nodeid, outcome in _acceptance.items():
        name = nodeid.split("::")[-1]
        status = "PASS" if outcome == "passed" else "FAIL" if outcome == "failed" else outcome.upper()
        terminalreporter.write_line(f"{status:5s} {name}")
