"""Shared generators and independent oracles for the test suite."""

import math

import numpy as np
import pytest

from rcw.topology import Network, build_uniform_rings

CRITERIA = []


def absorbing_law(table, source):
    """Selection law by solving the absorbing chain ``v = e_s + v P``.

    Dense linear algebra, independent of the topological-order propagation
    used by the package.
    """
    n = table.n_nodes
    P = np.zeros((n, n))
    for x, row in enumerate(table.successors):
        for y, h in row:
            P[x, y] += (1.0 - table.stay[x]) * h
    e = np.zeros(n)
    e[source] = 1.0
    visit = np.linalg.solve((np.eye(n) - P).T, e)
    return visit * table.stay


def random_connected_network(rng, n, extra=None, weights=True):
    """Random spanning tree plus ``extra`` random chords; weights in (0, 10]."""
    edges = set()
    for x in range(1, n):
        y = int(rng.integers(x))
        edges.add((y, x))
    extra = int(rng.integers(0, n)) if extra is None else extra
    for _ in range(extra):
        u, v = (int(a) for a in rng.integers(n, size=2))
        if u != v:
            edges.add((min(u, v), max(u, v)))
    w = 10.0 * (1.0 - rng.random(n)) if weights else None
    return Network.from_edges(sorted(edges), n_nodes=n, weights=w)


def random_tree(rng, n):
    return random_connected_network(rng, n, extra=0)


def path_network(n, weights=None):
    return Network.from_edges([(i, i + 1) for i in range(n - 1)], n_nodes=n, weights=weights)


def random_uniform_rings(rng, max_radius=30, max_size=40, min_radius=1, distance2=False):
    """Random sizes and degrees with ``n_k delta_k = n_{k+1} gamma_{k+1}``."""
    R = int(rng.integers(min_radius, max_radius + 1))
    sizes = [1] + [int(rng.integers(1, max_size + 1)) for _ in range(R)]
    delta, gamma = [], []
    for k in range(R):
        a, b = sizes[k], sizes[k + 1]
        g = b // math.gcd(a, b)
        d = g * int(rng.integers(1, b // g + 1))
        delta.append(d)
        gamma.append(a * d // b)
    return build_uniform_rings(sizes, delta, gamma, delta2="compose" if distance2 else None)


def random_distance_law(rng, sizes, p0=None, zero_rate=0.2):
    """Random valid ``p_0 .. p_R`` (interior zeros allowed, ``p_R > 0``)."""
    sizes = np.asarray(sizes, dtype=float)
    mass = rng.random(len(sizes)) + 0.05
    mass[1:-1][rng.random(len(sizes) - 2) < zero_rate] = 0.0
    if p0 is not None:
        mass[0] = 0.0
    mass /= mass.sum()
    if p0:
        mass *= 1.0 - p0
        mass[0] = p0
    return mass / sizes


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def pytest_terminal_summary(terminalreporter):
    if CRITERIA:
        terminalreporter.section("acceptance criteria")
        for line in CRITERIA:
            terminalreporter.write_line(line)
