import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import random_uniform_rings
from rcw.exceptions import DisconnectedRing, InconsistentDegrees, InvalidNetwork
from rcw.topology import (GeometricDeployment, GridSpec, Network, RingNetwork, build_geometric,
                          build_grid, build_uniform_rings, check_uniform_connectivity,
                          compose_distance2, rings_from_network)


def test_network_rejects_bad_input():
    with pytest.raises(InvalidNetwork):
        Network([[1], []])                      # asymmetric
    with pytest.raises(InvalidNetwork):
        Network([[0]])                          # self-loop
    with pytest.raises(InvalidNetwork):
        Network([[1], [0], []])                 # disconnected
    with pytest.raises(InvalidNetwork):
        Network([[1], [0]], weights=[1.0, 0.0])


def test_network_eta_and_edges():
    net = Network.from_edges([(0, 1), (1, 2)], weights=[1, 2, 3])
    assert net.eta == 6
    assert net.edges() == [(0, 1), (1, 2)]


def test_grid_sizes():
    assert build_grid(GridSpec(1)).ring_sizes.tolist() == [1, 4]
    assert build_grid(GridSpec(2)).ring_sizes.tolist() == [1, 4, 8]
    assert build_grid(GridSpec(3)).n_nodes == 25


def test_grid_down_neighbors():
    net = build_grid(GridSpec(2))
    index = {c: x for x, c in enumerate(net.coords)}
    down = {net.coords[y] for y in net.down[index[(1, 1)]]}
    assert down == {(0, 1), (1, 0)}
    for x, (i, j) in enumerate(net.coords):
        if (i, j) == (0, 0):
            continue
        axis = i == 0 or j == 0
        assert len(net.down[x]) == (1 if axis else 2)


def test_grid_ring_index_is_bfs_distance():
    net = build_grid(GridSpec(6))
    assert list(net.to_network().distances_from(0)) == net.ring_of.tolist()


def test_uniform_rings_examples():
    net = build_uniform_rings([1, 4, 4], [4, 1], [1, 1])
    assert all(len(net.up[x]) == 1 for x in net.rings[1])
    build_uniform_rings([1, 3, 6], [3, 2], [1, 1])
    with pytest.raises(InconsistentDegrees):
        build_uniform_rings([1, 3, 5], [3, 2], [1, 1])


def test_grid_not_uniform():
    assert not check_uniform_connectivity(build_grid(GridSpec(2)))
    assert check_uniform_connectivity(build_grid(GridSpec(1)))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_random_uniform_rings_are_uniform(seed):
    net = random_uniform_rings(np.random.default_rng(seed), max_radius=8, max_size=12)
    assert check_uniform_connectivity(net)
    sizes = net.ring_sizes
    for k in range(net.radius):
        assert sizes[k] * net.delta(net.rings[k][0]) == sizes[k + 1] * net.gamma(net.rings[k + 1][0])
    assert list(net.to_network().distances_from(0)) == net.ring_of.tolist()


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_composed_distance2_is_uniform(seed):
    net = random_uniform_rings(np.random.default_rng(seed), max_radius=8, max_size=12,
                               distance2=True)
    assert check_uniform_connectivity(net, distance=2)


def test_compose_matches_two_hops():
    net = compose_distance2(build_grid(GridSpec(3)))
    x = net.coords.index((1, 0))
    got = {net.coords[z] for z in net.up2[x]}
    assert got == {(3, 0), (2, 1), (2, -1), (1, 2), (1, -2)}


def test_geometric_full_angle_is_complete():
    net = build_geometric(GeometricDeployment(5, 7, 360.0, seed=3))
    assert check_uniform_connectivity(net)
    assert all(len(net.up[x]) == 7 for x in range(1, 1 + 4 * 7))


def test_geometric_reproducible():
    a = build_geometric(GeometricDeployment(10, 20, 60.0, seed=9), strict=False)
    b = build_geometric(GeometricDeployment(10, 20, 60.0, seed=9), strict=False)
    assert a.up == b.up
    assert np.array_equal(a.angles[1:], b.angles[1:])


def test_geometric_degree_near_expectation():
    net = build_geometric(GeometricDeployment(100, 100, 60.0, seed=0), strict=False)
    degrees = [len(net.up[x]) for x in range(1, 1 + 99 * 100)]
    # binomial(100, 1/6): mean 16.7
    assert abs(np.mean(degrees) - 100 / 6) < 0.3
    assert np.mean(degrees) < 17


def test_geometric_narrow_angle_disconnects():
    failures = 0
    for seed in range(20):
        try:
            build_geometric(GeometricDeployment(5, 10, 1.0, seed=seed))
        except DisconnectedRing as exc:
            failures += 1
            assert exc.nodes
    assert failures == 20


def test_rings_from_network_relabels():
    net = Network.from_edges([(3, 0), (0, 1), (1, 2), (3, 2)], n_nodes=4)
    rings, order = rings_from_network(net, source=3)
    assert order[0] == 3
    assert rings.ring_sizes.tolist() == [1, 2, 1]
    assert isinstance(rings, RingNetwork)
