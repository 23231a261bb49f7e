import itertools
import math
import random

import numpy as np
import pytest

from conftest import random_uniform_rings
from rcw import distributions as D
from rcw.exceptions import AapFailure
from rcw.oracle_stats import chi_square
from rcw.overlay import (AttachmentOverlay, OverlaySampler, assign_attachment_points,
                         halls_condition, matching_exists, message_bound, overlay_sample,
                         ring_lcms, success_rate_experiment)
from rcw.ring_sampler import rings_oracle
from rcw.topology import (GeometricDeployment, GridSpec, RingNetwork, build_geometric,
                          build_grid, build_uniform_rings,
                          check_uniform_connectivity)


def _manual(sizes, up):
    offsets = np.concatenate([[0], np.cumsum(sizes)]).tolist()
    rings = [range(offsets[k], offsets[k + 1]) for k in range(len(sizes))]
    return RingNetwork(rings, up)


def test_halls_examples():
    net = build_uniform_rings([1, 3, 6, 4], [3, 2, 2], [1, 1, 3])
    assert all(halls_condition(net).values())
    same = build_uniform_rings([1, 4, 4, 4], [4, 2, 2], [1, 2, 2])
    assert all(halls_condition(same).values())
    # ring 1 has 4 nodes with one up-link each, ring 2 has 8 nodes
    up = [[1, 2, 3, 4], [5], [6], [7], [8]] + [[] for _ in range(8)]
    assert halls_condition(_manual([1, 4, 8], up)) == {1: False}


def test_lcm_counts():
    net = build_grid(GridSpec(4))
    assert ring_lcms(net) == [4, 8, 24, 48]


def test_uniform_nets_admit_an_assignment():
    rng = np.random.default_rng(0)
    for seed in range(100):
        net = random_uniform_rings(rng, max_radius=5, max_size=8)
        assert all(halls_condition(net).values())
        assert all(matching_exists(net, k) for k in range(net.radius))
        try:
            ov = assign_attachment_points(net, seed=seed).verify()
        except AapFailure:
            continue
        assert ov.messages <= message_bound(net)
        for k, r in enumerate(ov.lcm):
            assert sum(len(ov.points[x]) for x in net.rings[k]) == r
            assert sum(ov.down_points[y] for y in net.rings[k + 1]) == r


def test_complete_layers_always_succeed():
    for seed in range(100):
        net = build_geometric(GeometricDeployment(4, 6, 360.0, seed=seed))
        ov = assign_attachment_points(net, seed=seed).verify()
        assert ov.messages <= message_bound(net)


def test_greedy_can_strand_a_uniform_net():
    """Six nodes over three, two links each: a perfect assignment exists, yet
    requests that fill two granters first leave the last pair without room."""
    net = build_uniform_rings([1, 6, 3], [6, 2], [1, 4])
    assert matching_exists(net, 1)
    outcomes = set()
    for seed in range(200):
        try:
            assign_attachment_points(net, seed=seed)
            outcomes.add("ok")
        except AapFailure:
            outcomes.add("failed")
    assert outcomes == {"ok", "failed"}


def test_overlay_on_uniform_net_matches_d1():
    net = build_uniform_rings([1, 3, 6, 4], [3, 2, 2], [1, 1, 3])
    ov = assign_attachment_points(net, seed=1)
    dist = D.inverse_distance(net, p0=0.1)
    a = OverlaySampler(dist).fit(ov).exact_law().p
    b = rings_oracle(net, dist).p
    assert np.max(np.abs(a - b)) < 1e-15


def test_nonuniform_overlay_is_exact():
    net = build_geometric(GeometricDeployment(4, 5, 200.0, seed=4))
    assert not check_uniform_connectivity(net)
    ov = assign_attachment_points(net, seed=0).verify()
    est = OverlaySampler("uniform").fit(ov)
    law = est.exact_law()
    assert law.ring_visit_spread() < 1e-12
    assert np.max(np.abs(law.p - 1 / net.n_nodes)) < 1e-12
    r = random.Random(5)
    counts = np.bincount([overlay_sample(ov, "uniform", r) for _ in range(30000)],
                         minlength=net.n_nodes)
    assert chi_square(counts, law.p)[1] > 0.001


def test_failure_reports_nodes():
    # node 4 has no outward link at all
    up = [[1, 2], [3], [3, 4]] + [[], []]
    net = _manual([1, 2, 2], up)
    up[1] = [3]
    with pytest.raises(AapFailure) as info:
        assign_attachment_points(net, seed=0)
    assert info.value.failed
    assert info.value.messages > 0


def test_protocol_deterministic():
    net = build_geometric(GeometricDeployment(6, 6, 360.0, seed=2))
    a = assign_attachment_points(net, seed=9)
    b = assign_attachment_points(net, seed=9)
    assert a.points == b.points and a.messages == b.messages


def _hall_by_subsets(net, k):
    """Brute-force Hall check on the point-expanded bipartite graph."""
    r = ring_lcms(net)[k]
    lower, upper = net.rings[k], net.rings[k + 1]
    a, b = r // len(lower), r // len(upper)
    for size in range(1, len(lower) + 1):
        for subset in itertools.combinations(lower, size):
            nbrs = set().union(*(net.up[x] for x in subset))
            if a * size > b * len(nbrs):
                return False
    return True


def test_matching_exists_agrees_with_hall():
    for seed in range(40):
        net = build_geometric(GeometricDeployment(3, 6, 75.0, seed=seed), strict=False)
        for k in range(net.radius):
            assert matching_exists(net, k) == _hall_by_subsets(net, k)


def test_success_rate_extremes():
    rows = success_rate_experiment([15, 360], trials=3, seed=1, rings=10, per_ring=10)
    assert rows[0]["success_rate"] == 0.0
    assert rows[1]["success_rate"] == 1.0
    assert rows[1]["matchable_rate"] == 1.0


def test_overlay_interface():
    net = build_uniform_rings([1, 2, 4], [2, 2], [1, 1])
    ov = assign_attachment_points(net)
    assert isinstance(ov, AttachmentOverlay)
    assert ov.radius == 2 and ov.source == 0
    assert ov.delta(0) == math.lcm(1, 2)
