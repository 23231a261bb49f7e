import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import absorbing_law, random_distance_law, random_uniform_rings
from rcw import distributions as D
from rcw.exceptions import InfeasibleStay, InvalidDistribution, NotUniformlyConnected
from rcw.oracle_stats import chi_square
from rcw.ring_sampler import (NO_RING, HopPolicy, RingSampler, RingTuple, WalkMessage1,
                              WalkMessage2, ring_chain_d1, rings_oracle, step_rules_d1,
                              step_rules_d2, walk_rings_d1, walk_rings_d2)
from rcw.topology import GridSpec, build_grid, build_uniform_rings


def test_step_rules_d1_example():
    msg = WalkMessage1(0, 1.0, 1 / 9, 1.0, 4)
    n1, v1, q1 = step_rules_d1(msg, (1, 1, 1 / 9))
    assert (n1, v1, q1) == pytest.approx((4, 2 / 9, 1 / 2), abs=1e-15)
    n2, v2, q2 = step_rules_d1(WalkMessage1(0, v1, 1 / 9, n1, 1), (0, 1, 1 / 9), outermost=True)
    assert (n2, v2, q2) == pytest.approx((4, 1 / 9, 1.0), abs=1e-15)


def test_first_ring_visit():
    for p0 in (0.0, 0.2, 0.5):
        _, v, _ = step_rules_d1(WalkMessage1(0, 1.0, p0, 1.0, 6), (1, 1, 0.01))
        assert v == pytest.approx((1 - p0) / 6, abs=1e-15)


def test_step_rules_d2_example():
    p = 1 / 13
    start = WalkMessage2(0, RingTuple(1.0, 0.0, 1.0, 1.0, 4), NO_RING)
    n1, v1, q1 = step_rules_d2(start, (1, p))
    assert v1 == pytest.approx(1 / 4, abs=1e-15)
    ring1 = RingTuple(v1, p, n1, 0.5, 1)
    n2, v2, q2 = step_rules_d2(WalkMessage2(0, ring1, start.prev1), (1, p))
    assert v2 == pytest.approx(9 / 104, abs=1e-15)
    assert q2 == pytest.approx(8 / 9, abs=1e-14)


def test_infeasible_stay():
    with pytest.raises(InfeasibleStay):
        step_rules_d1(WalkMessage1(0, 1.0, 0.0, 1.0, 2), (1, 1, 0.6))


def test_singleton_chain_deterministic():
    net = build_uniform_rings([1, 1, 1], [1, 1], [1, 1])
    dist = D.explicit([0.2, 0.3, 0.5])
    assert np.allclose(rings_oracle(net, dist).p, [0.2, 0.3, 0.5], atol=1e-15)


def test_small_uniform_law():
    net = build_uniform_rings([1, 4, 4], [4, 1], [1, 1])
    assert np.allclose(rings_oracle(net, D.uniform(net)).p, 1 / 9, atol=1e-15)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_d1_exact_on_uniform_nets(seed):
    rng = np.random.default_rng(seed)
    net = random_uniform_rings(rng, max_radius=12, max_size=20)
    dist = D.explicit(random_distance_law(rng, net.ring_sizes))
    est = RingSampler(dist).fit(net)
    target = dist.node_probabilities(net.ring_of)
    law = est.exact_law()
    assert np.max(np.abs(law.p - target)) < 1e-12
    assert np.array_equal(est.ring_sizes_local_, net.ring_sizes.astype(float))
    assert np.max(np.abs(absorbing_law(est.table_, 0) - target)) < 1e-12


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_d2_all_ones_equals_d1(seed):
    rng = np.random.default_rng(seed)
    net = random_uniform_rings(rng, max_radius=10, max_size=16, min_radius=2, distance2=True)
    dist = D.explicit(random_distance_law(rng, net.ring_sizes, p0=0.0))
    d1 = rings_oracle(net, dist, "d1")
    d2 = rings_oracle(net, dist, "d2", HopPolicy.constant(1.0, net.radius))
    assert np.max(np.abs(d1.p - d2.p)) <= 1e-15


def _d2_instance(seed):
    rng = np.random.default_rng(seed)
    net = random_uniform_rings(rng, max_radius=10, max_size=16, min_radius=4, distance2=True)
    dist = D.explicit(random_distance_law(rng, net.ring_sizes, p0=0.0, zero_rate=0.0))
    return net, dist


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_d2_default_policy_exact(seed):
    net, dist = _d2_instance(seed)
    est = RingSampler(dist, mode="d2").fit(net)
    target = dist.node_probabilities(net.ring_of)
    assert np.max(np.abs(est.exact_law().p - target)) < 1e-12
    assert np.all(est.policy_[1:net.radius - 1] >= 0.5)
    assert np.max(np.abs(absorbing_law(est.table_, 0) - target)) < 1e-12


def test_d2_needs_zero_source_mass():
    net = build_uniform_rings([1, 4, 4, 4], [4, 1, 1], [1, 1, 1], delta2="compose")
    with pytest.raises(InvalidDistribution):
        RingSampler("uniform", mode="d2").fit(net)
    est = RingSampler("uniform", mode="d2", source_stay=True, policy=[0.5, 1.0]).fit(net)
    assert np.allclose(est.exact_law().p, 1 / 13, atol=1e-15)


def test_infeasible_policy_rejected():
    # all mass on ring 2: a long hop from ring 1 skips it
    net = build_uniform_rings([1, 2, 2, 2, 2], [2, 1, 1, 1], [1, 1, 1, 1], delta2="compose")
    dist = D.explicit([0.0, 0.0, 0.49, 0.005, 0.005])
    with pytest.raises(InfeasibleStay):
        RingSampler(dist, mode="d2", policy=[0.5, 0.5, 1.0]).fit(net)


def test_not_uniform_needs_force():
    grid = build_grid(GridSpec(3))
    with pytest.raises(NotUniformlyConnected):
        RingSampler().fit(grid)
    est = RingSampler(force=True).fit(grid)
    law = est.exact_law()
    assert law.ring_visit_spread() > 1e-3
    assert np.array_equal(est.ring_sizes_local_, grid.ring_sizes.astype(float))


def test_local_sizes_diverge_without_force():
    grid = build_grid(GridSpec(3))
    n, _, _ = ring_chain_d1(grid, D.uniform(grid))
    assert not np.array_equal(n, grid.ring_sizes.astype(float))


def test_literal_walks_match_oracle():
    net, dist = _d2_instance(17)
    r = random.Random(4)
    for mode in ("d1", "d2"):
        est = RingSampler(dist, mode=mode).fit(net)
        if mode == "d1":
            draws = [walk_rings_d1(net, dist, r) for _ in range(20000)]
        else:
            policy = HopPolicy(tuple(est.policy_[1:net.radius]))
            draws = [walk_rings_d2(net, dist, policy, r) for _ in range(20000)]
        counts = np.bincount([x for x, _ in draws], minlength=net.n_nodes)
        assert chi_square(counts, est.exact_law().p)[1] > 0.001
        assert max(h for _, h in draws) <= net.radius


def test_d2_fewer_hops():
    net, dist = _d2_instance(5)
    _, h1 = RingSampler(dist).fit(net).sample(10**5, random_state=1, return_hops=True)
    _, h2 = RingSampler(dist, mode="d2").fit(net).sample(10**5, random_state=2, return_hops=True)
    se = np.sqrt(h1.var() / h1.size + h2.var() / h2.size)
    assert h1.mean() - h2.mean() > 3 * se


def test_policy_validation():
    with pytest.raises(ValueError):
        HopPolicy((0.0,))
    net = build_uniform_rings([1, 4, 4, 4], [4, 1, 1], [1, 1, 1], delta2="compose")
    with pytest.raises(ValueError):
        HopPolicy((0.5,)).effective(net)
    assert HopPolicy((0.5, 0.5)).effective(net).tolist() == [1.0, 0.5, 1.0, 1.0]
