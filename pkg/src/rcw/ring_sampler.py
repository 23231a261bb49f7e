"""Preprocessing-free sampling on concentric rings with uniform connectivity.

Each node only knows its own degrees and ``p_k``; everything else travels
with the walk.  The distance-2 variant may also jump straight to ring
``k + 2``, which shortens walks on average.

Functions here accept any object exposing ``rings``, ``ring_of``,
``ring_sizes``, ``radius``, ``source``, ``up``, ``up2``, ``delta(x)`` and
``gamma(x)``; :class:`~rcw.topology.RingNetwork` and
:class:`~rcw.overlay.AttachmentOverlay` both do.
"""

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ._walks import WalkTable
from .exceptions import InfeasibleStay, InvalidDistribution
from .validation import check_distribution, check_n_samples, check_ring_network

STAY_TOL = 1e-12


@dataclass(frozen=True)
class WalkMessage1:
    source: int
    v_prev: float
    p_prev: float
    n_prev: float
    delta_prev: int


@dataclass(frozen=True)
class RingTuple:
    """What a distance-2 walk carries about one earlier ring."""

    v: float
    p: float
    n: float
    s: float
    delta: int


@dataclass(frozen=True)
class WalkMessage2:
    source: int
    prev1: RingTuple    # ring k-1
    prev2: RingTuple    # ring k-2


NO_RING = RingTuple(v=0.0, p=0.0, n=0.0, s=1.0, delta=0)


def _stay(p_k, v_k, k):
    if v_k <= 0.0:
        if p_k > 0.0:
            raise InfeasibleStay(f"ring {k} is never visited but p_{k} = {p_k}")
        return 0.0
    q = p_k / v_k
    if q > 1.0 + STAY_TOL:
        raise InfeasibleStay(f"q_{k} = {q!r} > 1: visit probability {v_k!r} < p_{k} = {p_k!r}")
    return min(q, 1.0)


def step_rules_d1(msg, local, n_k=None, outermost=False, k=None):
    """Values computed by a ring-``k`` node receiving ``msg``.

    ``local`` is ``(delta_k, gamma_k, p_k)``.  Returns ``(n_k, v_k, q_k)``
    with ``n_k = n_{k-1} delta_{k-1} / gamma_k``,
    ``v_k = n_{k-1} (v_{k-1} - p_{k-1}) / n_k`` and ``q_k = p_k / v_k``.
    Passing ``n_k`` overrides the local ring-size estimate.  On the
    outermost ring the stay probability is 1.
    """
    _, gamma_k, p_k = local
    if n_k is None:
        n_k = msg.n_prev * msg.delta_prev / gamma_k
    v_k = msg.n_prev * (msg.v_prev - msg.p_prev) / n_k
    q_k = 1.0 if outermost else _stay(p_k, v_k, k)
    return n_k, v_k, q_k


def step_rules_d2(msg, local, outermost=False, k=None):
    """Distance-2 counterpart of :func:`step_rules_d1`.

    ``local`` is ``(gamma_k, p_k)``.  The visit probability combines walks
    arriving from ring ``k-1`` (which took a short hop with probability
    ``s_{k-1}``) and from ring ``k-2`` (long hop, ``1 - s_{k-2}``).
    """
    gamma_k, p_k = local
    a, b = msg.prev1, msg.prev2
    n_k = a.n * a.delta / gamma_k
    v_k = (a.n * (a.v - a.p) * a.s + b.n * (b.v - b.p) * (1.0 - b.s)) / n_k
    q_k = 1.0 if outermost else _stay(p_k, v_k, k)
    return n_k, v_k, q_k


@dataclass(frozen=True)
class HopPolicy:
    """Short-hop probabilities ``s_1 .. s_{R-1}`` (``s_0`` is always 1)."""

    s: tuple

    def __post_init__(self):
        s = tuple(float(v) for v in self.s)
        if any(not 0.0 < v <= 1.0 for v in s):
            raise ValueError("every s_k must lie in (0, 1]")
        object.__setattr__(self, "s", s)

    @classmethod
    def constant(cls, value, radius):
        return cls((value,) * max(radius - 1, 0))

    def effective(self, net):
        """``s_0 .. s_R`` as applied on ``net``: 1 wherever no long hop exists."""
        R = net.radius
        if len(self.s) != max(R - 1, 0):
            raise ValueError(f"policy needs {max(R - 1, 0)} values for radius {R}, "
                             f"got {len(self.s)}")
        out = np.ones(R + 1)
        for k in range(1, R - 1):
            if net.up2 is not None and net.up2[net.rings[k][0]]:
                out[k] = self.s[k - 1]
        return out


def _ring_params(net):
    reps = [ring[0] for ring in net.rings]
    return [net.delta(x) for x in reps], [net.gamma(x) for x in reps]


def ring_chain_d1(net, dist, force=False):
    """Run the per-ring message chain once; returns arrays ``n, v, q``.

    With ``force`` the true ring sizes replace the local estimates.
    """
    p = dist.p
    R = net.radius
    deltas, gammas = _ring_params(net)
    sizes = net.ring_sizes
    n, v, q = [1.0], [1.0], [1.0 if R == 0 else min(p[0], 1.0)]
    msg = WalkMessage1(net.source, 1.0, p[0], 1.0, deltas[0])
    for k in range(1, R + 1):
        n_k, v_k, q_k = step_rules_d1(msg, (deltas[k], gammas[k], p[k]),
                                      n_k=float(sizes[k]) if force else None,
                                      outermost=(k == R), k=k)
        n.append(n_k)
        v.append(v_k)
        q.append(q_k)
        msg = WalkMessage1(net.source, v_k, p[k], n_k, deltas[k])
    return np.array(n), np.array(v), np.array(q)


def _initial_msg2(net, dist, s_eff, source_stay):
    deltas, _ = _ring_params(net)
    p0 = dist.p[0] if source_stay else 0.0
    return WalkMessage2(net.source, RingTuple(1.0, p0, 1.0, s_eff[0], deltas[0]), NO_RING)


def ring_chain_d2(net, dist, s_eff, source_stay=False):
    p = dist.p
    R = net.radius
    deltas, gammas = _ring_params(net)
    msg = _initial_msg2(net, dist, s_eff, source_stay)
    n, v, q = [1.0], [1.0], [1.0 if R == 0 else (p[0] if source_stay else 0.0)]
    for k in range(1, R + 1):
        n_k, v_k, q_k = step_rules_d2(msg, (gammas[k], p[k]), outermost=(k == R), k=k)
        n.append(n_k)
        v.append(v_k)
        q.append(q_k)
        msg = WalkMessage2(net.source, RingTuple(v_k, p[k], n_k, s_eff[k], deltas[k]), msg.prev1)
    return np.array(n), np.array(v), np.array(q)


def default_policy(net, dist, floor=0.5, source_stay=False):
    """Greedy policy: ``s_k = max(floor, smallest s_k keeping v_{k+1} >= p_{k+1})``.

    A convenience only; the result is checked with the full recurrence and
    :class:`InfeasibleStay` propagates if no such policy is found.
    """
    R = net.radius
    p = dist.p
    sizes = net.ring_sizes.astype(float)
    probe = HopPolicy.constant(1.0, R).effective(net)
    has_long = HopPolicy.constant(0.5, R).effective(net) < 1.0
    s = np.ones(R + 1)
    v = np.zeros(R + 1)
    v[0] = 1.0
    p_eff = p.copy()
    if not source_stay:
        p_eff[0] = 0.0
    for k in range(0, R):
        # v_{k+1} n_{k+1} = A s_k + B
        A = sizes[k] * (v[k] - p_eff[k])
        B = sizes[k - 1] * (v[k - 1] - p_eff[k - 1]) * (1.0 - s[k - 1]) if k >= 1 else 0.0
        if has_long[k] and A > 0:
            s_min = (sizes[k + 1] * p_eff[k + 1] - B) / A
            s[k] = min(1.0, max(floor, s_min))
        else:
            s[k] = probe[k]
        v[k + 1] = (A * s[k] + B) / sizes[k + 1]
    policy = HopPolicy(tuple(s[1:R]))
    ring_chain_d2(net, dist, policy.effective(net), source_stay)
    return policy


def _uniform_pick(rng, seq):
    return seq[int(rng.random() * len(seq))]


def walk_rings_d1(net, dist, rng, force=False):
    """One walk following the protocol node by node; returns ``(node, hops)``."""
    p = dist.p
    R = net.radius
    sizes = net.ring_sizes
    x = net.source
    if R == 0 or rng.random() < p[0]:
        return x, 0
    msg = WalkMessage1(x, 1.0, p[0], 1.0, net.delta(x))
    x = _uniform_pick(rng, net.up[x])
    hops = 1
    while True:
        k = int(net.ring_of[x])
        n_k, v_k, q_k = step_rules_d1(msg, (net.delta(x), net.gamma(x), p[k]),
                                      n_k=float(sizes[k]) if force else None,
                                      outermost=(k == R), k=k)
        if k == R or rng.random() < q_k:
            return x, hops
        msg = WalkMessage1(msg.source, v_k, p[k], n_k, net.delta(x))
        x = _uniform_pick(rng, net.up[x])
        hops += 1


def sample_rings_d1(net, dist, rng, force=False):
    return walk_rings_d1(net, dist, rng, force)[0]


def walk_rings_d2(net, dist, policy, rng, source_stay=False):
    """Distance-2 walk; a long hop precomputes the skipped ring's tuple."""
    p = dist.p
    R = net.radius
    s_eff = policy.effective(net)
    deltas, gammas = _ring_params(net)
    x = net.source
    if R == 0 or (source_stay and rng.random() < p[0]):
        return x, 0
    msg = _initial_msg2(net, dist, s_eff, source_stay)
    x = _uniform_pick(rng, net.up[x])
    hops = 1
    while True:
        k = int(net.ring_of[x])
        n_k, v_k, q_k = step_rules_d2(msg, (net.gamma(x), p[k]), outermost=(k == R), k=k)
        if k == R or rng.random() < q_k:
            return x, hops
        own = RingTuple(v_k, p[k], n_k, s_eff[k], net.delta(x))
        if rng.random() < s_eff[k]:
            msg = WalkMessage2(msg.source, own, msg.prev1)
            x = _uniform_pick(rng, net.up[x])
        else:
            ahead = WalkMessage2(msg.source, own, msg.prev1)
            n_mid, v_mid, _ = step_rules_d2(ahead, (gammas[k + 1], p[k + 1]), k=k + 1)
            mid = RingTuple(v_mid, p[k + 1], n_mid, s_eff[k + 1], deltas[k + 1])
            msg = WalkMessage2(msg.source, mid, own)
            x = _uniform_pick(rng, net.up2[x])
        hops += 1


def sample_rings_d2(net, dist, policy, rng, source_stay=False):
    return walk_rings_d2(net, dist, policy, rng, source_stay)[0]


def ring_walk_table(net, q_ring, s_eff=None):
    """Per-node table: ring stay probability, uniform choice among links."""
    stay, succ = [], []
    for x in range(len(net.ring_of)):
        k = int(net.ring_of[x])
        stay.append(q_ring[k])
        up = net.up[x]
        s = 1.0 if s_eff is None else s_eff[k]
        row = [(y, s / len(up)) for y in up] if up else []
        if s < 1.0:
            far = net.up2[x]
            row += [(y, (1.0 - s) / len(far)) for y in far]
        succ.append(row)
    return WalkTable(stay, succ)


def rings_oracle(net, dist, mode="d1", policy=None, force=False, source_stay=False,
                 check=True):
    """Exact per-node law of the ring walk on ``net``.

    The per-ring stay probabilities come from the message chain; the law is
    then propagated node by node over the actual links.  With ``check`` the
    per-ring visit probabilities must agree within 1e-12.
    """
    dist = check_distribution(dist, net)
    if mode == "d1":
        _, _, q = ring_chain_d1(net, dist, force)
        table = ring_walk_table(net, q)
    elif mode == "d2":
        policy = HopPolicy.constant(1.0, net.radius) if policy is None else policy
        s_eff = policy.effective(net)
        _, _, q = ring_chain_d2(net, dist, s_eff, source_stay)
        table = ring_walk_table(net, q, s_eff)
    else:
        raise ValueError(f"mode must be 'd1' or 'd2', got {mode!r}")
    law = table.oracle(net.source, ring_of=net.ring_of)
    return law.check_uniform() if check else law


class RingSampler(BaseEstimator):
    """Distance-based sampler for concentric-rings networks.

    Parameters
    ----------
    distribution : {'uniform', 'pid'}, array-like or DistanceDistribution
    mode : {'d1', 'd2'}
        Hop to the next ring only, or also two rings out.
    policy : HopPolicy, sequence of float or None
        Short-hop probabilities for ``'d2'``; ``None`` picks
        :func:`default_policy`.
    p0 : float
        Source mass for ``'pid'``.
    force : bool
        Sample a network without uniform connectivity anyway, handing every
        node the true ring size (the walk is then biased).
    source_stay : bool
        In ``'d2'`` mode, let the source select itself with ``p_0``.
        Otherwise ``p_0`` must be 0 there.
    random_state : int, Generator or None

    Attributes
    ----------
    ring_sizes_local_ : ndarray
        Ring sizes as computed along the walk.
    visit_, stay_ : ndarray
        Per-ring visit and stay probabilities.
    policy_ : ndarray or None
        Effective ``s_0 .. s_R`` in ``'d2'`` mode.
    """

    def __init__(self, distribution="uniform", mode="d1", policy=None, p0=0.0,
                 force=False, source_stay=False, random_state=None):
        self.distribution = distribution
        self.mode = mode
        self.policy = policy
        self.p0 = p0
        self.force = force
        self.source_stay = source_stay
        self.random_state = random_state

    def _check_network(self, X):
        if self.mode not in ("d1", "d2"):
            raise ValueError(f"mode must be 'd1' or 'd2', got {self.mode!r}")
        if self.force and self.mode == "d2":
            raise ValueError("force is only available in 'd1' mode")
        if not hasattr(X, "ring_of"):
            X = check_ring_network(X)
        elif hasattr(X, "stranded_nodes"):
            X = check_ring_network(X, uniform=not self.force,
                                   distance=2 if self.mode == "d2" else 1)
        return X

    def fit(self, X, y=None):
        net = self._check_network(X)
        dist = check_distribution(self.distribution, net, self.p0)
        self.network_ = net
        self.distribution_ = dist
        self.policy_ = None
        if self.mode == "d1":
            n, v, q = ring_chain_d1(net, dist, self.force)
            self.table_ = ring_walk_table(net, q)
        else:
            if dist.p[0] > 0 and not self.source_stay:
                raise InvalidDistribution(
                    "distance-2 walks start with p_0 = 0; pass source_stay=True "
                    "to let the source select itself")
            if self.policy is None:
                policy = default_policy(net, dist, source_stay=self.source_stay)
            elif isinstance(self.policy, HopPolicy):
                policy = self.policy
            else:
                policy = HopPolicy(tuple(self.policy))
            self.policy_ = policy.effective(net)
            n, v, q = ring_chain_d2(net, dist, self.policy_, self.source_stay)
            self.table_ = ring_walk_table(net, q, self.policy_)
        self.ring_sizes_local_, self.visit_, self.stay_ = n, v, q
        return self

    def sample(self, n_samples=1, random_state=None, return_hops=False):
        check_is_fitted(self, "table_")
        n_samples = check_n_samples(n_samples)
        rs = self.random_state if random_state is None else random_state
        nodes, hops = self.table_.simulate(self.network_.source, n_samples, rs)
        return (nodes, hops) if return_hops else nodes

    def walk(self, rng):
        """One protocol-level walk; returns ``(node, hops)``."""
        check_is_fitted(self, "table_")
        if self.mode == "d1":
            return walk_rings_d1(self.network_, self.distribution_, rng, self.force)
        policy = HopPolicy(tuple(self.policy_[1:self.network_.radius]))
        return walk_rings_d2(self.network_, self.distribution_, policy, rng, self.source_stay)

    def exact_law(self, check=None):
        check_is_fitted(self, "table_")
        law = self.table_.oracle(self.network_.source, ring_of=self.network_.ring_of)
        if check if check is not None else not self.force:
            law.check_uniform()
        return law

    def target_probabilities(self):
        check_is_fitted(self, "table_")
        return self.distribution_.node_probabilities(self.network_.ring_of)
