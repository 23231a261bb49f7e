"""Attachment-point overlays for rings networks without uniform connectivity.

Between rings ``k`` and ``k + 1`` there are ``r_k = lcm(n_k, n_{k+1})``
attachment points on each side: ``r_k / n_k`` upward points per ring-``k``
node and ``r_k / n_{k+1}`` downward points per ring-``(k+1)`` node.  Once
every upward point is matched to a downward point on a physical neighbor,
hopping to a uniformly chosen upward point behaves like a uniformly
connected network and the distance-1 ring walk applies unchanged.
"""

import math

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_flow
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .exceptions import AapFailure, InvalidNetwork
from .ring_sampler import RingSampler, sample_rings_d1
from .simnet import NodeTask, SimEngine
from .topology import GeometricDeployment, build_geometric
from .validation import check_distribution, check_ring_network

ATTACH, OK, REFUSE = ("ATTACH",), ("OK",), ("REFUSE",)


def ring_lcms(net):
    """``r_k = lcm(n_k, n_{k+1})`` for ``k = 0 .. R-1`` (Python ints, no overflow)."""
    sizes = [int(n) for n in net.ring_sizes]
    return [math.lcm(a, b) for a, b in zip(sizes, sizes[1:])]


def halls_condition(net):
    """Per ring ``k`` in ``[1, R)``: does ``n_{k+1} max gamma_{k+1} <= n_k min delta_k`` hold?

    Integer arithmetic only.
    """
    sizes = [int(n) for n in net.ring_sizes]
    out = {}
    for k in range(1, net.radius):
        min_delta = min(len(net.up[x]) for x in net.rings[k])
        max_gamma = max(len(net.down[y]) for y in net.rings[k + 1])
        out[k] = sizes[k + 1] * max_gamma <= sizes[k] * min_delta
    return out


def matching_exists(net, k):
    """Whether any complete point assignment exists between rings ``k`` and ``k+1``.

    Solved as a max-flow problem.  This bounds what any assignment protocol
    can achieve and is reported as a diagnostic only.
    """
    r = ring_lcms(net)[k]
    lower, upper = net.rings[k], net.rings[k + 1]
    a, b = r // len(lower), r // len(upper)
    li = {x: i + 1 for i, x in enumerate(lower)}
    ui = {y: len(lower) + 1 + j for j, y in enumerate(upper)}
    sink = len(lower) + len(upper) + 1
    rows, cols, caps = [], [], []
    for x in lower:
        rows.append(0), cols.append(li[x]), caps.append(a)
        for y in net.up[x]:
            rows.append(li[x]), cols.append(ui[y]), caps.append(a)
    for y in upper:
        rows.append(ui[y]), cols.append(sink), caps.append(b)
    graph = csr_matrix((np.array(caps, dtype=np.int32), (rows, cols)),
                       shape=(sink + 1, sink + 1))
    return maximum_flow(graph, 0, sink).flow_value == r


class AttachmentOverlay:
    """A completed assignment of attachment points over a :class:`RingNetwork`.

    Exposes the same ring interface as the network itself, with ``up[x]``
    the multiset of nodes hosting the downward ends of ``x``'s points.
    """

    def __init__(self, network, points, messages=0, rounds=0):
        self.network = network
        self.points = tuple(tuple(int(y) for y in row) for row in points)
        self.lcm = tuple(ring_lcms(network))
        self.messages = messages
        self.rounds = rounds
        down = np.zeros(network.n_nodes, dtype=np.int64)
        for row in self.points:
            for y in row:
                down[y] += 1
        self.down_points = down

    rings = property(lambda self: self.network.rings)
    ring_of = property(lambda self: self.network.ring_of)
    ring_sizes = property(lambda self: self.network.ring_sizes)
    radius = property(lambda self: self.network.radius)
    source = property(lambda self: self.network.source)
    n_nodes = property(lambda self: self.network.n_nodes)
    up = property(lambda self: self.points)
    up2 = None
    has_distance2 = False

    def delta(self, x):
        return len(self.points[x])

    def gamma(self, x):
        return int(self.down_points[x])

    def verify(self):
        """Check point counts and that every point sits on a physical link."""
        net = self.network
        for k, r in enumerate(self.lcm):
            a, b = r // len(net.rings[k]), r // len(net.rings[k + 1])
            for x in net.rings[k]:
                if len(self.points[x]) != a:
                    raise InvalidNetwork(f"node {x} has {len(self.points[x])} points, expected {a}")
                if not set(self.points[x]) <= set(net.up[x]):
                    raise InvalidNetwork(f"node {x} has a point off its links")
            for y in net.rings[k + 1]:
                if self.down_points[y] != b:
                    raise InvalidNetwork(f"node {y} hosts {self.down_points[y]} points, "
                                         f"expected {b}")
        return self


class _Abort(Exception):
    pass


class AapTask(NodeTask):
    """One node of the assignment protocol.

    As requester it asks a random remaining candidate for a point, one
    request at a time, until all its points are placed or no candidate is
    left.  As granter it hands out its downward points first come, first
    served.
    """

    def __init__(self, points, candidates, free, stop_on_failure=False):
        self.ap = points
        self.C = list(candidates)
        self.free = free
        self.granted = []
        self.stop_on_failure = stop_on_failure

    @property
    def failed(self):
        return self.ap > 0

    def _request(self, engine, node):
        if self.ap == 0:
            return
        if not self.C:
            if self.stop_on_failure:
                raise _Abort(node)
            return
        c = self.C[engine.rng.randrange(len(self.C))]
        engine.send(node, c, ATTACH)

    def on_start(self, engine, node):
        self._request(engine, node)

    def on_message(self, engine, node, src, payload):
        if payload is ATTACH or payload == ATTACH:
            if self.free > 0:
                self.free -= 1
                engine.send(node, src, OK)
            else:
                engine.send(node, src, REFUSE)
        elif payload == OK:
            self.ap -= 1
            self.granted.append(src)
            self._request(engine, node)
        else:
            self.C.remove(src)
            self._request(engine, node)


def message_bound(net):
    """Upper bound on protocol messages: two per grant plus two per refusal."""
    lcms = ring_lcms(net)
    refusals = sum(len(net.rings[k]) * max(len(net.up[x]) for x in net.rings[k])
                   for k in range(net.radius))
    return 2 * sum(lcms) + 2 * refusals


def assign_attachment_points(net, engine=None, seed=0, stop_on_failure=False,
                             max_rounds=None):
    """Run the assignment protocol over all ring pairs at once.

    Returns an :class:`AttachmentOverlay`, or raises :class:`AapFailure`
    naming the nodes left with unplaced points.  ``stop_on_failure`` aborts
    at the first such node, which is enough when only success matters.
    """
    net = check_ring_network(net, allow_stranded=True)
    if engine is None:
        adjacency = [list(net.up[x]) + list(net.down[x]) for x in range(net.n_nodes)]
        engine = SimEngine(adjacency, seed=seed)
    lcms = ring_lcms(net)
    R = net.radius
    tasks = []
    for x in range(net.n_nodes):
        k = int(net.ring_of[x])
        n_k = len(net.rings[k])
        ap = lcms[k] // n_k if k < R else 0
        free = lcms[k - 1] // n_k if k > 0 else 0
        tasks.append(AapTask(ap, net.up[x], free, stop_on_failure))
        engine.register(x, tasks[-1])
    if max_rounds is None:
        # every request takes two rounds; a node makes at most ap + |C| of them
        max_rounds = 2 * max(t.ap + len(t.C) for t in tasks) + 2
    try:
        rounds, messages = engine.run_until_quiescent(max_rounds)
    except _Abort as stop:
        raise AapFailure({stop.args[0]}, engine.rounds_elapsed, engine.messages_sent) from None
    failed = [x for x, t in enumerate(tasks) if t.failed]
    if failed:
        raise AapFailure(failed, rounds, messages)
    return AttachmentOverlay(net, [t.granted for t in tasks], messages, rounds)


def _trial_seeds(seed, beta_index, trial):
    state = np.random.SeedSequence((seed, beta_index, trial)).generate_state(2)
    return int(state[0]), int(state[1])


def success_rate_experiment(beta_list, trials, seed=0, rings=100, per_ring=100,
                            diagnostics=True):
    """Fraction of fresh geometric deployments on which the assignment succeeds.

    Each row also reports, as diagnostics, the fraction of deployments that
    satisfy the Hall-type degree condition on every ring and the fraction on
    which a complete assignment exists at all.

    Returns a list of dicts with keys ``beta``, ``success_rate``,
    ``halls_rate``, ``matchable_rate`` and ``trials``.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rows = []
    for i, beta in enumerate(beta_list):
        ok = halls = matchable = 0
        for t in range(trials):
            dep_seed, run_seed = _trial_seeds(seed, i, t)
            net = build_geometric(GeometricDeployment(rings, per_ring, beta, dep_seed),
                                  strict=False)
            try:
                assign_attachment_points(net, seed=run_seed, stop_on_failure=True)
                ok += 1
            except AapFailure:
                pass
            if diagnostics:
                halls += all(halls_condition(net).values())
                matchable += all(matching_exists(net, k) for k in range(net.radius))
        row = {"beta": beta, "success_rate": ok / trials, "trials": trials}
        if diagnostics:
            row["halls_rate"] = halls / trials
            row["matchable_rate"] = matchable / trials
        rows.append(row)
    return rows


class OverlaySampler(BaseEstimator):
    """Distance-based sampler over an attachment-point overlay.

    Parameters
    ----------
    distribution : {'uniform', 'pid'}, array-like or DistanceDistribution
    p0 : float
        Source mass for ``'pid'``.
    aap_seed : int
        Seed of the assignment run when ``fit`` gets a bare network.
    random_state : int, Generator or None

    Attributes
    ----------
    overlay_ : AttachmentOverlay
    sampler_ : RingSampler
        Distance-1 ring sampler fitted on the overlay.
    """

    def __init__(self, distribution="uniform", p0=0.0, aap_seed=0, random_state=None):
        self.distribution = distribution
        self.p0 = p0
        self.aap_seed = aap_seed
        self.random_state = random_state

    def fit(self, X, y=None):
        """``X`` is an :class:`AttachmentOverlay` or a network to run AAP on."""
        ov = X if isinstance(X, AttachmentOverlay) else assign_attachment_points(X, seed=self.aap_seed)
        self.overlay_ = ov.verify()
        self.sampler_ = RingSampler(self.distribution, mode="d1", p0=self.p0,
                                    random_state=self.random_state).fit(ov)
        return self

    def sample(self, n_samples=1, random_state=None, return_hops=False):
        check_is_fitted(self, "sampler_")
        return self.sampler_.sample(n_samples, random_state, return_hops)

    def walk(self, rng):
        check_is_fitted(self, "sampler_")
        return self.sampler_.walk(rng)

    def exact_law(self):
        check_is_fitted(self, "sampler_")
        return self.sampler_.exact_law()

    def target_probabilities(self):
        check_is_fitted(self, "sampler_")
        return self.sampler_.target_probabilities()


def overlay_sample(ov, dist, rng):
    """One distance-1 walk hopping over uniformly chosen attachment points."""
    return sample_rings_d1(ov, check_distribution(dist, ov), rng)
