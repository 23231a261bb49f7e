"""Sampling an arbitrary connected network with probability proportional to
node weight.

Preprocessing builds a spanning tree and runs the distributed weight
aggregation on :class:`~rcw.simnet.SimEngine`; afterwards every node ``i``
holds, per tree neighbor ``x``, the total weight ``T_i(x)`` of the subtree
behind ``x``.  A sampling walk then only ever moves away from its source.
"""

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ._walks import WalkTable
from .exceptions import DegenerateNetwork
from .simnet import NodeTask, SimEngine
from .topology import _bfs
from .validation import check_n_samples, check_network


@dataclass(frozen=True)
class SpanningTree:
    adjacency: tuple
    root: int

    @property
    def n_nodes(self):
        return len(self.adjacency)

    def diameter(self):
        return tree_diameter(self.adjacency)


def tree_diameter(adjacency):
    if len(adjacency) == 1:
        return 0
    d0 = _bfs(adjacency, 0)
    far = int(np.argmax(d0))
    return max(_bfs(adjacency, far))


def tree_center(net):
    """Minimum-eccentricity node (lowest id on ties), by BFS from every node."""
    ecc = [max(_bfs(net.adjacency, x)) for x in range(net.n_nodes)]
    return int(np.argmin(ecc))


def build_spanning_tree(net):
    """BFS tree rooted at a center of ``net``; neighbors explored by id."""
    net = check_network(net)
    root = tree_center(net)
    adj = [[] for _ in range(net.n_nodes)]
    seen = {root}
    frontier = [root]
    while frontier:
        nxt = []
        for x in frontier:
            for y in net.adjacency[x]:
                if y not in seen:
                    seen.add(y)
                    adj[x].append(y)
                    adj[y].append(x)
                    nxt.append(y)
        frontier = nxt
    return SpanningTree(tuple(tuple(sorted(a)) for a in adj), root)


class Weight(NamedTuple):
    value: float
    kind = "WEIGHT"


class WeightAggregationTask(NodeTask):
    """Per-node aggregation: once weights from all neighbors but ``y`` are
    known, report ``w(i) + sum of those`` to ``y``."""

    def __init__(self, weight, neighbors):
        self.weight = float(weight)
        self.neighbors = tuple(neighbors)
        self.T = {}
        self.sent = set()

    def on_start(self, engine, node):
        if len(self.neighbors) == 1:
            y = self.neighbors[0]
            self.sent.add(y)
            engine.send(node, y, Weight(self.weight))

    def on_message(self, engine, node, src, payload):
        self.T[src] = payload.value
        for y in self.neighbors:
            if y == src or y in self.sent:
                continue
            if all(z in self.T for z in self.neighbors if z != y):
                self.sent.add(y)
                total = self.weight + sum(self.T[z] for z in self.neighbors if z != y)
                engine.send(node, y, Weight(total))

    @property
    def done(self):
        return len(self.T) == len(self.neighbors)


@dataclass(frozen=True, eq=False)
class AggregatedTree:
    """Spanning tree plus aggregated subtree weights ``T[(i, x)]``."""

    adjacency: tuple
    weights: np.ndarray
    T: dict
    root: int = 0
    rounds: int = 0
    messages: int = 0

    @property
    def n_nodes(self):
        return len(self.adjacency)

    @property
    def eta(self):
        return float(self.weights.sum())

    def diameter(self):
        return tree_diameter(self.adjacency)

    def node_totals(self):
        """``w(i) + sum_x T_i(x)`` for every node; each should equal ``eta``."""
        return np.array([self.weights[i] + sum(self.T[(i, x)] for x in self.adjacency[i])
                         for i in range(self.n_nodes)])

    def parents(self, source):
        parent = [-1] * self.n_nodes
        parent[source] = source
        stack = [source]
        while stack:
            x = stack.pop()
            for y in self.adjacency[x]:
                if parent[y] < 0:
                    parent[y] = x
                    stack.append(y)
        return parent

    def stay_and_hops(self, node, came_from, exclude_source=False):
        """Local rule at ``node`` for a walk that arrived from ``came_from``.

        A walk at its source arrives from the source itself, so every
        neighbor is a candidate.  Returns ``(q, [(candidate, h), ...])``.
        """
        w = float(self.weights[node])
        cands = [z for z in self.adjacency[node] if z != came_from]
        Ts = [self.T[(node, z)] for z in cands]
        rest = sum(Ts)
        if exclude_source and node == came_from:
            q = 0.0
        else:
            q = w / (w + rest)
        return q, [(z, t / rest) for z, t in zip(cands, Ts)] if rest > 0 else []

    def walk_table(self, source, exclude_source=False):
        if exclude_source and self.n_nodes < 2:
            raise DegenerateNetwork("cannot exclude the source of a one-node network")
        parent = self.parents(source)
        stay, succ = [], []
        for i in range(self.n_nodes):
            q, hops = self.stay_and_hops(i, parent[i], exclude_source)
            stay.append(q)
            succ.append(hops)
        return WalkTable(stay, succ)


def aggregate_weights(net, tree, engine=None, max_rounds=None):
    """Run the distributed aggregation over ``tree`` and collect ``T_i(x)``.

    ``tree`` is a :class:`SpanningTree` or a bare tree adjacency.  The engine
    counters end up on the returned object as ``rounds`` and ``messages``.
    """
    net = check_network(net)
    adjacency = tree.adjacency if isinstance(tree, SpanningTree) else tuple(map(tuple, tree))
    root = tree.root if isinstance(tree, SpanningTree) else 0
    if engine is None:
        engine = SimEngine(adjacency, seed=0)
    tasks = [WeightAggregationTask(net.weights[i], adjacency[i]) for i in range(net.n_nodes)]
    for i, task in enumerate(tasks):
        engine.register(i, task)
    rounds, messages = engine.run_until_quiescent(max_rounds)
    T = {(i, x): t for i, task in enumerate(tasks) for x, t in task.T.items()}
    return AggregatedTree(adjacency, net.weights, T, root, rounds, messages)


def walk(agg, source, rng, exclude_source=False):
    """One walk following the message protocol.  Returns ``(node, hops)``."""
    if exclude_source and agg.n_nodes < 2:
        raise DegenerateNetwork("cannot exclude the source of a one-node network")
    node, came_from, hops = source, source, 0
    while True:
        q, cands = agg.stay_and_hops(node, came_from, exclude_source)
        if not cands or rng.random() < q:
            return node, hops
        u = rng.random()
        acc = 0.0
        nxt = cands[-1][0]
        for z, h in cands:
            acc += h
            if u < acc:
                nxt = z
                break
        came_from, node = node, nxt
        hops += 1


def sample(agg, source, rng):
    return walk(agg, source, rng)[0]


def sample_excluding_source(agg, source, rng):
    return walk(agg, source, rng, exclude_source=True)[0]


def walk_oracle(agg, source, exclude_source=False):
    """Exact per-node selection probabilities of walks from ``source``."""
    return agg.walk_table(source, exclude_source).oracle(source).p


class TreeSampler(BaseEstimator):
    """Weighted node sampler for arbitrary connected networks.

    Parameters
    ----------
    exclude_source : bool, default=False
        Never return the source; other nodes get ``w(x) / eta_s``.
    source : int, default=0
        Default source for :meth:`sample` and :meth:`exact_law`.
    random_state : int, Generator or None
        Default seed for :meth:`sample`.
    max_rounds : int or None
        Round budget for the aggregation run.

    Attributes
    ----------
    tree_ : SpanningTree
    aggregated_ : AggregatedTree
    n_messages_, n_rounds_ : int
        Cost of the aggregation run.
    """

    def __init__(self, exclude_source=False, source=0, random_state=None, max_rounds=None):
        self.exclude_source = exclude_source
        self.source = source
        self.random_state = random_state
        self.max_rounds = max_rounds

    def fit(self, X, y=None):
        net = check_network(X)
        self.network_ = net
        self.tree_ = build_spanning_tree(net)
        self.aggregated_ = aggregate_weights(net, self.tree_, max_rounds=self.max_rounds)
        self.n_messages_ = self.aggregated_.messages
        self.n_rounds_ = self.aggregated_.rounds
        self.diameter_ = self.tree_.diameter()
        self._tables = {}
        return self

    def _table(self, source):
        check_is_fitted(self, "aggregated_")
        source = self.source if source is None else int(source)
        key = (source, bool(self.exclude_source))
        if key not in self._tables:
            self._tables[key] = self.aggregated_.walk_table(source, self.exclude_source)
        return source, self._tables[key]

    def sample(self, n_samples=1, source=None, random_state=None, return_hops=False):
        """Draw ``n_samples`` node ids (and hop counts with ``return_hops``)."""
        n_samples = check_n_samples(n_samples)
        source, table = self._table(source)
        rs = self.random_state if random_state is None else random_state
        nodes, hops = table.simulate(source, n_samples, rs)
        return (nodes, hops) if return_hops else nodes

    def exact_law(self, source=None):
        source, table = self._table(source)
        return table.oracle(source)

    def target_probabilities(self, source=None):
        check_is_fitted(self, "aggregated_")
        source = self.source if source is None else int(source)
        dist_w = self.network_.weights.copy()
        if self.exclude_source:
            dist_w[source] = 0.0
        return dist_w / dist_w.sum()
