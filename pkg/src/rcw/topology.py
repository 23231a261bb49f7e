"""Network substrates: arbitrary weighted graphs, diamond grids and
concentric-rings networks.

Node ids are dense integers.  In every :class:`RingNetwork` the source is
node ``0`` and the nodes of ring ``k`` occupy a contiguous id block.
"""

from collections import deque
from dataclasses import dataclass

import numpy as np

from .exceptions import (DisconnectedRing, InconsistentDegrees,
                         InvalidNetwork)


def _frozen(values, dtype=float):
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


def _bfs(adjacency, source):
    dist = [-1] * len(adjacency)
    dist[source] = 0
    queue = deque([source])
    while queue:
        x = queue.popleft()
        for y in adjacency[x]:
            if dist[y] < 0:
                dist[y] = dist[x] + 1
                queue.append(y)
    return dist


class Network:
    """Undirected, connected graph whose nodes carry positive weights.

    Parameters
    ----------
    adjacency : sequence of sequences of int
        ``adjacency[x]`` lists the neighbors of node ``x``.
    weights : array-like of float, optional
        Per-node weight ``w(x) > 0``.  Defaults to all ones.
    """

    def __init__(self, adjacency, weights=None):
        adj = tuple(tuple(sorted(int(y) for y in nbrs)) for nbrs in adjacency)
        n = len(adj)
        if n == 0:
            raise InvalidNetwork("a network needs at least one node")
        for x, nbrs in enumerate(adj):
            if len(set(nbrs)) != len(nbrs):
                raise InvalidNetwork(f"duplicate edge at node {x}")
            for y in nbrs:
                if not 0 <= y < n:
                    raise InvalidNetwork(f"node {x} has unknown neighbor {y}")
                if y == x:
                    raise InvalidNetwork(f"self-loop at node {x}")
        for x, nbrs in enumerate(adj):
            for y in nbrs:
                if x not in adj[y]:
                    raise InvalidNetwork(f"edge {x}-{y} is not symmetric")
        if min(_bfs(adj, 0)) < 0:
            raise InvalidNetwork("network is not connected")
        if weights is None:
            weights = np.ones(n)
        weights = _frozen(weights)
        if weights.shape != (n,):
            raise InvalidNetwork(f"expected {n} weights, got shape {weights.shape}")
        if not np.all(np.isfinite(weights)) or np.any(weights <= 0):
            raise InvalidNetwork("all node weights must be finite and > 0")
        self.adjacency = adj
        self.weights = weights

    @classmethod
    def from_edges(cls, edges, n_nodes=None, weights=None):
        edges = [(int(u), int(v)) for u, v in edges]
        if n_nodes is None:
            n_nodes = 1 + max((max(e) for e in edges), default=0)
        adj = [set() for _ in range(n_nodes)]
        for u, v in edges:
            if u == v:
                raise InvalidNetwork(f"self-loop at node {u}")
            if not (0 <= u < n_nodes and 0 <= v < n_nodes):
                raise InvalidNetwork(f"edge {u}-{v} references an unknown node")
            adj[u].add(v)
            adj[v].add(u)
        return cls(adj, weights)

    @property
    def n_nodes(self):
        return len(self.adjacency)

    @property
    def eta(self):
        return float(self.weights.sum())

    def edges(self):
        return [(x, y) for x, nbrs in enumerate(self.adjacency) for y in nbrs if x < y]

    def distances_from(self, source):
        return _bfs(self.adjacency, source)

    def with_weights(self, weights):
        return Network(self.adjacency, weights)

    def __repr__(self):
        return f"Network(n_nodes={self.n_nodes}, n_edges={len(self.edges())})"


class RingNetwork:
    """Concentric-rings network around a source.

    Only links between consecutive rings are kept in ``up``/``down``;
    optional ``up2``/``down2`` hold links that skip one ring.

    Parameters
    ----------
    rings : sequence of sequences of int
        ``rings[k]`` is the node set of ring ``k``; ``rings[0]`` must be the
        single source node.
    up : sequence of sequences of int
        ``up[x]`` are the neighbors of ``x`` in the next ring.
    up2 : sequence of sequences of int, optional
        Neighbors two rings further out.
    coords, angles : optional
        Grid coordinates or deployment angles, carried for reporting.
    weights : array-like, optional
        Node weights used when the network is handed to the tree sampler.
    """

    def __init__(self, rings, up, up2=None, coords=None, angles=None, weights=None):
        rings = tuple(tuple(int(x) for x in ring) for ring in rings)
        n = sum(len(r) for r in rings)
        if not rings or len(rings[0]) != 1:
            raise InvalidNetwork("ring 0 must contain exactly the source")
        if any(len(r) == 0 for r in rings):
            raise InvalidNetwork("every ring must be non-empty")
        ring_of = np.full(n, -1, dtype=np.int64)
        for k, ring in enumerate(rings):
            for x in ring:
                if not 0 <= x < n or ring_of[x] >= 0:
                    raise InvalidNetwork(f"rings do not partition 0..{n - 1}")
                ring_of[x] = k
        ring_of.setflags(write=False)
        self.rings = rings
        self.ring_of = ring_of
        self.up, self.down = self._links(up, 1)
        self.up2, self.down2 = (None, None) if up2 is None else self._links(up2, 2)
        self.coords = None if coords is None else tuple(tuple(c) for c in coords)
        self.angles = None if angles is None else _frozen(angles)
        if weights is None:
            weights = np.ones(n)
        self.weights = _frozen(weights)
        if self.weights.shape != (n,) or np.any(self.weights <= 0):
            raise InvalidNetwork("weights must be positive, one per node")

    def _links(self, outward, step):
        n = len(self.ring_of)
        if len(outward) != n:
            raise InvalidNetwork(f"expected {n} adjacency rows, got {len(outward)}")
        out = tuple(tuple(int(y) for y in row) for row in outward)
        back = [[] for _ in range(n)]
        for x, row in enumerate(out):
            if len(set(row)) != len(row):
                raise InvalidNetwork(f"duplicate link at node {x}")
            for y in row:
                if not 0 <= y < n or self.ring_of[y] != self.ring_of[x] + step:
                    raise InvalidNetwork(
                        f"link {x}->{y} does not go exactly {step} ring(s) outward")
                back[y].append(x)
        return out, tuple(tuple(b) for b in back)

    @property
    def n_nodes(self):
        return len(self.ring_of)

    @property
    def radius(self):
        return len(self.rings) - 1

    @property
    def source(self):
        return self.rings[0][0]

    @property
    def ring_sizes(self):
        return np.array([len(r) for r in self.rings], dtype=np.int64)

    @property
    def has_distance2(self):
        return self.up2 is not None

    def delta(self, x):
        return len(self.up[x])

    def gamma(self, x):
        return len(self.down[x])

    def stranded_nodes(self):
        """Nodes lacking an outward link (rings < R) or an inward link (rings >= 1)."""
        R = self.radius
        return sorted(x for x in range(self.n_nodes)
                      if (self.ring_of[x] < R and not self.up[x])
                      or (self.ring_of[x] > 0 and not self.down[x]))

    def to_network(self, weights=None):
        """Plain :class:`Network` over the distance-1 links."""
        adj = [list(self.up[x]) + list(self.down[x]) for x in range(self.n_nodes)]
        return Network(adj, self.weights if weights is None else weights)

    def __repr__(self):
        return f"RingNetwork(ring_sizes={self.ring_sizes.tolist()})"


@dataclass(frozen=True)
class GridSpec:
    radius: int

    def __post_init__(self):
        if int(self.radius) != self.radius or self.radius < 1:
            raise InvalidNetwork(f"grid radius must be an integer >= 1, got {self.radius!r}")

    @property
    def ring_sizes(self):
        return np.array([1] + [4 * k for k in range(1, self.radius + 1)], dtype=np.int64)


@dataclass(frozen=True)
class GeometricDeployment:
    rings: int
    per_ring: int
    beta: float
    seed: int = 0

    def __post_init__(self):
        if self.rings < 1 or self.per_ring < 1:
            raise InvalidNetwork("rings and per_ring must be >= 1")
        if not 0 < self.beta <= 360:
            raise InvalidNetwork(f"beta must be in (0, 360], got {self.beta}")


def grid_ring(k):
    """Lattice points at L1 distance ``k``, counterclockwise from ``(k, 0)``."""
    if k == 0:
        return [(0, 0)]
    pts = [(k - t, t) for t in range(k)]
    pts += [(-t, k - t) for t in range(k)]
    pts += [(-k + t, -t) for t in range(k)]
    pts += [(t, -k + t) for t in range(k)]
    return pts


def build_grid(spec):
    """Diamond grid ``{(i, j): |i| + |j| <= R}`` as a :class:`RingNetwork`."""
    if not isinstance(spec, GridSpec):
        spec = GridSpec(spec)
    coords = [c for k in range(spec.radius + 1) for c in grid_ring(k)]
    index = {c: x for x, c in enumerate(coords)}
    rings, start = [], 0
    for k in range(spec.radius + 1):
        size = 1 if k == 0 else 4 * k
        rings.append(range(start, start + size))
        start += size
    up = []
    for (i, j) in coords:
        k = abs(i) + abs(j)
        nbrs = ((i + 1, j), (i - 1, j), (i, j + 1), (i, j - 1))
        up.append(sorted(index[c] for c in nbrs
                         if c in index and abs(c[0]) + abs(c[1]) == k + 1))
    return RingNetwork(rings, up, coords=coords)


def _circulant(n_from, n_to, degree, offset_from, offset_to):
    # node a -> (a*degree + t) mod n_to, t < degree; exact in/out degrees
    return [sorted(offset_to + (a * degree + t) % n_to for t in range(degree))
            for a in range(n_from)]


def _per_ring(values, R, name, leading):
    """Normalise a per-ring sequence to length R+1 (leading entry optional)."""
    values = list(values)
    if len(values) == R + 1:
        return values
    if len(values) == R:
        return [leading] + values if name == "gamma" else values + [leading]
    raise InconsistentDegrees(f"{name} needs {R} or {R + 1} entries, got {len(values)}")


def build_uniform_rings(ring_sizes, delta, gamma, delta2=None):
    """Concentric rings with uniform connectivity.

    Parameters
    ----------
    ring_sizes : sequence of int
        ``n_0 .. n_R`` with ``n_0 == 1``.
    delta : sequence of int
        Up-degrees ``delta_0 .. delta_{R-1}`` (a trailing ``delta_R = 0`` may
        be included).
    gamma : sequence of int
        Down-degrees ``gamma_1 .. gamma_R`` (a leading placeholder for ring 0
        may be included).
    delta2 : sequence of int or 'compose', optional
        Up-degrees towards ring ``k+2`` for ``k = 0 .. R-2`` (zero entries
        allowed), wired circulantly.  ``'compose'`` instead links every node
        to all nodes two hops outward, see :func:`compose_distance2`.

    Consecutive rings are wired circulantly: local node ``a`` of ring ``k``
    links to local nodes ``(a * delta_k + t) mod n_{k+1}`` for
    ``t < delta_k``.
    """
    sizes = [int(n) for n in ring_sizes]
    R = len(sizes) - 1
    if R < 1 or sizes[0] != 1 or min(sizes) < 1:
        raise InconsistentDegrees("ring sizes must start with 1 and be positive")
    delta = [int(d) for d in _per_ring(delta, R, "delta", 0)]
    gamma = [None if g is None else int(g) for g in _per_ring(gamma, R, "gamma", None)]
    if delta[R] != 0:
        raise InconsistentDegrees("the outermost ring cannot have outward links")
    offsets = np.concatenate([[0], np.cumsum(sizes)]).tolist()
    up = []
    for k in range(R + 1):
        if k == R:
            up += [[] for _ in range(sizes[k])]
            continue
        if gamma[k + 1] is None or gamma[k + 1] < 1:
            raise InconsistentDegrees(f"gamma_{k + 1} must be >= 1")
        if sizes[k] * delta[k] != sizes[k + 1] * gamma[k + 1]:
            raise InconsistentDegrees(
                f"n_{k}*delta_{k} = {sizes[k] * delta[k]} != "
                f"n_{k + 1}*gamma_{k + 1} = {sizes[k + 1] * gamma[k + 1]}")
        if delta[k] > sizes[k + 1]:
            raise InconsistentDegrees(f"delta_{k} exceeds n_{k + 1}")
        up += _circulant(sizes[k], sizes[k + 1], delta[k], offsets[k], offsets[k + 1])
    up2 = None
    if isinstance(delta2, str):
        if delta2 != "compose":
            raise ValueError(f"delta2 must be a sequence or 'compose', got {delta2!r}")
        rings = [range(offsets[k], offsets[k + 1]) for k in range(R + 1)]
        return compose_distance2(RingNetwork(rings, up))
    if delta2 is not None:
        delta2 = [int(d) for d in delta2]
        if len(delta2) != R - 1:
            raise InconsistentDegrees(f"delta2 needs {R - 1} entries, got {len(delta2)}")
        up2 = []
        for k in range(R + 1):
            if k >= R - 1 or delta2[k] == 0:
                up2 += [[] for _ in range(sizes[k])]
                continue
            if (sizes[k] * delta2[k]) % sizes[k + 2] or delta2[k] > sizes[k + 2]:
                raise InconsistentDegrees(
                    f"n_{k}*delta2_{k} = {sizes[k] * delta2[k]} is not a multiple of "
                    f"n_{k + 2} = {sizes[k + 2]} (or delta2_{k} > n_{k + 2})")
            up2 += _circulant(sizes[k], sizes[k + 2], delta2[k], offsets[k], offsets[k + 2])
    rings = [range(offsets[k], offsets[k + 1]) for k in range(R + 1)]
    return RingNetwork(rings, up, up2=up2)


def compose_distance2(net):
    """Copy of ``net`` whose distance-2 links are the two-hop outward paths.

    ``up2[x]`` is the set of ring ``k+2`` nodes reachable through some
    ``y`` in ``up[x]``.  On circulant wiring these sets are contiguous
    windows of equal size, so uniform connectivity carries over to
    distance 2.
    """
    up2 = [sorted({z for y in net.up[x] for z in net.up[y]}) for x in range(net.n_nodes)]
    return RingNetwork(net.rings, net.up, up2=up2, coords=net.coords, angles=net.angles,
                       weights=net.weights)


def rings_from_network(net, source=0):
    """Rings view of an arbitrary network: BFS layers around ``source``.

    Node ids are relabelled so that rings occupy contiguous blocks (the
    source becomes node 0); links inside a ring are dropped.  Returns
    ``(ring_network, order)`` where ``order[new_id]`` is the original id.
    """
    dist = _bfs(net.adjacency, source)
    order = sorted(range(net.n_nodes), key=lambda x: (dist[x], x != source, x))
    new = {x: i for i, x in enumerate(order)}
    R = max(dist)
    rings, start = [], 0
    for k in range(R + 1):
        size = sum(1 for d in dist if d == k)
        rings.append(range(start, start + size))
        start += size
    up = [[new[y] for y in sorted(net.adjacency[x]) if dist[y] == dist[x] + 1] for x in order]
    weights = np.asarray(net.weights)[order]
    return RingNetwork(rings, up, weights=weights), np.array(order)


def angular_distance(a, b):
    d = np.abs(np.asarray(a) - np.asarray(b)) % 360.0
    return np.minimum(d, 360.0 - d)


def build_geometric(dep, strict=True):
    """Random geometric concentric-rings deployment.

    Every ring ``1..R`` gets ``per_ring`` nodes at angles drawn uniformly from
    ``[0, 360)``.  Two nodes of consecutive rings are linked iff their circular
    angular distance is at most ``beta / 2``.  The source links to all of
    ring 1.

    With ``strict`` (the default) a node without an outward link (below ring R)
    or without an inward link raises :class:`DisconnectedRing`; otherwise
    such nodes are kept and reported by :meth:`RingNetwork.stranded_nodes`.
    """
    R, m = int(dep.rings), int(dep.per_ring)
    rng = np.random.default_rng(dep.seed)
    angles = rng.uniform(0.0, 360.0, size=(R, m))
    half = dep.beta / 2.0
    up = [list(range(1, m + 1))]
    for k in range(1, R + 1):
        base_next = 1 + k * m
        if k == R:
            up += [[] for _ in range(m)]
            continue
        linked = angular_distance(angles[k - 1][:, None], angles[k][None, :]) <= half
        up += [(np.flatnonzero(row) + base_next).tolist() for row in linked]
    rings = [[0]] + [range(1 + k * m, 1 + (k + 1) * m) for k in range(R)]
    all_angles = np.concatenate([[np.nan], angles.ravel()])
    net = RingNetwork(rings, up, angles=all_angles)
    if strict:
        stranded = net.stranded_nodes()
        if stranded:
            raise DisconnectedRing(
                f"{len(stranded)} node(s) lack a neighbor in an adjacent ring "
                f"(beta={dep.beta}, seed={dep.seed})", stranded)
    return net


def check_uniform_connectivity(net, distance=1):
    """True iff all nodes of each ring share their up and down degrees.

    With ``distance=2`` the links that skip one ring must be uniform too.
    """
    tables = [(net.up, net.down)]
    if distance == 2:
        if not net.has_distance2:
            return False
        tables.append((net.up2, net.down2))
    for up, down in tables:
        for ring in net.rings:
            if len({len(up[x]) for x in ring}) > 1 or len({len(down[x]) for x in ring}) > 1:
                return False
    return True


def ring_degrees(net):
    """Per-ring ``(delta_k, gamma_k)`` of a uniformly connected network."""
    return [(len(net.up[ring[0]]), len(net.down[ring[0]])) for ring in net.rings]
