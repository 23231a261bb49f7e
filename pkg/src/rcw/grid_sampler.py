"""Preprocessing-free sampling on the diamond grid ``|i| + |j| <= R``.

Stay probabilities depend only on the ring and on the mass already passed
(carried along with the walk); hop probabilities depend on the position
and are given for the non-negative quadrant, the other quadrants following
by reflection.
"""

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ._walks import WalkTable
from .exceptions import MassExhausted, NotOutwardNeighbor
from .topology import GridSpec, build_grid
from .validation import check_distribution, check_n_samples


def grid_ring_size(k):
    return 1 if k == 0 else 4 * k


def stay_probability(k, dist, cum_mass):
    """``q_k = n_k p_k / (1 - cum_mass)``; exactly 1 on the outer ring.

    ``cum_mass`` is ``sum_{j<k} n_j p_j``, the value the walk carries.
    """
    p = np.asarray(getattr(dist, "p", dist), dtype=float)
    R = len(p) - 1
    if k == R:
        return 1.0
    mass = grid_ring_size(k) * p[k]
    if mass == 0.0:
        return 0.0
    remaining = 1.0 - cum_mass
    if remaining <= 0.0:
        raise MassExhausted(f"no probability mass left at ring {k} but p_{k} > 0")
    return min(1.0, mass / remaining)


def hop_probability(frm, to):
    """Probability that a walk leaving ``frm`` goes to the outward neighbor ``to``."""
    i, j = frm
    i2, j2 = to
    k = abs(i) + abs(j)
    if abs(i2) + abs(j2) != k + 1 or abs(i - i2) + abs(j - j2) != 1:
        raise NotOutwardNeighbor(f"{to} is not an outward neighbor of {frm}")
    if k == 0:
        return 0.25
    if (i == i2 == 0) or (j == j2 == 0):
        return k / (k + 1)                      # along an axis
    a, b = abs(i), abs(j)
    if abs(i2) == a + 1:
        return (2 * a + 1) / (2 * (k + 1))      # away from the j axis
    return (2 * b + 1) / (2 * (k + 1))          # away from the i axis


def outward_neighbors(pos):
    i, j = pos
    k = abs(i) + abs(j)
    cand = ((i + 1, j), (i - 1, j), (i, j + 1), (i, j - 1))
    return [c for c in cand if abs(c[0]) + abs(c[1]) == k + 1]


@dataclass(frozen=True)
class GridWalkState:
    position: tuple
    cum_mass: float

    @property
    def k(self):
        return abs(self.position[0]) + abs(self.position[1])


def walk_grid(spec, dist, rng):
    """One walk from ``(0, 0)``; returns ``(position, hops)``."""
    p = dist.p
    R = spec.radius
    state = GridWalkState((0, 0), 0.0)
    hops = 0
    while True:
        k = state.k
        q = stay_probability(k, dist, state.cum_mass)
        if k == R or rng.random() < q:
            return state.position, hops
        nbrs = outward_neighbors(state.position)
        u = rng.random()
        acc, nxt = 0.0, nbrs[-1]
        for y in nbrs:
            acc += hop_probability(state.position, y)
            if u < acc:
                nxt = y
                break
        state = GridWalkState(nxt, state.cum_mass + grid_ring_size(k) * p[k])
        hops += 1


def sample_grid(spec, dist, rng):
    return walk_grid(spec, dist, rng)[0]


def grid_walk_table(net, dist):
    """Per-node stay and hop table of the grid walk on ``net`` (a built grid)."""
    p = dist.p
    sizes = net.ring_sizes
    cum = np.concatenate([[0.0], np.cumsum(sizes * p)])
    q_ring = [stay_probability(k, dist, cum[k]) for k in range(len(sizes))]
    index = {c: x for x, c in enumerate(net.coords)}
    stay, succ = [], []
    for x, c in enumerate(net.coords):
        stay.append(q_ring[net.ring_of[x]])
        succ.append([(index[y], hop_probability(c, y)) for y in outward_neighbors(c)
                     if y in index])
    return WalkTable(stay, succ)


def grid_oracle(spec, dist, check=True):
    """Exact law of the grid walk.

    With ``check`` the per-ring visit uniformity is asserted (spread below
    1e-12).  Returns an :class:`~rcw.oracle_stats.ExactLaw`.
    """
    net = build_grid(spec)
    dist = check_distribution(dist, net)
    law = grid_walk_table(net, dist).oracle(net.source, ring_of=net.ring_of)
    return law.check_uniform() if check else law


class GridSampler(BaseEstimator):
    """Distance-based sampler on a diamond grid.

    Parameters
    ----------
    distribution : {'uniform', 'pid'}, array-like or DistanceDistribution
    p0 : float, default=0.0
        Source mass for ``'pid'``.
    random_state : int, Generator or None

    Attributes
    ----------
    network_ : RingNetwork
        The grid, with ``coords``.
    distribution_ : DistanceDistribution
    stay_ : ndarray
        Per-ring stay probabilities.
    """

    def __init__(self, distribution="uniform", p0=0.0, random_state=None):
        self.distribution = distribution
        self.p0 = p0
        self.random_state = random_state

    def fit(self, X, y=None):
        """``X`` is a radius, a :class:`GridSpec` or a grid built by ``build_grid``."""
        if isinstance(X, GridSpec) or np.isscalar(X):
            spec = X if isinstance(X, GridSpec) else GridSpec(int(X))
            net = build_grid(spec)
        else:
            net = X
            if net.coords is None:
                raise ValueError("GridSampler needs grid coordinates")
            spec = GridSpec(net.radius)
        self.spec_ = spec
        self.network_ = net
        self.distribution_ = check_distribution(self.distribution, net, self.p0)
        self.table_ = grid_walk_table(net, self.distribution_)
        sizes = net.ring_sizes
        cum = np.concatenate([[0.0], np.cumsum(sizes * self.distribution_.p)])
        self.stay_ = np.array([stay_probability(k, self.distribution_, cum[k])
                               for k in range(len(sizes))])
        return self

    def sample(self, n_samples=1, random_state=None, return_hops=False):
        check_is_fitted(self, "table_")
        n_samples = check_n_samples(n_samples)
        rs = self.random_state if random_state is None else random_state
        nodes, hops = self.table_.simulate(self.network_.source, n_samples, rs)
        return (nodes, hops) if return_hops else nodes

    def sample_coords(self, n_samples=1, random_state=None):
        nodes = self.sample(n_samples, random_state)
        return np.array(self.network_.coords)[nodes]

    def exact_law(self):
        check_is_fitted(self, "table_")
        return self.table_.oracle(self.network_.source, ring_of=self.network_.ring_of)

    def target_probabilities(self):
        check_is_fitted(self, "table_")
        return self.distribution_.node_probabilities(self.network_.ring_of)
