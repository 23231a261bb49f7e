"""Input validation helpers shared by the samplers."""

import numbers

import numpy as np

from . import distributions as D
from .exceptions import DisconnectedRing, InvalidNetwork, NotUniformlyConnected
from .topology import GridSpec, Network, RingNetwork, build_grid, check_uniform_connectivity


def check_network(X):
    """Coerce ``X`` to a :class:`Network` (ring networks use their distance-1 links)."""
    if isinstance(X, Network):
        return X
    if isinstance(X, RingNetwork):
        return X.to_network()
    raise InvalidNetwork(f"expected a Network, got {type(X).__name__}")


def check_ring_network(X, uniform=False, distance=1, allow_stranded=False):
    if isinstance(X, (GridSpec, numbers.Integral)):
        X = build_grid(X)
    if not isinstance(X, RingNetwork):
        raise InvalidNetwork(f"expected a RingNetwork, got {type(X).__name__}")
    if not allow_stranded:
        stranded = X.stranded_nodes()
        if stranded:
            raise DisconnectedRing(f"{len(stranded)} node(s) lack adjacent-ring links", stranded)
    if uniform and not check_uniform_connectivity(X, distance):
        raise NotUniformlyConnected(
            "nodes of some ring differ in their degree towards an adjacent ring"
            + (" (distance-2 links included)" if distance == 2 else ""))
    return X


def check_distribution(distribution, net, p0=0.0):
    """Resolve ``'uniform'``, ``'pid'``, an array or a law into a validated law."""
    if isinstance(distribution, D.DistanceDistribution):
        dist = distribution
    elif isinstance(distribution, str):
        return D.from_spec(distribution, net, p0=p0)
    else:
        dist = D.explicit(np.asarray(distribution, dtype=float))
    return D.check_distance_distribution(dist, net)


def check_n_samples(n_samples):
    if not isinstance(n_samples, numbers.Integral) or n_samples < 0:
        raise ValueError(f"n_samples must be a non-negative integer, got {n_samples!r}")
    return int(n_samples)
