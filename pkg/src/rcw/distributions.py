"""Target sampling laws: per-node weights and distance-based vectors."""

from dataclasses import dataclass

import numpy as np

from .exceptions import InvalidDistribution

NORMALIZATION_TOL = 1e-9


def _readonly(values):
    arr = np.array(values, dtype=float)
    arr.setflags(write=False)
    return arr


def ring_sizes_of(net):
    """Ring sizes of a ring network, grid spec, or explicit size sequence."""
    sizes = getattr(net, "ring_sizes", net)
    return np.asarray(sizes, dtype=np.int64)


@dataclass(frozen=True, eq=False)
class WeightDistribution:
    """Selection with probability ``w(x) / eta`` where ``eta = sum(w)``."""

    weights: np.ndarray

    def __post_init__(self):
        w = _readonly(self.weights)
        if w.ndim != 1 or w.size == 0:
            raise InvalidDistribution("weights must be a non-empty vector")
        if not np.all(np.isfinite(w)) or np.any(w <= 0):
            raise InvalidDistribution("weights must be finite and > 0")
        object.__setattr__(self, "weights", w)

    @property
    def eta(self):
        return float(self.weights.sum())

    def probabilities(self, exclude=None):
        """``w / eta``; with ``exclude`` that node gets 0 and the rest ``w / eta_s``."""
        w = self.weights.copy()
        if exclude is not None:
            w[exclude] = 0.0
        return w / w.sum()


@dataclass(frozen=True, eq=False)
class DistanceDistribution:
    """Per-node selection probability ``p[k]`` for every node of ring ``k``."""

    p: np.ndarray

    def __post_init__(self):
        p = _readonly(self.p)
        if p.ndim != 1 or p.size < 1:
            raise InvalidDistribution("p must be a non-empty vector")
        if not np.all(np.isfinite(p)) or np.any(p < 0):
            raise InvalidDistribution("p must be finite and non-negative")
        object.__setattr__(self, "p", p)

    @property
    def radius(self):
        return len(self.p) - 1

    def ring_mass(self, net):
        return ring_sizes_of(net) * self.p

    def node_probabilities(self, ring_of):
        return self.p[np.asarray(ring_of)]


def validate(dist, net):
    """True iff ``sum_k n_k p_k == 1`` (within 1e-9), ``p_R > 0`` and sizes match."""
    sizes = ring_sizes_of(net)
    if len(sizes) != len(dist.p):
        return False
    if dist.p[-1] <= 0:
        return False
    return abs(float(np.dot(sizes, dist.p)) - 1.0) <= NORMALIZATION_TOL


def check_distance_distribution(dist, net):
    if not validate(dist, net):
        sizes = ring_sizes_of(net)
        if len(sizes) != len(dist.p):
            raise InvalidDistribution(
                f"distribution has {len(dist.p)} rings, network has {len(sizes)}")
        if dist.p[-1] <= 0:
            raise InvalidDistribution("p_R must be > 0 so the last ring stops every walk")
        raise InvalidDistribution(
            f"sum n_k p_k = {float(np.dot(sizes, dist.p))!r}, expected 1")
    return dist


def uniform(net):
    sizes = ring_sizes_of(net)
    return DistanceDistribution(np.full(len(sizes), 1.0 / sizes.sum()))


def inverse_distance(net, p0=0.0):
    """``p_k = c / k`` for ``k >= 1`` with the source keeping mass ``p0``."""
    if not 0.0 <= p0 < 1.0:
        raise InvalidDistribution(f"p0 must lie in [0, 1), got {p0}")
    sizes = ring_sizes_of(net)
    if len(sizes) < 2:
        raise InvalidDistribution("inverse-distance law needs at least one ring")
    k = np.arange(1, len(sizes))
    c = (1.0 - p0) / np.sum(sizes[1:] / k)
    return DistanceDistribution(np.concatenate([[p0], c / k]))


def explicit(p):
    return DistanceDistribution(p)


def from_spec(kind, net, p0=0.0, p=None):
    """Build a law from a config-style description.

    ``kind`` is ``uniform``/``uni``, ``pid`` or ``explicit`` (with ``p``).
    """
    kind = kind.lower()
    if kind in ("uniform", "uni"):
        dist = uniform(net)
    elif kind == "pid":
        dist = inverse_distance(net, p0)
    elif kind == "explicit":
        if p is None:
            raise InvalidDistribution("explicit distribution needs a p vector")
        dist = explicit(p)
    else:
        raise InvalidDistribution(f"unknown distribution kind {kind!r}")
    return check_distance_distribution(dist, net)
