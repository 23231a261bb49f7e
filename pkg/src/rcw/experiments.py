"""Scaled reproductions of the simulation experiments on geometric deployments."""

import numpy as np
from scipy.stats import ks_2samp

from .exceptions import DisconnectedRing
from .oracle_stats import ideal_sampler, relative_error
from .overlay import OverlaySampler, assign_attachment_points
from .ring_sampler import RingSampler
from .topology import GeometricDeployment, build_geometric


def connected_deployment(rings, per_ring, beta, seed=0, max_tries=1000):
    """First deployment, trying seeds ``seed, seed + 1, ...``, without stranded nodes."""
    for s in range(seed, seed + max_tries):
        try:
            return build_geometric(GeometricDeployment(rings, per_ring, beta, s))
        except DisconnectedRing:
            continue
    raise DisconnectedRing(f"no connected deployment in {max_tries} seeds from {seed}", [])


def _compare(sampler, net, samples, seed):
    ss = np.random.SeedSequence(seed)
    walk_seed, ideal_seed = ss.spawn(2)
    target = sampler.target_probabilities()
    nodes = sampler.sample(samples, random_state=walk_seed)
    counts = np.bincount(nodes, minlength=net.n_nodes)
    rcw = relative_error(counts, target)
    ideal = relative_error(ideal_sampler(target, samples, ideal_seed), target)
    return rcw, ideal


def bias_experiment(rings=30, per_ring=30, beta=90.0, distribution="uniform", p0=0.0,
                    samples=10**6, seed=0, deployment_seed=0):
    """Distance-1 walk forced onto a deployment without uniform connectivity.

    Every node is handed the true ring sizes.  Returns per-node relative
    errors of the walk and of an ideal sampler, both against the target law.
    """
    net = connected_deployment(rings, per_ring, beta, deployment_seed)
    sampler = RingSampler(distribution, mode="d1", p0=p0, force=True).fit(net)
    rcw, ideal = _compare(sampler, net, samples, seed)
    return {
        "network": net,
        "rcw": rcw,
        "ideal": ideal,
        "ratio": rcw.mean_rel_error / ideal.mean_rel_error,
    }


def aap_repair_experiment(rings=30, per_ring=30, beta=90.0, distribution="uniform", p0=0.0,
                          samples=10**6, seed=0, deployment_seed=0, aap_seed=0):
    """Same deployment, sampled through an attachment-point overlay.

    Raises :class:`~rcw.exceptions.AapFailure` when the assignment does not
    complete.  Otherwise compares per-node relative errors of the walk and
    an ideal sampler with a two-sample KS test.
    """
    net = connected_deployment(rings, per_ring, beta, deployment_seed)
    overlay = assign_attachment_points(net, seed=aap_seed)
    sampler = OverlaySampler(distribution, p0=p0).fit(overlay)
    rcw, ideal = _compare(sampler, net, samples, seed)
    a = rcw.rel_error[~np.isnan(rcw.rel_error)]
    b = ideal.rel_error[~np.isnan(ideal.rel_error)]
    ks = ks_2samp(a, b)
    return {
        "network": net,
        "overlay": overlay,
        "rcw": rcw,
        "ideal": ideal,
        "ks_statistic": float(ks.statistic),
        "ks_pvalue": float(ks.pvalue),
    }
