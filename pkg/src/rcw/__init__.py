"""Random centrifugal walk node sampling.

Walks start at a source and only ever move away from it, stopping at each
visited node with a locally computed probability.  Samplers follow the
scikit-learn estimator conventions: configure in ``__init__``, ``fit`` on a
network, then ``sample``.
"""

from .exceptions import (AapFailure, ConfigError, CyclicHopGraph, DegenerateNetwork,
                         DisconnectedRing, InconsistentDegrees, InfeasibleStay,
                         InvalidDistribution, InvalidNetwork, MassExhausted,
                         NotOutwardNeighbor, NotUniformlyConnected, RCWError,
                         RoundLimitExceeded, UniformityViolation)
from .grid_sampler import GridSampler
from .oracle_stats import ExactLaw, SelectionReport
from .overlay import AttachmentOverlay, OverlaySampler, assign_attachment_points, halls_condition
from .ring_sampler import HopPolicy, RingSampler
from .simnet import SimEngine
from .topology import (GeometricDeployment, GridSpec, Network, RingNetwork, build_geometric,
                       build_grid, build_uniform_rings, check_uniform_connectivity)
from .tree_sampler import TreeSampler

__version__ = "0.1.0"

__all__ = [
    "AapFailure", "AttachmentOverlay", "ConfigError", "CyclicHopGraph", "DegenerateNetwork",
    "DisconnectedRing", "ExactLaw", "GeometricDeployment", "GridSampler", "GridSpec",
    "HopPolicy", "InconsistentDegrees", "InfeasibleStay", "InvalidDistribution",
    "InvalidNetwork", "MassExhausted", "Network", "NotOutwardNeighbor",
    "NotUniformlyConnected", "OverlaySampler", "RCWError", "RingNetwork", "RingSampler",
    "RoundLimitExceeded", "SelectionReport", "SimEngine", "TreeSampler", "UniformityViolation",
    "assign_attachment_points", "build_geometric", "build_grid", "build_uniform_rings",
    "check_uniform_connectivity", "halls_condition",
]
