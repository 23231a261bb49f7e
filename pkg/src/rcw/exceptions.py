"""Exception hierarchy.

Every error carries an ``exit_code`` so the command line front end can map
failures to distinct process exit statuses.
"""


class RCWError(Exception):
    exit_code = 1


class InvalidNetwork(RCWError, ValueError):
    exit_code = 10


class InconsistentDegrees(InvalidNetwork):
    """Ring sizes and degrees violate ``n[k-1] * delta[k-1] == n[k] * gamma[k]``."""

    exit_code = 11


class DisconnectedRing(InvalidNetwork):
    """Some node has no neighbor in the next (or previous) ring."""

    exit_code = 12

    def __init__(self, message, nodes=()):
        super().__init__(message)
        self.nodes = tuple(nodes)


class NotUniformlyConnected(InvalidNetwork):
    exit_code = 13


class DegenerateNetwork(InvalidNetwork):
    exit_code = 14


class InvalidDistribution(RCWError, ValueError):
    exit_code = 20


class MassExhausted(RCWError, ArithmeticError):
    exit_code = 21


class InfeasibleStay(RCWError, ArithmeticError):
    """A computed stay probability exceeds one (visit probability below target)."""

    exit_code = 22


class NotOutwardNeighbor(RCWError, ValueError):
    exit_code = 23


class CyclicHopGraph(RCWError, ValueError):
    exit_code = 24


class UniformityViolation(RCWError, AssertionError):
    """Nodes of one ring ended up with different visit probabilities."""

    exit_code = 25


class RoundLimitExceeded(RCWError, RuntimeError):
    exit_code = 30


class AapFailure(RCWError):
    """Attachment point assignment left some nodes with unconnected points."""

    exit_code = 31

    def __init__(self, failed, rounds=0, messages=0):
        failed = frozenset(failed)
        super().__init__(f"attachment point assignment failed at {len(failed)} node(s)")
        self.failed = failed
        self.rounds = rounds
        self.messages = messages


class ConfigError(RCWError, ValueError):
    exit_code = 40
