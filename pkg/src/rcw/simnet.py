"""Synchronous round-based message passing.

A message sent during round ``t`` is delivered during round ``t + 1``.  Round
0 is the simultaneous start of every node task.  Within one round messages
between the same ordered pair keep their send order; the order across pairs
is a seeded shuffle, so identical seeds replay identical traces.
"""

import random
from collections import namedtuple

from .exceptions import InvalidNetwork, RoundLimitExceeded

Envelope = namedtuple("Envelope", "src dst payload")


class NodeTask:
    """Base class for per-node handlers.  Override what you need."""

    def on_start(self, engine, node):
        pass

    def on_message(self, engine, node, src, payload):
        pass

    def on_wake(self, engine, node):
        pass


def payload_kind(payload):
    kind = getattr(payload, "kind", None)
    if kind is not None:
        return kind
    if isinstance(payload, tuple) and payload and isinstance(payload[0], str):
        return payload[0]
    return type(payload).__name__


class SimEngine:
    """Deterministic synchronous simulator.

    Parameters
    ----------
    adjacency : sequence of sequences of int, optional
        When given, every send is checked against it.
    seed : int, optional
        Seeds both the cross-pair delivery shuffle and ``engine.rng`` (a
        :class:`random.Random` that node tasks may draw from).
    trace : file-like, optional
        Receives one ``round,src,dst,payload_kind`` line per delivery.
    """

    def __init__(self, adjacency=None, seed=0, trace=None):
        self.adjacency = None if adjacency is None else [frozenset(a) for a in adjacency]
        self.rng = random.Random(seed)
        self.trace = trace
        self.tasks = {}
        self.messages_sent = 0
        self.rounds_elapsed = 0
        self._outbox = []
        self._wake = []
        self._round = 0

    def register(self, node, task):
        self.tasks[node] = task

    def send(self, src, dst, payload):
        if self.adjacency is not None and dst not in self.adjacency[src]:
            raise InvalidNetwork(f"node {src} cannot send to non-neighbor {dst}")
        self._outbox.append(Envelope(src, dst, payload))
        self.messages_sent += 1

    def wake(self, node):
        """Ask for ``on_wake`` on ``node`` in the next round."""
        self._wake.append(node)

    @property
    def current_round(self):
        return self._round

    def _ordered(self, batch):
        by_pair = {}
        for env in batch:
            by_pair.setdefault((env.src, env.dst), []).append(env)
        pairs = list(by_pair)
        self.rng.shuffle(pairs)
        for pair in pairs:
            yield from by_pair[pair]

    def run_until_quiescent(self, max_rounds=None):
        """Run until no message is in flight and no wake-up is pending.

        Returns ``(rounds, messages)``; ``max_rounds`` defaults to four times
        the number of registered nodes.
        """
        if max_rounds is None:
            max_rounds = 4 * max(len(self.tasks), 1)
        if self._round == 0:
            for node in sorted(self.tasks):
                self.tasks[node].on_start(self, node)
        while self._outbox or self._wake:
            if self._round >= max_rounds:
                raise RoundLimitExceeded(
                    f"not quiescent after {max_rounds} rounds "
                    f"({len(self._outbox)} message(s) in flight)")
            self._round += 1
            batch, self._outbox = self._outbox, []
            woken, self._wake = self._wake, []
            tasks = self.tasks
            for env in self._ordered(batch):
                if self.trace is not None:
                    self.trace.write(f"{self._round},{env.src},{env.dst},"
                                     f"{payload_kind(env.payload)}\n")
                tasks[env.dst].on_message(self, env.dst, env.src, env.payload)
            for node in sorted(set(woken)):
                tasks[node].on_wake(self, node)
            self.rounds_elapsed = self._round
        return self.rounds_elapsed, self.messages_sent
