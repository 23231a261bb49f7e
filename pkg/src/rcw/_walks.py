"""Vectorised simulation of many outward walks over a per-node hop table."""

import numpy as np

from .oracle_stats import dag_oracle

CHUNK = 1 << 16


def seed_sequence(random_state):
    if isinstance(random_state, np.random.SeedSequence):
        return random_state
    if isinstance(random_state, np.random.Generator):
        return np.random.SeedSequence(int(random_state.integers(2**63)))
    if isinstance(random_state, np.random.RandomState):
        return np.random.SeedSequence(int(random_state.randint(2**31)))
    return np.random.SeedSequence(random_state)


class WalkTable:
    """Stay probability and weighted outward successors of every node.

    Successors with zero probability are dropped.  Nodes without successors
    must have stay probability 1.
    """

    def __init__(self, stay, successors):
        self.stay = np.asarray(stay, dtype=float)
        self.successors = [[(int(y), float(h)) for y, h in row if h > 0] for row in successors]
        n = len(self.stay)
        for x, row in enumerate(self.successors):
            if not row and self.stay[x] < 1.0:
                raise ValueError(f"node {x} has no successor but stays with "
                                 f"probability {self.stay[x]}")
        lengths = [len(row) for row in self.successors]
        self.ptr = np.concatenate([[0], np.cumsum(lengths)]).astype(np.int64)
        self.targets = np.array([y for row in self.successors for y, _ in row], dtype=np.int64)
        gcum = np.empty(len(self.targets))
        for x, row in enumerate(self.successors):
            if not row:
                continue
            h = np.array([p for _, p in row])
            c = np.cumsum(h / h.sum())
            c[-1] = 1.0
            gcum[self.ptr[x]:self.ptr[x + 1]] = x + c
        self.gcum = gcum
        self.n_nodes = n

    def oracle(self, source, order="low", ring_of=None):
        return dag_oracle(self.successors, self.stay, source, order=order, ring_of=ring_of)

    def _simulate(self, start, n, rng):
        cur = np.full(n, start, dtype=np.int64)
        hops = np.zeros(n, dtype=np.int64)
        active = np.arange(n)
        while active.size:
            here = cur[active]
            moving = rng.random(active.size) >= self.stay[here]
            active = active[moving]
            if not active.size:
                break
            here = here[moving]
            key = here + rng.random(active.size)
            pos = np.searchsorted(self.gcum, key, side="right")
            # here + u can round up to here + 1 for large node ids
            pos = np.minimum(pos, self.ptr[here + 1] - 1)
            cur[active] = self.targets[pos]
            hops[active] += 1
        return cur, hops

    def simulate(self, start, n_walks, random_state=None):
        """Run ``n_walks`` walks from ``start``; returns ``(final_nodes, hops)``.

        Walks are processed in chunks, each with its own child stream of the
        root seed, so results do not depend on how chunks are scheduled.
        """
        ss = seed_sequence(random_state)
        n_chunks = max(1, -(-n_walks // CHUNK))
        finals, hops = [], []
        for i, child in enumerate(ss.spawn(n_chunks)):
            size = min(CHUNK, n_walks - i * CHUNK)
            f, h = self._simulate(start, size, np.random.default_rng(child))
            finals.append(f)
            hops.append(h)
        return np.concatenate(finals), np.concatenate(hops)
