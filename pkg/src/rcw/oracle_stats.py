"""Exact selection laws, empirical accounting and error metrics."""

import heapq
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .exceptions import CyclicHopGraph, UniformityViolation


@dataclass(frozen=True, eq=False)
class ExactLaw:
    """Exact per-node selection (``p``) and visit (``visit``) probabilities."""

    p: np.ndarray
    visit: np.ndarray
    ring_of: np.ndarray = None

    @property
    def total(self):
        return float(self.p.sum())

    def ring_visit_spread(self):
        """Largest ``max - min`` visit probability inside any ring."""
        if self.ring_of is None:
            raise ValueError("law carries no ring assignment")
        spread = 0.0
        for k in range(int(self.ring_of.max()) + 1):
            v = self.visit[self.ring_of == k]
            if v.size:
                spread = max(spread, float(v.max() - v.min()))
        return spread

    def ring_visit(self):
        """Mean visit probability of every ring."""
        return np.array([self.visit[self.ring_of == k].mean()
                         for k in range(int(self.ring_of.max()) + 1)])

    def check_uniform(self, tol=1e-12):
        spread = self.ring_visit_spread()
        if spread >= tol:
            raise UniformityViolation(
                f"visit probabilities differ by {spread:.3e} inside a ring")
        return self


def _topological_order(succ, source, order):
    reach = {source}
    stack = [source]
    while stack:
        x = stack.pop()
        for y, _ in succ[x]:
            if y not in reach:
                reach.add(y)
                stack.append(y)
    indeg = dict.fromkeys(reach, 0)
    for x in reach:
        for y, _ in succ[x]:
            indeg[y] += 1
    sign = 1 if order == "low" else -1
    heap = [sign * x for x in reach if indeg[x] == 0]
    heapq.heapify(heap)
    topo = []
    while heap:
        x = sign * heapq.heappop(heap)
        topo.append(x)
        for y, _ in succ[x]:
            indeg[y] -= 1
            if indeg[y] == 0:
                heapq.heappush(heap, sign * y)
    if len(topo) != len(reach) or topo[0] != source:
        raise CyclicHopGraph("hop graph reachable from the source has a cycle")
    return topo


def dag_oracle(successors, stay, source, order="low", ring_of=None):
    """Exact law of a walk that only moves outward.

    Visit probabilities are pushed forward in topological order,
    ``v(y) += v(x) * (1 - q(x)) * h(x, y)``, and each node is selected with
    ``v(x) * q(x)``.

    Parameters
    ----------
    successors : sequence
        ``successors[x]`` is a sequence of ``(y, h(x, y))`` pairs.
    stay : sequence of float
        Stay probability ``q(x)`` per node.
    source : int
        Start of every walk (visited with probability 1).
    order : {'low', 'high'}
        Tie-break between ready nodes; the result must not depend on it.
    """
    n = len(stay)
    visit = np.zeros(n)
    sel = np.zeros(n)
    visit[source] = 1.0
    for x in _topological_order(successors, source, order):
        vx = visit[x]
        q = stay[x]
        sel[x] = vx * q
        go = vx * (1.0 - q)
        for y, h in successors[x]:
            visit[y] += go * h
    return ExactLaw(sel, visit, None if ring_of is None else np.asarray(ring_of))


@dataclass(frozen=True, eq=False)
class SelectionReport:
    counts: np.ndarray
    samples: int
    expected_p: np.ndarray
    rel_error: np.ndarray
    mean_rel_error: float
    max_rel_error: float
    chi2: float
    p_value: float
    seed: object = None
    extra: dict = field(default_factory=dict)

    @property
    def empirical_p(self):
        return self.counts / self.samples

    def summary(self):
        out = {
            "mean_rel_error": self.mean_rel_error,
            "max_rel_error": self.max_rel_error,
            "chi2": self.chi2,
            "p_value": self.p_value,
            "samples": int(self.samples),
            "seed": self.seed,
        }
        out.update(self.extra)
        return out


def chi_square(counts, expected_p, min_expected=5.0):
    """Pearson chi-square of ``counts`` against ``expected_p``.

    Nodes expecting fewer than ``min_expected`` draws are pooled into one bin.
    Returns ``(statistic, p_value)``.
    """
    counts = np.asarray(counts, dtype=float)
    s = counts.sum()
    expected = np.asarray(expected_p, dtype=float)
    expected = expected / expected.sum() * s
    big = expected >= min_expected
    obs = list(counts[big])
    exp = list(expected[big])
    if (~big).any():
        pooled_e = expected[~big].sum()
        pooled_o = counts[~big].sum()
        if pooled_e > 0:
            obs.append(pooled_o)
            exp.append(pooled_e)
        elif pooled_o > 0:
            return float("inf"), 0.0
    if len(obs) < 2:
        return 0.0, 1.0
    res = stats.chisquare(obs, exp)
    return float(res.statistic), float(res.pvalue)


def relative_error(counts, law, samples=None, seed=None, min_expected=5.0):
    """Per-node ``e = |count - f| / f`` with ``f = p * samples``.

    Nodes expecting fewer than ``min_expected`` draws get ``nan``.
    """
    counts = np.asarray(counts, dtype=np.int64)
    p = law.p if isinstance(law, ExactLaw) else np.asarray(law, dtype=float)
    if samples is None:
        samples = int(counts.sum())
    if samples <= 0:
        raise ValueError("need at least one sample")
    f = p * samples
    rel = np.full(len(p), np.nan)
    ok = f >= min_expected
    rel[ok] = np.abs(counts[ok] - f[ok]) / f[ok]
    chi2, pval = chi_square(counts, p, min_expected)
    valid = rel[ok]
    return SelectionReport(
        counts=counts, samples=samples, expected_p=p, rel_error=rel,
        mean_rel_error=float(valid.mean()) if valid.size else float("nan"),
        max_rel_error=float(valid.max()) if valid.size else float("nan"),
        chi2=chi2, p_value=pval, seed=seed)


def ideal_sampler(law, samples, seed=None):
    """Counts of ``samples`` independent categorical draws from ``law``."""
    p = law.p if isinstance(law, ExactLaw) else np.asarray(law, dtype=float)
    rng = np.random.default_rng(seed)
    return rng.multinomial(samples, p / p.sum())


def expected_ideal_mean_rel_error(p, samples):
    """Normal-approximation mean of ``|count - f| / f`` for a binomial count."""
    p = np.asarray(p, dtype=float)
    return np.sqrt(2.0 / np.pi) * np.sqrt((1.0 - p) / (p * samples))


def write_node_csv(fh, report, ring_of=None, columns=None):
    """Per-node CSV.  Default columns: node,ring,expected_p,count,empirical_p,rel_error."""
    columns = columns or ("node", "ring", "expected_p", "count", "empirical_p", "rel_error")
    fh.write(",".join(columns) + "\n")
    emp = report.empirical_p
    for x in range(len(report.expected_p)):
        row = {
            "node": str(x),
            "ring": "" if ring_of is None else str(int(ring_of[x])),
            "expected_p": repr(float(report.expected_p[x])),
            "count": str(int(report.counts[x])),
            "empirical_p": repr(float(emp[x])),
            "rel_error": "" if np.isnan(report.rel_error[x]) else repr(float(report.rel_error[x])),
        }
        fh.write(",".join(row[c] for c in columns) + "\n")
