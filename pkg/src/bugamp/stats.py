"""Paired statistics for method comparison.

The one-sided signed-rank test is exact (full enumeration of sign vectors)
up to n = 12 and switches to the tie-corrected normal approximation with
continuity correction beyond that.  Zero differences are dropped before
ranking, the standard treatment.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from itertools import product

import numpy as np

from .errors import TooFewPairs

EXACT_LIMIT = 12
MIN_PAIRS = 5

COMPARISONS = (("ens", "ga"), ("ens", "bf"), ("ens", "sa"),
               ("ga", "bf"), ("ga", "sa"), ("bf", "sa"))


class Verdict(enum.Enum):
    GREEN = "green"   # significant evidence the left method is better
    GRAY = "gray"     # inconclusive
    RED = "red"       # evidence points the other way


def verdict_for(p: float) -> Verdict:
    if p <= 0.05:
        return Verdict.GREEN
    if p >= 0.95:
        return Verdict.RED
    return Verdict.GRAY


def _average_ranks(values: np.ndarray) -> np.ndarray:
    """Ranks 1..n with ties sharing their average rank."""
    order = np.argsort(values, kind="mergesort")
    ranks = np.empty(len(values))
    i = 0
    while i < len(values):
        j = i
        while j + 1 < len(values) and values[order[j + 1]] == values[order[i]]:
            j += 1
        ranks[order[i:j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def wilcoxon_one_sided(x, y) -> float:
    """P-value for the hypothesis that x tends to exceed y, by the
    signed-rank statistic on the paired differences."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if len(x) != len(y):
        raise TooFewPairs(f"length mismatch {len(x)} vs {len(y)}")
    d = x - y
    d = d[d != 0.0]
    n = len(d)
    if n < MIN_PAIRS:
        raise TooFewPairs(f"{n} nonzero differences, need {MIN_PAIRS}")
    ranks = _average_ranks(np.abs(d))
    w_plus = float(ranks[d > 0].sum())

    if n <= EXACT_LIMIT:
        at_least = sum(1 for signs in product((0.0, 1.0), repeat=n)
                       if float(np.dot(signs, ranks)) >= w_plus - 1e-12)
        return at_least / 2.0 ** n

    mu = n * (n + 1) / 4.0
    _, counts = np.unique(np.abs(d), return_counts=True)
    tie_term = float(((counts ** 3 - counts)).sum()) / 48.0
    sigma = math.sqrt(n * (n + 1) * (2 * n + 1) / 24.0 - tie_term)
    z = (w_plus - mu - 0.5) / sigma
    return 0.5 * math.erfc(z / math.sqrt(2.0))


@dataclass(frozen=True)
class Aggregate:
    n: int
    mean: float
    sd: float
    ci_lo: float
    ci_hi: float
    degenerate: bool     # single observation: sd reported as 0


def aggregate(values) -> Aggregate:
    vals = np.asarray([v for v in values if not math.isnan(v)], dtype=float)
    if len(vals) == 0:
        raise ValueError("empty group")
    mean = float(vals.mean())
    if len(vals) == 1:
        return Aggregate(1, mean, 0.0, mean, mean, True)
    sd = float(vals.std(ddof=1))
    half = 1.96 * sd / math.sqrt(len(vals))
    return Aggregate(len(vals), mean, sd, mean - half, mean + half, False)


@dataclass(frozen=True)
class SignificanceCell:
    problem: str
    left: str
    right: str
    p: float
    verdict: Verdict


def significance_table(validations, problems=None) -> list[SignificanceCell]:
    """Six ordered method comparisons per problem on each trial's validated
    best score.  Pairing is by trial index."""
    best: dict[tuple[str, str], dict[int, float]] = {}
    for v in validations:
        if v.rank != 1:
            continue
        best.setdefault((v.problem, v.method), {})[v.trial] = v.score
    names = problems or sorted({p for p, _ in best})
    cells = []
    for problem in names:
        for left, right in COMPARISONS:
            lx = best.get((problem, left), {})
            rx = best.get((problem, right), {})
            trials = sorted(set(lx) & set(rx))
            p = wilcoxon_one_sided([lx[t] for t in trials],
                                   [rx[t] for t in trials])
            cells.append(SignificanceCell(problem, left, right, p,
                                          verdict_for(p)))
    return cells
