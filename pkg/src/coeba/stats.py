"""Summary statistics and the Wilcoxon rank-sum test used to compare solvers."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

__all__ = [
    "SampleSummary",
    "WilcoxonResult",
    "EXACT_LIMIT",
    "summarize",
    "midranks",
    "wilcoxon_rank_sum",
    "exact_rank_sum_pvalue",
]

# both samples at most this large -> exact null distribution
EXACT_LIMIT = 8


@dataclass(frozen=True)
class SampleSummary:
    mean: float
    best: float
    std: float
    n: int


@dataclass(frozen=True)
class WilcoxonResult:
    rank_sum_statistic: float
    z_value: float
    p_two_sided: float
    exact: bool

    @property
    def significant_at_95(self) -> bool:
        return self.p_two_sided < 0.05


def summarize(samples: Sequence[float]) -> SampleSummary:
    """Mean, minimum and sample (n - 1) standard deviation."""
    x = np.asarray(samples, dtype=float)
    if x.size == 0:
        raise ValueError("cannot summarize an empty sample")
    std = float(x.std(ddof=1)) if x.size > 1 else 0.0
    return SampleSummary(mean=float(x.mean()), best=float(x.min()), std=std, n=int(x.size))


def midranks(values: Sequence[float]) -> np.ndarray:
    """1-based ranks, ties sharing the average of the ranks they span."""
    x = np.asarray(values, dtype=float)
    order = np.argsort(x, kind="stable")
    sorted_x = x[order]
    ranks = np.empty(x.size, dtype=float)
    start = 0
    while start < x.size:
        stop = start + 1
        while stop < x.size and sorted_x[stop] == sorted_x[start]:
            stop += 1
        ranks[order[start:stop]] = (start + 1 + stop) / 2.0
        start = stop
    return ranks


def _tie_term(ranks: np.ndarray) -> float:
    _, counts = np.unique(ranks, return_counts=True)
    return float(np.sum(counts.astype(float) ** 3 - counts))


def exact_rank_sum_pvalue(ranks_a_doubled: int, pooled_doubled: Sequence[int],
                          n: int) -> float:
    """Two-sided exact p-value of a rank sum under random splitting.

    Works on doubled midranks so that tied ranks stay integral. The null
    distribution of the sum of ``n`` of the pooled ranks is counted by
    dynamic programming over (items chosen, sum).
    """
    total = sum(pooled_doubled)
    # counts[c][s]: number of size-c subsets with doubled rank sum s
    counts = [dict() for _ in range(n + 1)]
    counts[0][0] = 1
    for r in pooled_doubled:
        for c in range(n, 0, -1):
            prev = counts[c - 1]
            cur = counts[c]
            for s, ways in prev.items():
                cur[s + r] = cur.get(s + r, 0) + ways
    m_total = len(pooled_doubled)
    # 2 * E[W] doubled, kept integral: 2 * n * total / M
    center_num = n * total  # compare |M*s - n*total|
    observed = abs(m_total * ranks_a_doubled - center_num)
    extreme = sum(ways for s, ways in counts[n].items()
                  if abs(m_total * s - center_num) >= observed)
    return extreme / math.comb(m_total, n)


def wilcoxon_rank_sum(a: Sequence[float], b: Sequence[float]) -> WilcoxonResult:
    """Wilcoxon rank-sum test of sample ``a`` against sample ``b``.

    The statistic is the midrank sum of ``a`` in the pooled sample. ``z``
    uses the normal approximation with tie-corrected variance and a 0.5
    continuity correction; it is negative when ``a`` tends to be smaller.
    The p-value is exact when both samples have at most ``EXACT_LIMIT``
    values and comes from the normal tail otherwise.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.size == 0 or b.size == 0:
        raise ValueError("both samples must be non-empty")
    n, m = a.size, b.size
    big_n = n + m
    ranks = midranks(np.concatenate([a, b]))
    w = float(ranks[:n].sum())
    exact = n <= EXACT_LIMIT and m <= EXACT_LIMIT

    if np.all(ranks == ranks[0]):
        return WilcoxonResult(w, 0.0, 1.0, exact)

    mean = n * (big_n + 1) / 2.0
    var = n * m / 12.0 * ((big_n + 1) - _tie_term(ranks) / (big_n * (big_n - 1)))
    diff = w - mean
    if abs(diff) <= 0.5:
        z = 0.0
    else:
        z = (diff - math.copysign(0.5, diff)) / math.sqrt(var)

    if exact:
        doubled = [int(round(2 * r)) for r in ranks]
        p = exact_rank_sum_pvalue(sum(doubled[:n]), doubled, n)
    else:
        p = min(1.0, math.erfc(abs(z) / math.sqrt(2.0)))
    return WilcoxonResult(rank_sum_statistic=w, z_value=z, p_two_sided=p, exact=exact)
