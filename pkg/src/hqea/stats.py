"""Two-sample Wilcoxon rank-sum (Mann-Whitney U) test."""
from __future__ import annotations

from collections import Counter
import math
from typing import Sequence

EXACT_MAX_TOTAL = 20


def rankdata(values: Sequence[float]) -> list[float]:
    """1-based ranks, ties receiving the mean of the ranks they span."""
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        mean_rank = (i + j) / 2 + 1
        for t in range(i, j + 1):
            ranks[order[t]] = mean_rank
        i = j + 1
    return ranks


def u_statistic(a: Sequence[float], b: Sequence[float]) -> float:
    ranks = rankdata(list(a) + list(b))
    n1 = len(a)
    return sum(ranks[:n1]) - n1 * (n1 + 1) / 2


def _subset_sum_counts(n1: int, total: int) -> list[int]:
    """counts[u] = number of size-n1 subsets of ranks 1..total with U = u."""
    max_u = n1 * (total - n1)
    # ways[j][s]: subsets of size j with rank-sum s, over the ranks seen so far
    max_sum = sum(range(total - n1 + 1, total + 1))
    ways = [[0] * (max_sum + 1) for _ in range(n1 + 1)]
    ways[0][0] = 1
    for r in range(1, total + 1):
        for j in range(min(r, n1), 0, -1):
            row, prev = ways[j], ways[j - 1]
            for s in range(max_sum, r - 1, -1):
                if prev[s - r]:
                    row[s] += prev[s - r]
    offset = n1 * (n1 + 1) // 2
    return [ways[n1][u + offset] for u in range(max_u + 1)]


def _exact_p(u: float, n1: int, n2: int) -> float:
    counts = _subset_sum_counts(n1, n1 + n2)
    total = sum(counts)
    k = int(round(u))
    lower = sum(counts[: k + 1])
    upper = sum(counts[k:])
    return min(1.0, 2 * min(lower, upper) / total)


def _normal_p(u: float, n1: int, n2: int, pooled: Sequence[float]) -> float:
    total = n1 + n2
    ties = sum(t ** 3 - t for t in Counter(pooled).values())
    var = n1 * n2 / 12 * ((total + 1) - ties / (total * (total - 1)))
    if var <= 0:
        return 1.0
    dev = abs(u - n1 * n2 / 2) - 0.5
    if dev <= 0:
        return 1.0
    return min(1.0, math.erfc(dev / math.sqrt(var) / math.sqrt(2)))


def wilcoxon_rank_sum(a: Sequence[float], b: Sequence[float], method: str = "auto") -> float:
    """Two-sided p-value of the rank-sum test.

    ``method="auto"`` enumerates the exact null distribution when the pooled
    sample has at most 20 values and no ties, and otherwise uses the normal
    approximation with tie and continuity corrections.
    """
    a, b = list(a), list(b)
    if not a or not b:
        raise ValueError("both samples must be non-empty")
    pooled = a + b
    has_ties = len(set(pooled)) < len(pooled)
    if method == "auto":
        method = "exact" if len(pooled) <= EXACT_MAX_TOTAL and not has_ties else "normal"
    u = u_statistic(a, b)
    if method == "exact":
        if has_ties:
            raise ValueError("exact method requires tie-free samples")
        return _exact_p(u, len(a), len(b))
    if method == "normal":
        return _normal_p(u, len(a), len(b), pooled)
    raise ValueError(f"unknown method {method!r}")
