"""Independent reference computations shared by the test modules."""
import itertools
from fractions import Fraction


def enumerated_rank_sum_p(a, b):
    """Two-sided rank-sum p-value by listing every assignment of the pooled
    ranks to the first sample (tie-free data only)."""
    pooled = sorted(list(a) + list(b))
    rank = {v: i + 1 for i, v in enumerate(pooled)}
    n1, total = len(a), len(pooled)
    observed = sum(rank[v] for v in a)
    sums = [sum(c) for c in itertools.combinations(range(1, total + 1), n1)]
    lower = sum(1 for s in sums if s <= observed)
    upper = sum(1 for s in sums if s >= observed)
    return float(min(Fraction(1), 2 * Fraction(min(lower, upper), len(sums))))


# naive fitness functions on plain lists

def naive_onemax(bits):
    return sum(bits)


def naive_leadingones(bits, z=None, sigma=None):
    n = len(bits)
    z = z or [1] * n
    sigma = sigma or list(range(n))
    count = 0
    for j in range(n):
        if bits[sigma[j]] != z[sigma[j]]:
            break
        count += 1
    return count


def naive_neutrality(bits, k):
    total = 0
    for start in range(0, len(bits) - k + 1, k):
        if sum(bits[start:start + k]) > k / 2:
            total += 1
    return total


def naive_r2(f, n):
    if f == n:
        return n
    if f % 2 == n % 2:
        return f + 1
    return max(f - 1, 0)


def naive(problem, bits):
    if problem.kind == "onemax":
        return naive_onemax(bits)
    if problem.kind == "leadingones":
        return naive_leadingones(bits, list(problem.target) if problem.target else None,
                                 list(problem.permutation) if problem.permutation else None)
    if problem.kind == "neutrality":
        return naive_neutrality(bits, problem.k)
    if problem.kind == "plateau":
        return sum(bits) // problem.k + 1
    return naive_r2(sum(bits), problem.n)
