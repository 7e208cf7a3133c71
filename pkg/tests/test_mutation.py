import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import stats

from hqea.core import BitString, RandomSource
from hqea.mutation import RateBounds, clamp_rate, resolve_p_min, sample_flips, shift_mutate


@given(st.integers(1, 200), st.floats(1e-9, 1.0), st.integers(0, 2**32))
def test_shift_never_returns_parent(n, p, seed):
    x = BitString.zeros(n)
    y = shift_mutate(x, p, RandomSource(seed))
    assert y.hamming(x) >= 1


def test_full_rate_complements():
    r = RandomSource(1)
    x = BitString.from_string("1100101")
    assert shift_mutate(x, 1.0, r) == x.complement()


def test_mean_hamming_distance():
    # E[B | shift] = np + P(B=0) for B ~ Bin(100, 1/100)
    r = RandomSource(2024)
    d = [len(sample_flips(100, 0.01, r)) for _ in range(100_000)]
    assert 1.25 <= np.mean(d) <= 1.40
    assert abs(np.mean(d) - (1 + 0.99 ** 100)) < 0.01


def test_hamming_distribution_is_shifted_binomial():
    n, p, reps = 20, 0.05, 50_000
    r = RandomSource(77)
    counts = np.bincount([len(sample_flips(n, p, r)) for _ in range(reps)], minlength=n + 1)
    pmf = stats.binom.pmf(np.arange(n + 1), n, p)
    pmf[1] += pmf[0]
    pmf[0] = 0.0
    expected = pmf * reps
    mask = expected > 5
    assert counts[0] == 0
    chi2 = ((counts[mask] - expected[mask]) ** 2 / expected[mask]).sum()
    assert stats.chi2.sf(chi2, mask.sum() - 1) > 1e-4


def test_shift_position_uniform():
    # with a vanishing rate almost every mutation is the single shifted bit
    r = RandomSource(5)
    pos = [sample_flips(10, 1e-12, r)[0] for _ in range(20_000)]
    freq = np.bincount(pos, minlength=10) / 20_000
    assert np.all(np.abs(freq - 0.1) < 0.01)


def test_clamp_examples():
    n = 100
    b = RateBounds.for_dimension(n)
    assert clamp_rate(1 / n**2, b) == 1 / n
    assert clamp_rate(0.7, b) == 0.5
    assert clamp_rate(0.01, RateBounds(1e-8)) == 0.01


@given(st.floats(-1, 2, allow_nan=False), st.floats(1e-9, 0.5))
def test_clamp_idempotent(p, lo):
    b = RateBounds(lo)
    q = clamp_rate(p, b)
    assert b.p_min <= q <= b.p_max
    assert clamp_rate(q, b) == q


def test_bounds_validation():
    for lo, hi in ((0.0, 0.5), (0.3, 0.2), (0.1, 0.6), (-1e-3, 0.5)):
        with pytest.raises(ValueError):
            RateBounds(lo, hi)
    assert resolve_p_min("inv-n2", 100) == 1e-4
    assert resolve_p_min("1e-3", 100) == 1e-3
    assert math.isclose(RateBounds.for_dimension(10, "inv-n").p_min, 0.1)
