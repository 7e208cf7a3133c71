import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats as sps

from hqea.stats import rankdata, u_statistic, wilcoxon_rank_sum
from oracles import enumerated_rank_sum_p


def _sample_pairs(max_total):
    for n1 in range(1, max_total):
        for n2 in range(1, max_total - n1 + 1):
            yield n1, n2


def test_exact_matches_enumeration():
    r = random.Random(1)
    for n1, n2 in _sample_pairs(10):
        for _ in range(4):
            values = r.sample(range(1000), n1 + n2)
            a, b = values[:n1], values[n1:]
            assert abs(wilcoxon_rank_sum(a, b, "exact") - enumerated_rank_sum_p(a, b)) < 1e-12


def test_fixtures():
    assert wilcoxon_rank_sum([1, 2, 3], [4, 5, 6]) == pytest.approx(0.1, abs=1e-15)
    assert wilcoxon_rank_sum([3, 1, 2], [3, 1, 2]) == 1.0
    rng = np.random.default_rng(0)
    a, b = rng.normal(0, 1, 100), rng.normal(5, 1, 100)
    assert wilcoxon_rank_sum(a, b) < 1e-10


def test_empty_sample():
    with pytest.raises(ValueError):
        wilcoxon_rank_sum([], [1, 2])


def test_rankdata_ties():
    assert rankdata([10, 20, 10, 30]) == [1.5, 3.0, 1.5, 4.0]
    assert u_statistic([1, 2], [3, 4]) == 0


@settings(max_examples=60)
@given(st.lists(st.integers(0, 30), min_size=1, max_size=40),
       st.lists(st.integers(0, 30), min_size=1, max_size=40))
def test_normal_branch_matches_scipy(a, b):
    if len(set(a + b)) == 1:
        return
    ours = wilcoxon_rank_sum(a, b, "normal")
    ref = sps.mannwhitneyu(a, b, alternative="two-sided", method="asymptotic",
                           use_continuity=True).pvalue
    assert ours == pytest.approx(ref, rel=1e-9, abs=1e-12)


def test_exact_branch_matches_scipy():
    r = random.Random(5)
    for n1, n2 in ((3, 3), (5, 7), (10, 10), (2, 18)):
        values = r.sample(range(10_000), n1 + n2)
        a, b = values[:n1], values[n1:]
        ref = sps.mannwhitneyu(a, b, alternative="two-sided", method="exact").pvalue
        assert wilcoxon_rank_sum(a, b) == pytest.approx(ref, rel=1e-12)


@given(st.lists(st.floats(-1e6, 1e6), min_size=1, max_size=12, unique=True), st.data())
def test_symmetry(values, data):
    if len(values) < 2:
        return
    cut = data.draw(st.integers(1, len(values) - 1))
    a, b = values[:cut], values[cut:]
    assert wilcoxon_rank_sum(a, b) == pytest.approx(wilcoxon_rank_sum(b, a), abs=1e-15)


def test_exact_and_normal_close_at_moderate_sizes():
    r = random.Random(9)
    for n in (8, 9, 10):
        for _ in range(20):
            values = r.sample(range(1000), 2 * n)
            a, b = values[:n], values[n:]
            assert abs(wilcoxon_rank_sum(a, b, "exact") - wilcoxon_rank_sum(a, b, "normal")) < 0.02
