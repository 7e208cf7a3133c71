import pytest
from hypothesis import given, strategies as st

from hqea.controllers import (
    HIGH,
    LOW,
    ContractViolation,
    ControllerConfig,
    GenerationFeedback,
    OneFifthController,
    TwoRateController,
    TwoRateState,
    is_success,
    one_fifth_update,
    replay,
    static_update,
    two_rate_sample_rates,
    two_rate_update,
)
from hqea.core import RandomSource
from hqea.mutation import RateBounds


N = 100
BOUNDS = RateBounds.for_dimension(N)


def fb(f_old, best, fits=None, tag=None):
    return GenerationFeedback(f_old, best, tuple(fits or (best,)), tag)


def test_static_update():
    assert static_update(1 / N, fb(3, 4)) == 1 / N
    assert static_update(0.3, fb(3, 1)) == 0.3


def test_one_fifth_examples():
    cfg = ControllerConfig(BOUNDS, A=2, b=0.5)
    assert one_fifth_update(1 / N, fb(5, 6), cfg) == 2 / N
    assert one_fifth_update(1 / N, fb(5, 4), cfg) == 1 / N
    eq = fb(5, 5)
    assert one_fifth_update(0.1, eq, ControllerConfig(BOUNDS, strict_rule=False)) == 0.2
    assert one_fifth_update(0.1, eq, ControllerConfig(BOUNDS, strict_rule=True)) == 0.05
    assert is_success(eq, False) and not is_success(eq, True)


@given(st.integers(0, 8))
def test_one_fifth_round_trip(k):
    # A*b = 1: k successes then k failures return to the start inside the bounds
    cfg = ControllerConfig(RateBounds(1e-12), A=2, b=0.5)
    p = 1e-3
    for _ in range(k):
        p = one_fifth_update(p, fb(1, 2), cfg)
    for _ in range(k):
        p = one_fifth_update(p, fb(1, 0), cfg)
    assert p == 1e-3


def test_feedback_requires_consistent_best():
    with pytest.raises(ValueError):
        GenerationFeedback(3, 5, (4, 2))


def test_two_rate_split():
    st_ = TwoRateState(2 / N, N, BOUNDS)
    tags = two_rate_sample_rates(st_, 4, RandomSource(0))
    assert tags == [LOW, LOW, HIGH, HIGH]
    assert st_.low_rate() == 0.01 and st_.high_rate() == 0.04
    assert two_rate_sample_rates(st_, 5, RandomSource(0)).count(LOW) == 3


def test_two_rate_single_offspring_coin():
    r = RandomSource(31)
    st_ = TwoRateState(2 / N, N, BOUNDS)
    lows = sum(two_rate_sample_rates(st_, 1, r) == [LOW] for _ in range(10_000))
    assert 0.48 <= lows / 10_000 <= 0.52


class _Forced:
    """Random source stub whose uniform draw is fixed."""

    def __init__(self, u):
        self.u = u

    def random(self):
        return self.u


def test_two_rate_update_branches():
    st_ = TwoRateState(2 / N, N, RateBounds(1e-6))
    assert two_rate_update(st_, fb(1, 2, tag=HIGH), _Forced(0.0)).r == pytest.approx(4)
    assert two_rate_update(st_, fb(1, 2, tag=HIGH), _Forced(0.9)).r == pytest.approx(1)
    low_cap = TwoRateState(1 / N, N, BOUNDS)
    assert two_rate_update(low_cap, fb(1, 2, tag=LOW), _Forced(0.0)).rate == 1 / N
    with pytest.raises(ContractViolation):
        two_rate_update(st_, fb(1, 2), _Forced(0.0))


def test_two_rate_prefers_winner_three_quarters():
    r = RandomSource(8)
    st_ = TwoRateState(0.01, N, RateBounds(1e-6))
    ups = sum(two_rate_update(st_, fb(1, 2, tag=HIGH), r).rate > 0.01 for _ in range(10_000))
    assert 0.73 <= ups / 10_000 <= 0.77


def test_controllers_replay():
    ctrl = OneFifthController(N, BOUNDS, strict_rule=True)
    rates = replay(ctrl, [fb(1, 2), fb(2, 3), fb(3, 3), fb(3, 2)])
    assert rates == [0.01, 0.02, 0.04, 0.02, 0.01]
    two = TwoRateController(N, BOUNDS)
    rates, tags = two.offspring_rates(4, RandomSource(0))
    assert rates == [0.01, 0.01, 0.02, 0.02] and tags == [LOW, LOW, HIGH, HIGH]
    assert two.update(fb(1, 2, tag=HIGH), _Forced(0.1)) == HIGH
    assert two.p == 0.02
