import pytest
from hypothesis import given, strategies as st

from hqea.core import RandomSource
from hqea.controllers import GenerationFeedback
from hqea.mutation import RateBounds
from hqea.qlearning import (
    A_DIVIDE,
    A_MULT,
    InvalidStateError,
    QLearnerState,
    QLearningController,
    QTable,
    apply_action,
    compute_reward,
    compute_state,
    q_update,
    select_action_hqea,
    select_action_qea,
)


def learner(lam=4, **kw):
    return QLearnerState(QTable(lam), **kw)


def test_reward_and_state():
    assert compute_reward(100, 102) == pytest.approx(0.02)
    assert compute_reward(7, 7) == 0
    assert compute_reward(0, 3) == 2.0
    assert compute_state([5, 3, 7, 5], 5, True) == 1
    assert compute_state([5, 3, 7, 5], 5, False) == 3
    assert compute_state([1, 2], 5, False) == 0


def test_first_update_is_guarded():
    ln = learner()
    q_update(ln, 0.5, 2)
    assert (ln.table.q == 0).all() and ln.prev_state == 2


def test_single_update():
    ln = learner(prev_state=1, prev_action=A_MULT)
    q_update(ln, 0.1, 3)
    assert ln.table[1, A_MULT] == 0.8 * 0.1


def test_two_step_hand_trace():
    ln = learner(prev_state=1, prev_action=A_MULT)
    q_update(ln, 0.1, 2)
    ln.prev_action = A_DIVIDE
    q_update(ln, 0.0, 1)
    q1 = 0.0 + 0.8 * ((0.1 + 0.2 * 0.0) - 0.0)
    q2 = 0.0 + 0.8 * ((0.0 + 0.2 * q1) - 0.0)
    assert ln.table[1, A_MULT] == q1
    assert ln.table[2, A_DIVIDE] == q2
    assert q1 == pytest.approx(0.08, rel=1e-15)
    assert q2 == pytest.approx(0.0128, rel=1e-15)


def test_invalid_state():
    with pytest.raises(InvalidStateError):
        q_update(learner(lam=3), 0.0, 4)
    with pytest.raises(InvalidStateError):
        q_update(learner(lam=3), 0.0, -1)


def test_greedy_selection():
    t = QTable(2)
    t[0, A_MULT], t[0, A_DIVIDE] = 0.5, 0.2
    t[1, A_MULT], t[1, A_DIVIDE] = -0.1, 0.0
    assert select_action_qea(t, 0, RandomSource(0)) == A_MULT
    assert select_action_qea(t, 1, RandomSource(0)) == A_DIVIDE


def test_qea_tie_is_fair_coin():
    t, r = QTable(1), RandomSource(4)
    mult = sum(select_action_qea(t, 0, r) == A_MULT for _ in range(10_000))
    assert 0.48 <= mult / 10_000 <= 0.52


def test_hqea_fallback():
    t = QTable(2)
    assert select_action_hqea(t, 0, 7, 5, True) == A_MULT
    assert select_action_hqea(t, 0, 5, 5, True) == A_DIVIDE
    assert select_action_hqea(t, 0, 5, 5, False) == A_MULT
    t[1, A_MULT], t[1, A_DIVIDE] = 0.3, 0.1
    assert select_action_hqea(t, 1, 3, 5, True) == A_MULT


def test_apply_action_caps():
    n = 100
    b = RateBounds.for_dimension(n)
    ln = learner()
    assert apply_action(1 / n, A_MULT, ln, b) == 2 / n
    assert apply_action(0.5, A_MULT, ln, b) == 0.5
    assert apply_action(1 / n, A_DIVIDE, ln, b) == 1 / n


@given(st.lists(st.tuples(st.floats(-1, 1), st.integers(0, 3), st.integers(0, 1)), max_size=60))
def test_values_stay_bounded(steps):
    # with |r| <= 1 and gamma < 1 every entry stays within 1/(1-gamma)
    ln = learner(lam=3, prev_state=0, prev_action=A_MULT)
    for r, s, a in steps:
        q_update(ln, r, s)
        ln.prev_action = a
    assert abs(ln.table.q).max() <= 1 / (1 - ln.gamma) + 1e-12


@given(st.lists(st.floats(-1, 1), min_size=1, max_size=30))
def test_gamma_zero_is_moving_average(rewards):
    ln = learner(lam=1, gamma=0.0, prev_state=0, prev_action=A_MULT)
    expect = 0.0
    for r in rewards:
        ln.prev_state, ln.prev_action = 0, A_MULT
        q_update(ln, r, 1)
        expect = expect + 0.8 * (r - expect)
        assert ln.table[0, A_MULT] == pytest.approx(expect, abs=1e-12)


def test_controller_cycle():
    n = 50
    ctrl = QLearningController(n, RateBounds.for_dimension(n, "inv-n2"), lam=2, hybrid=True)
    # first generation: no table update, tie -> success rule
    assert ctrl.update(GenerationFeedback(10, 11, (11, 9)), RandomSource(0)) == "mult"
    assert ctrl.p == 2 / n
    assert (ctrl.learner.table.q == 0).all()
    assert ctrl.update(GenerationFeedback(11, 11, (11, 10)), RandomSource(0)) == "divide"
    assert ctrl.learner.table[1, A_MULT] == 0.0  # reward 0, max term 0
    assert ctrl.p == 1 / n
