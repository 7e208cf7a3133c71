"""Tabular Q-learning control of the mutation rate (QEA) and its hybrid with
the success rule (HQEA).

States are the number of offspring that beat the parent, ``0..lambda``;
the two actions multiply or divide the mutation rate.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .controllers import GenerationFeedback, RateController
from .core import RandomSource
from .mutation import RateBounds, clamp_rate

A_MULT = 0
A_DIVIDE = 1
ACTION_NAMES = ("mult", "divide")


class InvalidStateError(IndexError):
    pass


class QTable:
    """(lambda+1) x 2 matrix of action values, zero-initialized."""

    def __init__(self, lam: int):
        if lam < 1:
            raise ValueError(f"lambda must be >= 1, got {lam}")
        self.lam = lam
        self.q = np.zeros((lam + 1, 2), dtype=np.float64)

    @property
    def shape(self) -> tuple[int, int]:
        return self.q.shape

    def row(self, s: int) -> tuple[float, float]:
        return float(self.q[s, A_MULT]), float(self.q[s, A_DIVIDE])

    def __getitem__(self, key):
        return float(self.q[key])

    def __setitem__(self, key, value):
        self.q[key] = value


@dataclass
class QLearnerState:
    table: QTable
    prev_state: int | None = None
    prev_action: int | None = None
    alpha: float = 0.8
    gamma: float = 0.2
    a_mult_factor: float = 2.0
    a_divide_factor: float = 0.5

    def factor(self, action: int) -> float:
        return self.a_mult_factor if action == A_MULT else self.a_divide_factor


def compute_reward(f_old: int, f_best: int) -> float:
    """Relative fitness gain of the best offspring; a zero parent fitness is
    treated as 1 to keep the ratio finite."""
    return f_best / max(f_old, 1) - 1.0


def compute_state(offspring_fitnesses: Sequence[int], f_old: int, strict_rule: bool) -> int:
    if strict_rule:
        return sum(1 for f in offspring_fitnesses if f > f_old)
    return sum(1 for f in offspring_fitnesses if f >= f_old)


def q_update(learner: QLearnerState, r: float, s_new: int) -> QLearnerState:
    """One Q-learning step for the previous (state, action) pair, in place.

    The table is left alone until a first action has been taken.
    """
    table = learner.table
    if not 0 <= s_new <= table.lam:
        raise InvalidStateError(f"state {s_new} outside [0, {table.lam}]")
    s, a = learner.prev_state, learner.prev_action
    if s is not None and a is not None:
        q = table.q
        old = float(q[s, a])
        best_next = max(float(q[s_new, 0]), float(q[s_new, 1]))
        q[s, a] = old + learner.alpha * ((r + learner.gamma * best_next) - old)
    learner.prev_state = s_new
    return learner


def _greedy(table: QTable, s_new: int) -> int | None:
    mult, divide = table.row(s_new)
    if mult == divide:
        return None
    return A_MULT if mult > divide else A_DIVIDE


def select_action_qea(table: QTable, s_new: int, rng: RandomSource) -> int:
    a = _greedy(table, s_new)
    if a is None:
        a = A_MULT if rng.random() < 0.5 else A_DIVIDE
    return a


def select_action_hqea(table: QTable, s_new: int, f_best: int, f_old: int, strict_rule: bool) -> int:
    """Greedy choice; on an exact tie fall back to the success rule."""
    a = _greedy(table, s_new)
    if a is None:
        success = f_best > f_old if strict_rule else f_best >= f_old
        a = A_MULT if success else A_DIVIDE
    return a


def apply_action(p: float, a: int, learner: QLearnerState, bounds: RateBounds) -> float:
    return clamp_rate(learner.factor(a) * p, bounds)


class QLearningController(RateController):
    name = "qea"

    def __init__(self, n, bounds, strict_rule=True, lam=1, hybrid=False,
                 alpha=0.8, gamma=0.2, a_mult=2.0, a_divide=0.5):
        super().__init__(n, bounds, strict_rule)
        self.hybrid = hybrid
        self.name = "hqea" if hybrid else "qea"
        self.learner = QLearnerState(QTable(lam), alpha=alpha, gamma=gamma,
                                     a_mult_factor=a_mult, a_divide_factor=a_divide)

    def update(self, fb: GenerationFeedback, rng: RandomSource) -> str:
        f_old, f_best = fb.parent_fitness_before, fb.best_offspring_fitness
        s_new = compute_state(fb.offspring_fitnesses, f_old, self.strict_rule)
        q_update(self.learner, compute_reward(f_old, f_best), s_new)
        if self.hybrid:
            a = select_action_hqea(self.learner.table, s_new, f_best, f_old, self.strict_rule)
        else:
            a = select_action_qea(self.learner.table, s_new, rng)
        self.learner.prev_action = a
        self.p = apply_action(self.p, a, self.learner, self.bounds)
        return ACTION_NAMES[a]
