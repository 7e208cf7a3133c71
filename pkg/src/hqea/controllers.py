"""Mutation-rate update policies for the (1+lambda) EA.

A controller owns the current rate ``p``.  Each generation the engine asks
it for the per-offspring rates, runs the generation, and hands the resulting
:class:`GenerationFeedback` back through :meth:`RateController.update`.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Sequence

from .core import RandomSource
from .mutation import RateBounds, clamp_rate

LOW, HIGH = "low", "high"


class ContractViolation(RuntimeError):
    pass


@dataclass(frozen=True)
class GenerationFeedback:
    parent_fitness_before: int
    best_offspring_fitness: int
    offspring_fitnesses: tuple[int, ...]
    winning_rate_tag: str | None = None

    def __post_init__(self):
        if self.offspring_fitnesses and max(self.offspring_fitnesses) != self.best_offspring_fitness:
            raise ValueError("best_offspring_fitness must be the maximum offspring fitness")


@dataclass(frozen=True)
class ControllerConfig:
    bounds: RateBounds
    A: float = 2.0
    b: float = 0.5
    strict_rule: bool = True


def is_success(fb: GenerationFeedback, strict_rule: bool) -> bool:
    if strict_rule:
        return fb.best_offspring_fitness > fb.parent_fitness_before
    return fb.best_offspring_fitness >= fb.parent_fitness_before


def static_update(p: float, fb: GenerationFeedback) -> float:
    return p


def one_fifth_update(p: float, fb: GenerationFeedback, cfg: ControllerConfig) -> float:
    factor = cfg.A if is_success(fb, cfg.strict_rule) else cfg.b
    return clamp_rate(factor * p, cfg.bounds)


@dataclass(frozen=True)
class TwoRateState:
    """2-rate controller state.  The rate is kept as ``p = r/n``."""

    rate: float
    n: int
    bounds: RateBounds

    @property
    def r(self) -> float:
        return self.rate * self.n

    def low_rate(self) -> float:
        return clamp_rate(self.rate / 2, self.bounds)

    def high_rate(self) -> float:
        return clamp_rate(2 * self.rate, self.bounds)


def two_rate_sample_rates(st: TwoRateState, lam: int, rng: RandomSource) -> list[str]:
    """Sub-rate tag per offspring: the first ceil(lam/2) get ``low``.

    With a single offspring the tag is a fair coin flip.
    """
    if lam < 1:
        raise ValueError(f"lambda must be >= 1, got {lam}")
    if lam == 1:
        return [LOW if rng.random() < 0.5 else HIGH]
    n_low = (lam + 1) // 2
    return [LOW] * n_low + [HIGH] * (lam - n_low)


def _two_rate_step(st: TwoRateState, fb: GenerationFeedback,
                   rng: RandomSource) -> tuple[TwoRateState, str]:
    tag = fb.winning_rate_tag
    if tag not in (LOW, HIGH):
        raise ContractViolation("2-rate update needs the winning sub-rate tag")
    other = HIGH if tag == LOW else LOW
    chosen = tag if rng.random() < 0.75 else other
    new_rate = st.rate / 2 if chosen == LOW else 2 * st.rate
    return replace(st, rate=clamp_rate(new_rate, st.bounds)), chosen


def two_rate_update(st: TwoRateState, fb: GenerationFeedback, rng: RandomSource) -> TwoRateState:
    """Adopt the winning sub-rate with probability 3/4, the other one otherwise."""
    return _two_rate_step(st, fb, rng)[0]


class RateController:
    """Base contract: holds ``p`` and adapts it after every generation."""

    name = "static"

    def __init__(self, n: int, bounds: RateBounds, strict_rule: bool = True):
        self.n = n
        self.bounds = bounds
        self.strict_rule = strict_rule
        self.p = 1.0 / n

    def offspring_rates(self, lam: int, rng: RandomSource) -> tuple[list[float], list[str] | None]:
        return [self.p] * lam, None

    def update(self, fb: GenerationFeedback, rng: RandomSource) -> str:
        """Adapt ``p``; returns a short label of the decision taken."""
        raise NotImplementedError


class StaticController(RateController):
    name = "static"

    def update(self, fb, rng):
        self.p = static_update(self.p, fb)
        return ""


class OneFifthController(RateController):
    name = "eaab"

    def __init__(self, n, bounds, strict_rule=True, A=2.0, b=0.5):
        super().__init__(n, bounds, strict_rule)
        self.config = ControllerConfig(bounds, A, b, strict_rule)

    def update(self, fb, rng):
        self.p = one_fifth_update(self.p, fb, self.config)
        return "mult" if is_success(fb, self.strict_rule) else "divide"


class TwoRateController(RateController):
    """The strict flag has no effect: the update prefers the winning sub-rate."""

    name = "tworate"

    def __init__(self, n, bounds, strict_rule=True):
        super().__init__(n, bounds, strict_rule)
        self.state = TwoRateState(self.p, n, bounds)

    def offspring_rates(self, lam, rng):
        tags = two_rate_sample_rates(self.state, lam, rng)
        low, high = self.state.low_rate(), self.state.high_rate()
        return [low if t == LOW else high for t in tags], tags

    def update(self, fb, rng):
        self.state, chosen = _two_rate_step(self.state, fb, rng)
        self.p = self.state.rate
        return chosen


def replay(controller: RateController, feedback: Sequence[GenerationFeedback],
           rng: RandomSource | None = None) -> list[float]:
    """Drive ``controller`` with a recorded feedback stream; returns the rate
    in force at the start of every generation, followed by the final rate."""
    rng = rng or RandomSource(0)
    rates = []
    for fb in feedback:
        rates.append(controller.p)
        controller.update(fb, rng)
    rates.append(controller.p)
    return rates
