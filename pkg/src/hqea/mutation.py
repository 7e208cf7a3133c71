"""Shift standard bit mutation and mutation-rate bounds."""
from __future__ import annotations

from dataclasses import dataclass

from .core import BitString, RandomSource, geometric_positions


@dataclass(frozen=True)
class RateBounds:
    p_min: float
    p_max: float = 0.5

    def __post_init__(self):
        if not 0.0 < self.p_min <= self.p_max <= 0.5:
            raise ValueError(
                f"rate bounds must satisfy 0 < p_min <= p_max <= 1/2, got [{self.p_min}, {self.p_max}]")

    @classmethod
    def for_dimension(cls, n: int, p_min: str | float = "inv-n", p_max: float = 0.5) -> RateBounds:
        return cls(resolve_p_min(p_min, n), p_max)


def resolve_p_min(value: str | float, n: int) -> float:
    """``'inv-n'`` -> 1/n, ``'inv-n2'`` -> 1/n^2, anything else parsed as a float."""
    if value == "inv-n":
        return 1.0 / n
    if value == "inv-n2":
        return 1.0 / (n * n)
    return float(value)


def clamp_rate(p: float, bounds: RateBounds) -> float:
    return min(max(bounds.p_min, p), bounds.p_max)


def sample_flips(n: int, p: float, rng: RandomSource) -> list[int]:
    """Positions flipped by one shift mutation: never empty.

    Each position is selected with probability ``p``; if none is, a single
    uniformly random position is used instead.
    """
    flips = geometric_positions(n, p, rng)
    if not flips:
        flips = [rng.integers(n)]
    return flips


def shift_mutate(x: BitString, p: float, rng: RandomSource) -> BitString:
    return x.flip(sample_flips(x.n, p, rng))
