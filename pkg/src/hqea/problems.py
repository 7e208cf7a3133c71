"""Benchmark problems: OneMax, LeadingOnes and the W-model style transforms
Neutrality, Plateau and Ruggedness.

All evaluators are integer valued.  Each :class:`Problem` knows its optimum
value, which the engine uses as the termination target.
"""
from __future__ import annotations

from dataclasses import dataclass, field
import re
from typing import Sequence

import numpy as np

from .core import BitString, InvalidDimensionError, RandomSource

KINDS = ("onemax", "leadingones", "neutrality", "plateau", "ruggedness")
KIND_CODES = {kind: i for i, kind in enumerate(KINDS)}


class InvalidInputError(ValueError):
    pass


class UnsupportedParameterError(ValueError):
    pass


def evaluate_onemax(x: BitString) -> int:
    return x.count_ones()


def evaluate_leadingones(x: BitString, z: BitString | None = None,
                         sigma: Sequence[int] | None = None) -> int:
    """Longest prefix, in the order ``sigma``, on which ``x`` agrees with ``z``.

    ``z`` defaults to all ones and ``sigma`` (0-based) to the identity, which
    gives the classic LeadingOnes.
    """
    n = x.n
    if z is not None and z.n != n:
        raise InvalidInputError(f"target has length {z.n}, expected {n}")
    bits = x.to_array()
    agree = bits == 1 if z is None else bits == z.to_array()
    if sigma is not None:
        sigma = np.asarray(sigma)
        if sigma.shape != (n,):
            raise InvalidInputError(f"permutation has length {sigma.size}, expected {n}")
        agree = agree[sigma]
    miss = np.flatnonzero(~agree)
    return int(miss[0]) if miss.size else n


def evaluate_neutrality(x: BitString, k: int) -> int:
    """Number of complete length-``k`` blocks holding a majority of ones.

    The ``n mod k`` trailing bits do not contribute.
    """
    if k < 1 or k % 2 == 0:
        raise UnsupportedParameterError(f"neutrality needs an odd block size, got k={k}")
    if k > x.n:
        raise InvalidInputError(f"block size {k} exceeds n={x.n}")
    m = x.n // k
    blocks = x.to_array()[: m * k].reshape(m, k)
    return int((2 * blocks.sum(axis=1, dtype=np.int64) > k).sum())


def apply_plateau(f: int, k: int) -> int:
    if k < 1:
        raise UnsupportedParameterError(f"plateau size must be >= 1, got k={k}")
    return f // k + 1


def apply_ruggedness_r2(f: int, n: int) -> int:
    if not 0 <= f <= n:
        raise InvalidInputError(f"fitness {f} outside [0, {n}]")
    if f == n:
        return n
    if (f - n) % 2 == 0:
        return f + 1
    return max(f - 1, 0)


@dataclass(frozen=True)
class Problem:
    """Fully parameterized benchmark instance.

    ``permutation`` is 0-based and maps a prefix rank to a bit position.
    ``seed`` records how a randomized LeadingOnes instance was drawn.
    """

    kind: str
    n: int
    k: int | None = None
    target: tuple[int, ...] | None = field(default=None, repr=False)
    permutation: tuple[int, ...] | None = field(default=None, repr=False)
    seed: int | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidInputError(f"unknown problem kind {self.kind!r}")
        if self.n < 1:
            raise InvalidDimensionError(f"n must be >= 1, got {self.n}")
        if self.kind in ("neutrality", "plateau"):
            if self.k is None or self.k < 1:
                raise UnsupportedParameterError(f"{self.kind} needs k >= 1")
            if self.kind == "neutrality":
                if self.k % 2 == 0:
                    raise UnsupportedParameterError(
                        f"neutrality needs an odd block size, got k={self.k}")
                if self.k > self.n:
                    raise InvalidInputError(f"block size {self.k} exceeds n={self.n}")
        elif self.k is not None:
            object.__setattr__(self, "k", None)
        if self.kind != "leadingones" and (self.target or self.permutation):
            raise InvalidInputError("target/permutation only apply to leadingones")
        if self.target is not None:
            if len(self.target) != self.n or set(self.target) - {0, 1}:
                raise InvalidInputError("target must be a bit sequence of length n")
            object.__setattr__(self, "target", tuple(int(b) for b in self.target))
        if self.permutation is not None:
            if sorted(self.permutation) != list(range(self.n)):
                raise InvalidInputError("permutation must be a permutation of 0..n-1")
            object.__setattr__(self, "permutation", tuple(int(i) for i in self.permutation))

    @classmethod
    def onemax(cls, n: int) -> Problem:
        return cls("onemax", n)

    @classmethod
    def leadingones(cls, n: int, randomized: bool = False, seed: int = 0) -> Problem:
        if not randomized:
            return cls("leadingones", n)
        rng = RandomSource(seed)
        target = tuple(rng.integers(2) for _ in range(n))
        perm = list(range(n))
        for i in range(n - 1, 0, -1):
            j = rng.integers(i + 1)
            perm[i], perm[j] = perm[j], perm[i]
        return cls("leadingones", n, target=target, permutation=tuple(perm), seed=seed)

    @classmethod
    def neutrality(cls, n: int, k: int = 3) -> Problem:
        return cls("neutrality", n, k)

    @classmethod
    def plateau(cls, n: int, k: int) -> Problem:
        return cls("plateau", n, k)

    @classmethod
    def ruggedness(cls, n: int) -> Problem:
        return cls("ruggedness", n)

    @property
    def label(self) -> str:
        if self.kind in ("neutrality", "plateau"):
            return f"{self.kind}{self.k}"
        return self.kind

    def target_bits(self) -> BitString | None:
        return None if self.target is None else BitString.from_bits(self.target)

    def evaluate(self, x: BitString) -> int:
        if x.n != self.n:
            raise InvalidInputError(f"string has length {x.n}, expected {self.n}")
        if self.kind == "onemax":
            return evaluate_onemax(x)
        if self.kind == "leadingones":
            return evaluate_leadingones(x, self.target_bits(), self.permutation)
        if self.kind == "neutrality":
            return evaluate_neutrality(x, self.k)
        if self.kind == "plateau":
            return apply_plateau(evaluate_onemax(x), self.k)
        return apply_ruggedness_r2(evaluate_onemax(x), self.n)

    def optimum_value(self) -> int:
        return optimum_value(self)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "n": self.n,
            "k": self.k,
            "permutation": None if self.permutation is None else list(self.permutation),
            "target": None if self.target is None else list(self.target),
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, data: dict) -> Problem:
        perm = data.get("permutation")
        target = data.get("target")
        return cls(
            kind=data["kind"],
            n=int(data["n"]),
            k=data.get("k"),
            target=None if target is None else tuple(target),
            permutation=None if perm is None else tuple(perm),
            seed=data.get("seed"),
        )


def optimum_value(problem: Problem) -> int:
    n, k = problem.n, problem.k
    if problem.kind == "neutrality":
        return n // k
    if problem.kind == "plateau":
        return n // k + 1
    return n


_LABEL_RE = re.compile(r"^(onemax|leadingones|neutrality|plateau|ruggedness)(\d*)$")


def parse_problem(label: str, n: int, k: int | None = None,
                  randomized: bool = False, seed: int = 0) -> Problem:
    """Build a problem from a label such as ``onemax``, ``plateau3`` or ``neutrality``.

    A numeric suffix sets ``k`` unless ``k`` is given explicitly.  Neutrality
    defaults to k=3; plateau has no default.
    """
    m = _LABEL_RE.match(label.strip().lower())
    if not m:
        raise InvalidInputError(f"unknown problem {label!r}")
    kind, suffix = m.groups()
    if k is None and suffix:
        k = int(suffix)
    if kind == "neutrality":
        return Problem.neutrality(n, 3 if k is None else k)
    if kind == "plateau":
        if k is None:
            raise InvalidInputError("plateau needs k (use --k or e.g. 'plateau2')")
        return Problem.plateau(n, k)
    if kind == "leadingones":
        return Problem.leadingones(n, randomized=randomized, seed=seed)
    return Problem(kind, n)


# Incremental evaluation used by the pure-Python engine.  An evaluator holds
# the parent as a bytearray plus whatever summary its problem needs, values
# offspring given only their flip positions, and absorbs the accepted flips.

class DeltaEvaluator:
    def __init__(self, problem: Problem, x: BitString):
        self.problem = problem
        self.n = problem.n
        self.x = bytearray(x.to_array().tobytes())
        self.value = 0

    def offspring_value(self, flips: Sequence[int]) -> int:
        raise NotImplementedError

    def accept(self, flips: Sequence[int], value: int) -> None:
        raise NotImplementedError

    def parent(self) -> BitString:
        return BitString.from_bits(np.frombuffer(bytes(self.x), dtype=np.uint8))


class _OneMaxDelta(DeltaEvaluator):
    def __init__(self, problem, x):
        super().__init__(problem, x)
        self.ones = sum(self.x)
        kind, n, k = problem.kind, problem.n, problem.k
        if kind == "plateau":
            self.transform = lambda c: c // k + 1
        elif kind == "ruggedness":
            self.transform = lambda c: apply_ruggedness_r2(c, n)
        else:
            self.transform = lambda c: c
        self.value = self.transform(self.ones)

    def offspring_value(self, flips):
        x = self.x
        c = self.ones + len(flips)
        for i in flips:
            c -= 2 * x[i]
        return self.transform(c)

    def accept(self, flips, value):
        x = self.x
        for i in flips:
            self.ones += 1 - 2 * x[i]
            x[i] ^= 1
        self.value = value


class _LeadingOnesDelta(DeltaEvaluator):
    def __init__(self, problem, x):
        super().__init__(problem, x)
        n = self.n
        z = problem.target if problem.target is not None else (1,) * n
        self.z = bytearray(z)
        self.sigma = list(problem.permutation) if problem.permutation is not None else list(range(n))
        self.rank = [0] * n
        for r, pos in enumerate(self.sigma):
            self.rank[pos] = r
        self.agree = bytearray(1 if a == b else 0 for a, b in zip(self.x, self.z))
        self.value = self._scan(0)

    def _scan(self, start):
        agree, sigma, n = self.agree, self.sigma, self.n
        j = start
        while j < n and agree[sigma[j]]:
            j += 1
        return j

    def offspring_value(self, flips):
        lead = self.value
        rmin = min(self.rank[i] for i in flips)
        if rmin != lead:
            return min(rmin, lead)
        agree = self.agree
        for i in flips:
            agree[i] ^= 1
        v = self._scan(lead)
        for i in flips:
            agree[i] ^= 1
        return v

    def accept(self, flips, value):
        for i in flips:
            self.x[i] ^= 1
            self.agree[i] ^= 1
        self.value = value


class _NeutralityDelta(DeltaEvaluator):
    def __init__(self, problem, x):
        super().__init__(problem, x)
        k = self.k = problem.k
        self.limit = (self.n // k) * k
        self.counts = [sum(self.x[b * k:(b + 1) * k]) for b in range(self.n // k)]
        self.value = sum(1 for c in self.counts if 2 * c > k)

    def _walk(self, flips, keep):
        x, k, counts, limit = self.x, self.k, self.counts, self.limit
        v = self.value
        touched = []
        for i in flips:
            if i >= limit:
                continue
            b = i // k
            before = 2 * counts[b] > k
            counts[b] += 1 - 2 * x[i]
            v += (2 * counts[b] > k) - before
            touched.append(i)
        if not keep:
            for i in touched:
                counts[i // k] -= 1 - 2 * x[i]
        return v

    def offspring_value(self, flips):
        return self._walk(flips, keep=False)

    def accept(self, flips, value):
        self._walk(flips, keep=True)
        for i in flips:
            self.x[i] ^= 1
        self.value = value


def delta_evaluator(problem: Problem, x: BitString) -> DeltaEvaluator:
    if problem.kind == "leadingones":
        return _LeadingOnesDelta(problem, x)
    if problem.kind == "neutrality":
        return _NeutralityDelta(problem, x)
    return _OneMaxDelta(problem, x)
