"""Bit strings, the seeded random source and sampling helpers.

The generator is xoshiro256** seeded through splitmix64.  Every draw made by
the library goes through :class:`RandomSource`, and the compiled kernel
reproduces the same stream bit for bit, so a seed fully determines a run on
either backend.
"""
from __future__ import annotations

import hashlib
import math
from typing import Iterable, Sequence

import numpy as np

MASK64 = (1 << 64) - 1
_TWO_NEG_53 = 1.0 / (1 << 53)


class InvalidDimensionError(ValueError):
    pass


class InvalidProbabilityError(ValueError):
    pass


def splitmix64(state: int) -> tuple[int, int]:
    """Advance a splitmix64 state; returns ``(new_state, output)``."""
    state = (state + 0x9E3779B97F4A7C15) & MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return state, z ^ (z >> 31)


def derive_seed(master_seed: int, *keys: object) -> int:
    """Child seed for ``keys`` (cell label, run index, ...) under a master seed.

    Uses BLAKE2b over the textual keys, so the mapping is stable across
    platforms and Python versions (unlike ``hash``).
    """
    h = hashlib.blake2b(digest_size=8)
    h.update(str(int(master_seed) & MASK64).encode())
    for key in keys:
        h.update(b"\x1f")
        h.update(str(key).encode())
    return int.from_bytes(h.digest(), "little")


class RandomSource:
    """xoshiro256** generator.

    Supported draws: raw 64-bit words, uniform reals in [0, 1), unbiased
    integers in [0, m), Bernoulli and Binomial samples.  Not thread safe;
    use one instance per run.
    """

    __slots__ = ("seed", "_s")

    def __init__(self, seed: int = 0):
        self.seed = int(seed) & MASK64
        sm = self.seed
        s = []
        for _ in range(4):
            sm, out = splitmix64(sm)
            s.append(out)
        self._s = s

    @property
    def state(self) -> tuple[int, int, int, int]:
        return tuple(self._s)

    @state.setter
    def state(self, value: Sequence[int]) -> None:
        if len(value) != 4 or not any(value):
            raise ValueError("xoshiro256** state must be four words, not all zero")
        self._s = [int(v) & MASK64 for v in value]

    def next_u64(self) -> int:
        s = self._s
        s0, s1, s2, s3 = s
        x = (s1 * 5) & MASK64
        result = ((((x << 7) | (x >> 57)) & MASK64) * 9) & MASK64
        t = (s1 << 17) & MASK64
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = ((s3 << 45) | (s3 >> 19)) & MASK64
        s[0], s[1], s[2], s[3] = s0, s1, s2, s3
        return result

    def random(self) -> float:
        """Uniform real in [0, 1) with 53 random bits."""
        return (self.next_u64() >> 11) * _TWO_NEG_53

    def integers(self, m: int) -> int:
        """Uniform integer in [0, m) by rejection (no modulo bias)."""
        if m <= 0:
            raise ValueError(f"upper bound must be positive, got {m}")
        threshold = ((1 << 64) - m) % m
        while True:
            r = self.next_u64()
            if r >= threshold:
                return r % m

    def bernoulli(self, p: float) -> bool:
        return self.random() < p

    def binomial(self, n: int, p: float) -> int:
        return binomial_flip_count(n, p, self)


def geometric_positions(n: int, p: float, rng: RandomSource) -> list[int]:
    """Indices in [0, n) selected independently with probability ``p``.

    Walks the string with geometric gaps, so the cost is proportional to the
    number of selected indices plus one.  Output is sorted ascending.
    """
    if p <= 0.0:
        return []
    if p >= 1.0:
        return list(range(n))
    log_q = math.log1p(-p)
    out = []
    pos = -1.0
    limit = float(n)
    while True:
        gap = math.floor(math.log(1.0 - rng.random()) / log_q)
        pos += gap + 1.0
        if pos >= limit:
            return out
        out.append(int(pos))


def binomial_flip_count(n: int, p: float, rng: RandomSource) -> int:
    """Exact Binomial(n, p) sample."""
    if not 0.0 <= p <= 1.0 or math.isnan(p):
        raise InvalidProbabilityError(f"probability must lie in [0, 1], got {p}")
    if n < 0:
        raise InvalidDimensionError(f"n must be non-negative, got {n}")
    if p == 0.0 or n == 0:
        return 0
    if p == 1.0:
        return n
    return len(geometric_positions(n, p, rng))


def _n_words(n: int) -> int:
    return (n + 63) >> 6


class BitString:
    """Immutable fixed-length bit string packed into little-endian 64-bit words.

    Bit ``i`` lives in ``words[i // 64]`` at bit offset ``i % 64``.  Padding
    bits of the last word are always zero.
    """

    __slots__ = ("_words", "_n")

    def __init__(self, words: np.ndarray, n: int):
        if n < 1:
            raise InvalidDimensionError(f"bit string length must be >= 1, got {n}")
        words = np.array(words, dtype=np.uint64, copy=True)
        if words.shape != (_n_words(n),):
            raise ValueError(f"expected {_n_words(n)} words for n={n}, got shape {words.shape}")
        tail = n & 63
        if tail:
            words[-1] &= np.uint64((1 << tail) - 1)
        words.setflags(write=False)
        self._words = words
        self._n = n

    @classmethod
    def from_bits(cls, bits: Iterable[int] | np.ndarray) -> BitString:
        arr = np.asarray(list(bits) if not isinstance(bits, np.ndarray) else bits)
        if arr.ndim != 1 or arr.size == 0:
            raise InvalidDimensionError("need a non-empty 1-d sequence of bits")
        if not np.isin(arr, (0, 1)).all():
            raise ValueError("bits must be 0 or 1")
        n = arr.size
        packed = np.packbits(arr.astype(np.uint8), bitorder="little")
        buf = np.zeros(_n_words(n) * 8, dtype=np.uint8)
        buf[: packed.size] = packed
        return cls(buf.view("<u8").astype(np.uint64), n)

    @classmethod
    def from_string(cls, text: str) -> BitString:
        return cls.from_bits([int(c) for c in text])

    @classmethod
    def zeros(cls, n: int) -> BitString:
        return cls(np.zeros(_n_words(max(n, 0)), dtype=np.uint64), n)

    @classmethod
    def ones(cls, n: int) -> BitString:
        return cls(np.full(_n_words(max(n, 0)), MASK64, dtype=np.uint64), n)

    @property
    def n(self) -> int:
        return self._n

    @property
    def words(self) -> np.ndarray:
        return self._words

    def __len__(self) -> int:
        return self._n

    def __getitem__(self, i: int) -> int:
        if i < 0:
            i += self._n
        if not 0 <= i < self._n:
            raise IndexError(i)
        return int(self._words[i >> 6] >> np.uint64(i & 63)) & 1

    def to_array(self) -> np.ndarray:
        """Bits as a fresh ``uint8`` array of length n."""
        raw = self._words.astype("<u8").view(np.uint8)
        return np.unpackbits(raw, bitorder="little")[: self._n]

    def count_ones(self) -> int:
        return int(np.bitwise_count(self._words).sum())

    def hamming(self, other: BitString) -> int:
        if other._n != self._n:
            raise InvalidDimensionError("length mismatch")
        return int(np.bitwise_count(self._words ^ other._words).sum())

    def flip(self, positions: Iterable[int]) -> BitString:
        words = self._words.copy()
        for i in positions:
            if not 0 <= i < self._n:
                raise IndexError(i)
            words[i >> 6] ^= np.uint64(1 << (i & 63))
        return BitString(words, self._n)

    def complement(self) -> BitString:
        return BitString(~self._words, self._n)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BitString):
            return NotImplemented
        return self._n == other._n and bool(np.array_equal(self._words, other._words))

    def __hash__(self) -> int:
        return hash((self._n, self._words.tobytes()))

    def __str__(self) -> str:
        return "".join("1" if b else "0" for b in self.to_array())

    def __repr__(self) -> str:
        body = str(self) if self._n <= 64 else f"{str(self)[:32]}...({self._n} bits)"
        return f"BitString('{body}')"


def random_bitstring(n: int, rng: RandomSource) -> BitString:
    """Uniform random string: ``ceil(n/64)`` raw words, tail bits discarded."""
    if n < 1:
        raise InvalidDimensionError(f"n must be >= 1, got {n}")
    words = np.array([rng.next_u64() for _ in range(_n_words(n))], dtype=np.uint64)
    return BitString(words, n)
