"""Square-full numbers and their a²b³ decomposition.

Every square-full f is uniquely ``a**2 * b**3`` with b square-free, so
enumeration and counting run over square-free b with a in an induced range.
1 is square-full here (a = b = 1).
"""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator

import numpy as np

from .arith import integer_root, is_squarefree
from .sieve import small_primes

MAX_VALUE = 1 << 62


class NotSquarefullError(ValueError):
    pass


@lru_cache(maxsize=4096)
def _squarefree_cached(b: int) -> bool:
    return is_squarefree(b)


@dataclass(frozen=True, order=True)
class SquarefullDecomposition:
    f: int
    a: int
    b: int

    def __post_init__(self):
        if self.a < 1 or self.b < 1 or self.a * self.a * self.b ** 3 != self.f:
            raise ValueError(f"{self.f} != {self.a}^2 * {self.b}^3")
        if not _squarefree_cached(self.b):
            raise ValueError(f"b={self.b} is not square-free")


@dataclass(frozen=True)
class TruncationLevel:
    B: float

    def __post_init__(self):
        if not self.B >= 1:
            raise ValueError(f"truncation level must be >= 1, got {self.B}")

    @property
    def bmax(self) -> int:
        return math.floor(self.B)


def _bmax(trunc: TruncationLevel | float | None, x: int) -> int:
    """Largest b worth visiting for values up to x."""
    top = integer_root(max(x, 0), 3)
    if trunc is None:
        return top
    if not isinstance(trunc, TruncationLevel):
        trunc = TruncationLevel(trunc)
    return min(top, trunc.bmax)


@lru_cache(maxsize=8)
def _squarefree_flags(n: int) -> np.ndarray:
    flags = np.ones(n + 1, dtype=bool)
    flags[0] = False
    for p in small_primes(math.isqrt(n)).tolist():
        flags[p * p :: p * p] = False
    flags.flags.writeable = False
    return flags


def squarefree_upto(n: int) -> np.ndarray:
    """Square-free integers in [1, n]."""
    if n < 1:
        return np.empty(0, dtype=np.int64)
    size = 1 << n.bit_length()
    return np.flatnonzero(_squarefree_flags(size)[: n + 1]).astype(np.int64)


@lru_cache(maxsize=1024)
def _cubes_of_squarefree(n: int) -> tuple[int, ...]:
    return tuple(b ** 3 for b in squarefree_upto(n).tolist())


def _prime_exponents(f: int) -> tuple[dict[int, int], int]:
    """Exponents of primes <= cbrt(f) dividing f, and the unfactored cofactor."""
    limit = integer_root(f, 3)
    primes = small_primes(limit)
    divisors = primes[np.int64(f) % primes == 0].tolist() if len(primes) else []
    exps = {}
    for p in divisors:
        v = 0
        while f % p == 0:
            f //= p
            v += 1
        exps[p] = v
    return exps, f


def is_squarefull(f: int) -> bool:
    if not 1 <= f <= MAX_VALUE:
        raise ValueError(f"f must be in [1, 2^62], got {f}")
    exps, rest = _prime_exponents(f)
    if any(v < 2 for v in exps.values()):
        return False
    # any prime left above cbrt(f) can only appear squared
    r = math.isqrt(rest)
    return r * r == rest


def decompose(f: int) -> SquarefullDecomposition:
    """The unique (a, b): b is the product of primes with odd exponent."""
    if not 1 <= f <= MAX_VALUE:
        raise ValueError(f"f must be in [1, 2^62], got {f}")
    exps, rest = _prime_exponents(f)
    r = math.isqrt(rest)
    if any(v < 2 for v in exps.values()) or r * r != rest:
        raise NotSquarefullError(f"{f} is not square-full")
    b = math.prod(p for p, v in exps.items() if v % 2)
    return SquarefullDecomposition(f, math.isqrt(f // b ** 3), b)


def _a_range(lo: int, hi: int, b: int) -> tuple[int, int]:
    b3 = b ** 3
    return math.isqrt(lo // b3) + 1, math.isqrt(hi // b3)


def _run(a0: int, a1: int, b: int) -> Iterator[tuple[int, int, int]]:
    b3 = b ** 3
    for a in range(a0, a1 + 1):
        yield a * a * b3, a, b


def _runs(lo: int, hi: int, trunc) -> Iterator[Iterator[tuple[int, int, int]]]:
    for b in squarefree_upto(_bmax(trunc, hi)).tolist():
        a0, a1 = _a_range(lo, hi, b)
        if a0 <= a1:
            yield _run(a0, a1, b)


def iter_squarefull(lo: int, hi: int, trunc: TruncationLevel | None = None
                    ) -> Iterator[SquarefullDecomposition]:
    """Lazily yield square-full f in (lo, hi] in ascending order.

    Per-b progressions are merged with a heap, so memory is O(#b).
    """
    if not 0 <= lo < hi <= MAX_VALUE:
        raise ValueError(f"need 0 <= lo < hi <= 2^62, got ({lo}, {hi}]")
    for f, a, b in heapq.merge(*_runs(lo, hi, trunc)):
        yield SquarefullDecomposition(f, a, b)


def enumerate_squarefull(lo: int, hi: int, trunc: TruncationLevel | None = None
                         ) -> list[SquarefullDecomposition]:
    return list(iter_squarefull(lo, hi, trunc))


def squarefull_arrays(lo: int, hi: int, trunc: TruncationLevel | None = None
                      ) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Sorted ``(f, a, b)`` int64 arrays for square-full f in (lo, hi]."""
    if not 0 <= lo < hi <= MAX_VALUE:
        raise ValueError(f"need 0 <= lo < hi <= 2^62, got ({lo}, {hi}]")
    fs, as_, bs = [], [], []
    for b in squarefree_upto(_bmax(trunc, hi)).tolist():
        a0, a1 = _a_range(lo, hi, b)
        if a0 > a1:
            continue
        a = np.arange(a0, a1 + 1, dtype=np.int64)
        fs.append(a * a * np.int64(b ** 3))
        as_.append(a)
        bs.append(np.full(len(a), b, dtype=np.int64))
    if not fs:
        empty = np.empty(0, dtype=np.int64)
        return empty, empty, empty
    f = np.concatenate(fs)
    order = np.argsort(f, kind="stable")
    return f[order], np.concatenate(as_)[order], np.concatenate(bs)[order]


def count_squarefull(x: int, trunc: TruncationLevel | None = None) -> int:
    """Q(x), or Q_B(x) with a truncation, by Σ_b floor(sqrt(x / b³))."""
    if x < 0:
        raise ValueError(f"x must be >= 0, got {x}")
    total = 0
    for b in squarefree_upto(_bmax(trunc, x)).tolist():
        total += math.isqrt(x // b ** 3)
    return total


def window_count(m: int, trunc: TruncationLevel) -> int:
    """Number of f in Q_B with m² <= f < (m+1)²."""
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    lo, hi = m * m - 1, (m + 1) ** 2 - 1
    isqrt = math.isqrt
    return sum(isqrt(hi // b3) - isqrt(lo // b3) for b3 in _cubes_of_squarefree(_bmax(trunc, hi)))
