"""Representation functions N = m + f with Λ-weighted m.

``repr_sqfull`` counts square-full f, ``repr_sq`` squares only and
``repr_truncated`` keeps f = a²b³ with b <= B.  Short-interval totals are
available by two independent routes:

* direct: Σ_{X<N<=X+H} R(N), term by term from a :class:`LambdaTable`;
* rearranged: Σ_f [ψ(X+H-f) - ψ(X-f)], one ψ-prefix sweep with no table.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .sieve import LambdaTable, weighted_prefix
from .squarefull import TruncationLevel, squarefull_arrays


@dataclass(frozen=True)
class IntervalSpec:
    X: int
    H: int
    epsilon: float = 0.05

    def __post_init__(self):
        if not 4 <= self.H <= self.X:
            raise ValueError(f"need 4 <= H <= X, got X={self.X}, H={self.H}")

    @property
    def admissible(self) -> bool:
        """X^(1/2+eps) <= H <= X^(1-eps), lower end taken after flooring."""
        lower = math.floor(self.X ** (0.5 + self.epsilon))
        return lower <= self.H <= self.X ** (1 - self.epsilon)


@dataclass(frozen=True)
class ReprValue:
    N: int
    value: float
    term_count: int

    def __float__(self):
        return self.value


@dataclass(frozen=True)
class IntervalSum:
    value: float
    term_count: int
    route: str
    error_bound: float = 0.0

    def __float__(self):
        return self.value


@lru_cache(maxsize=16)
def _sqfull_upto(limit: int, bmax: int | None) -> tuple[np.ndarray, np.ndarray]:
    trunc = None if bmax is None else TruncationLevel(bmax)
    f, _, b = squarefull_arrays(0, max(limit, 1), trunc)
    f.flags.writeable = False
    b.flags.writeable = False
    return f, b


def _trunc_key(trunc: TruncationLevel | None) -> int | None:
    return None if trunc is None else trunc.bmax


def _check_N(N: int, table: LambdaTable) -> None:
    if N < 2:
        raise ValueError(f"N must be >= 2, got {N}")
    if N > table.limit + 1:
        raise IndexError(f"N={N} needs a Λ-table up to {N - 1}, have {table.limit}")


def _repr_from(N: int, fs: np.ndarray, table: LambdaTable) -> ReprValue:
    fs = fs[: np.searchsorted(fs, N - 1, side="right")]
    vals = table.values(N - fs)
    return ReprValue(N, math.fsum(vals), int(np.count_nonzero(vals)))


def repr_sqfull(N: int, table: LambdaTable) -> ReprValue:
    """Σ_{m + f = N, f square-full, m >= 1} Λ(m)."""
    _check_N(N, table)
    return _repr_from(N, _sqfull_upto(table.limit, None)[0], table)


def repr_sq(N: int, table: LambdaTable) -> ReprValue:
    """Σ_{m + n² = N, n >= 1} Λ(m)."""
    _check_N(N, table)
    n = np.arange(1, math.isqrt(N - 1) + 1, dtype=np.int64)
    return _repr_from(N, n * n, table)


def repr_truncated(N: int, trunc: TruncationLevel, table: LambdaTable) -> ReprValue:
    """Σ_{m + a²b³ = N, b <= B} Λ(m) μ(b)²."""
    _check_N(N, table)
    return _repr_from(N, _sqfull_upto(table.limit, trunc.bmax)[0], table)


def truncation_gap(N: int, trunc: TruncationLevel, table: LambdaTable) -> tuple[float, float]:
    """``(R(N) - R_B(N), sqrt(N) log N / sqrt(B))``.

    The gap is summed directly over the f with b > B, so it is never negative.
    """
    _check_N(N, table)
    fs, bs = _sqfull_upto(table.limit, None)
    k = np.searchsorted(fs, N - 1, side="right")
    dropped = fs[:k][bs[:k] > trunc.bmax]
    gap = math.fsum(table.values(N - dropped)) if len(dropped) else 0.0
    return gap, math.sqrt(N) * math.log(N) / math.sqrt(trunc.B)


def interval_sum_direct(spec: IntervalSpec, trunc: TruncationLevel | None,
                        table: LambdaTable, *, chunk: int = 1 << 21) -> IntervalSum:
    """Σ_{X<N<=X+H} R(N) (or R_B), evaluated N by N from the table."""
    X, H = spec.X, spec.H
    if X + H > table.limit:
        raise IndexError(f"X+H={X + H} exceeds Λ-table limit {table.limit}")
    fs = _sqfull_upto(table.limit, _trunc_key(trunc))[0]
    fs = fs[: np.searchsorted(fs, X + H - 1, side="right")]
    rows = max(1, chunk // max(len(fs), 1))
    parts, nonzero = [], 0
    for n0 in range(X + 1, X + H + 1, rows):
        Ns = np.arange(n0, min(n0 + rows, X + H + 1), dtype=np.int64)
        ms = Ns[:, None] - fs[None, :]
        vals = table.values(ms[ms >= 1])
        parts.append(math.fsum(vals))
        nonzero += int(np.count_nonzero(vals))
    value = math.fsum(parts)
    return IntervalSum(value, nonzero, "direct", len(parts) * math.ulp(value))


def interval_sum_rearranged(spec: IntervalSpec, trunc: TruncationLevel | None = None, *,
                            threads: int = 1) -> IntervalSum:
    """Σ_{f <= X+H-1} [ψ(X+H-f) - ψ(X-f)] over f in Q (or Q_B).

    All ψ values come from one fixed-point sweep, so the total is exact up to
    the one-time rounding of each log weight (``error_bound``).
    """
    X, H = spec.X, spec.H
    trunc_arg = None if trunc is None else TruncationLevel(trunc.bmax)
    fs = squarefull_arrays(0, X + H - 1, trunc_arg)[0]
    pts = np.concatenate((X + H - fs, X - fs))
    pref = weighted_prefix(pts, threads=threads)
    n = len(fs)
    total = sum(pref.fixed[:n]) - sum(pref.fixed[n:])
    count = int(pref.counts[:n].sum() - pref.counts[n:].sum())
    value = total / float(1 << pref.scale_bits)
    return IntervalSum(value, count, "rearranged", count * pref.error_per_term)
