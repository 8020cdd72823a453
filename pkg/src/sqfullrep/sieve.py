"""Prime and von Mangoldt tables.

A full table (:class:`LambdaTable`) stores primality as a wheel-30 bit-table
(one byte per 30 integers) plus a sparse list of proper prime powers.
Windows near large X are handled by :func:`sieve_segment`; long Λ-weighted
prefix sums over many query points come from a single segmented sweep
(:func:`weighted_prefix`) that accumulates in fixed point, so its results do
not depend on segment scheduling or thread count.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .arith import CompensatedSum, PrimePower

SEGMENT_WIDTH = 1 << 22
MAX_TABLE_LIMIT = 2_000_000_000
MAX_SIEVE = 1 << 62

# Fixed-point scale for swept log weights: 2**35 keeps a 2**22-wide segment of
# log p <= 43 inside int64.
SCALE_BITS = 35
_SCALE = float(1 << SCALE_BITS)

WHEEL = 30
RESIDUES = np.array([1, 7, 11, 13, 17, 19, 23, 29], dtype=np.int64)
_RES_BIT = np.full(WHEEL, -1, dtype=np.int64)
_RES_BIT[RESIDUES] = np.arange(8)
_WHEEL_PRIMES = (2, 3, 5)


class ResourceError(MemoryError):
    pass


@lru_cache(maxsize=4)
def _small_sieve(n: int) -> np.ndarray:
    n = max(n, 2)
    flags = np.ones(n + 1, dtype=bool)
    flags[:2] = False
    flags[4::2] = False
    for p in range(3, math.isqrt(n) + 1, 2):
        if flags[p]:
            flags[p * p :: 2 * p] = False
    out = np.flatnonzero(flags).astype(np.int64)
    out.flags.writeable = False
    return out


def small_primes(n: int) -> np.ndarray:
    """All primes <= n (cached by powers of two to keep the cache small)."""
    size = 1 << max(n, 2).bit_length()
    primes = _small_sieve(size)
    return primes[: np.searchsorted(primes, n, side="right")]


def base_primes_for(hi: int) -> np.ndarray:
    # up to 2*sqrt(hi) so the table provably ends past sqrt(hi)
    return small_primes(2 * math.isqrt(hi) + 2)


def primes_between(lo: int, hi: int, base: np.ndarray | None = None) -> np.ndarray:
    """Primes in (lo, hi] as an int64 array, odd-only Eratosthenes.

    ``base`` must contain every prime up to sqrt(hi).
    """
    if hi <= lo or hi < 2:
        return np.empty(0, dtype=np.int64)
    lo = max(lo, 0)
    if base is None:
        base = base_primes_for(hi)
    elif len(base) == 0 or int(base[-1]) < math.isqrt(hi):
        raise ValueError(f"base primes stop at {int(base[-1]) if len(base) else 0}, need sqrt({hi})")
    first = lo + 1 if (lo + 1) % 2 else lo + 2
    n_odd = (hi - first) // 2 + 1 if hi >= first else 0
    flags = np.ones(n_odd, dtype=bool)
    if first == 1 and n_odd:
        flags[0] = False
    for p in base[1:]:
        p = int(p)
        pp = p * p
        if pp > hi:
            break
        start = max(pp, -(-first // p) * p)
        if start % 2 == 0:
            start += p
        if start <= hi:
            flags[(start - first) // 2 :: p] = False
    out = first + 2 * np.flatnonzero(flags).astype(np.int64)
    if lo < 2 <= hi:
        out = np.concatenate(([2], out))
    return out


def prime_powers_upto(limit: int) -> np.ndarray:
    """Sorted array of ``[value, base]`` rows for every p^k <= limit, k >= 2."""
    rows = []
    for p in small_primes(math.isqrt(limit)).tolist():
        v = p * p
        while v <= limit:
            rows.append((v, p))
            v *= p
    if not rows:
        return np.empty((0, 2), dtype=np.int64)
    arr = np.array(rows, dtype=np.int64)
    return arr[np.argsort(arr[:, 0], kind="stable")]


# ------------------------------------------------------------- wheel-30 bits


class Wheel30Bits:
    """Primality flags over [start, start + 30*len(data)), one byte per 30.

    Bit j of byte i refers to ``start + 30*i + RESIDUES[j]``; 2, 3 and 5 are
    kept outside the wheel in ``extra``.
    """

    def __init__(self, start: int, data: np.ndarray, extra: tuple = ()):
        if start % WHEEL:
            raise ValueError("wheel start must be a multiple of 30")
        self.start = start
        self.data = data
        self.extra = frozenset(extra)

    @classmethod
    def from_primes(cls, lo: int, hi: int, primes: np.ndarray) -> Wheel30Bits:
        start = (lo // WHEEL) * WHEEL
        nbytes = -(-(hi + 1 - start) // WHEEL)
        primes = np.asarray(primes, dtype=np.int64)
        coprime = _RES_BIT[primes % WHEEL] >= 0
        wp = primes[coprime]
        flags = np.zeros(nbytes * 8, dtype=bool)
        flags[8 * ((wp - start) // WHEEL) + _RES_BIT[wp % WHEEL]] = True
        data = np.packbits(flags, bitorder="little")
        extra = tuple(int(p) for p in primes[~coprime])
        return cls(start, data, extra)

    @property
    def stop(self) -> int:
        return self.start + WHEEL * len(self.data)

    @property
    def nbytes(self) -> int:
        return self.data.nbytes

    def __getitem__(self, n):
        if np.isscalar(n):
            return bool(self.contains(np.array([n]))[0])
        return self.contains(n)

    def contains(self, ms) -> np.ndarray:
        ms = np.asarray(ms, dtype=np.int64)
        out = np.zeros(ms.shape, dtype=bool)
        inside = (ms >= self.start) & (ms < self.stop)
        off = ms[inside] - self.start
        bit = _RES_BIT[off % WHEEL]
        hit = np.zeros(off.shape, dtype=bool)
        ok = bit >= 0
        byte = self.data[off[ok] // WHEEL]
        hit[ok] = (byte >> bit[ok].astype(np.uint8)) & 1 == 1
        out[inside] = hit
        if self.extra:
            out |= np.isin(ms, list(self.extra))
        return out

    def numbers(self) -> np.ndarray:
        flags = np.unpackbits(self.data, bitorder="little").reshape(-1, 8)
        row, col = np.nonzero(flags)
        vals = self.start + WHEEL * row.astype(np.int64) + RESIDUES[col]
        if self.extra:
            vals = np.union1d(vals, np.array(sorted(self.extra), dtype=np.int64))
        return vals


# ------------------------------------------------------------------ segments


@dataclass(frozen=True)
class SieveSegment:
    lo: int
    hi: int
    prime_bits: Wheel30Bits

    def primes(self) -> np.ndarray:
        vals = self.prime_bits.numbers()
        return vals[(vals > self.lo) & (vals <= self.hi)]

    def is_prime(self, n: int) -> bool:
        if not self.lo < n <= self.hi:
            raise ValueError(f"{n} outside segment ({self.lo}, {self.hi}]")
        return self.prime_bits[n]


def sieve_segment(lo: int, hi: int, *, width: int = SEGMENT_WIDTH,
                  base: np.ndarray | None = None) -> SieveSegment:
    """Exact primality for every n in (lo, hi]."""
    if not 2 <= lo < hi <= MAX_SIEVE:
        raise ValueError(f"need 2 <= lo < hi <= 2^62, got ({lo}, {hi}]")
    if hi - lo > width:
        raise ValueError(f"segment width {hi - lo} exceeds budget {width}")
    primes = primes_between(lo, hi, base)
    return SieveSegment(lo, hi, Wheel30Bits.from_primes(lo, hi, primes))


# -------------------------------------------------------------- lambda table


class LambdaTable:
    """Queryable Λ(m) for 1 <= m <= limit."""

    def __init__(self, limit: int, prime_bits: Wheel30Bits, pp: np.ndarray):
        self.limit = limit
        self.prime_bits = prime_bits
        self._pp_values = np.ascontiguousarray(pp[:, 0])
        self._pp_bases = np.ascontiguousarray(pp[:, 1])
        self._pp_logs = np.log(self._pp_bases.astype(np.float64))

    @property
    def prime_powers(self) -> list[PrimePower]:
        out = []
        for v, b, lg in zip(self._pp_values.tolist(), self._pp_bases.tolist(), self._pp_logs.tolist()):
            out.append(PrimePower(v, b, round(math.log(v) / math.log(b)), lg))
        return out

    @property
    def nbytes(self) -> int:
        return self.prime_bits.nbytes + self._pp_values.nbytes * 3

    def _check(self, ms: np.ndarray) -> None:
        if ms.size and (ms.min() < 1 or ms.max() > self.limit):
            raise IndexError(f"query outside [1, {self.limit}]")

    def is_prime(self, ms) -> np.ndarray:
        ms = np.asarray(ms, dtype=np.int64)
        self._check(ms)
        return self.prime_bits.contains(ms)

    def values(self, ms) -> np.ndarray:
        """Vectorized Λ(m)."""
        ms = np.asarray(ms, dtype=np.int64)
        self._check(ms)
        out = np.zeros(ms.shape, dtype=np.float64)
        isp = self.prime_bits.contains(ms)
        out[isp] = np.log(ms[isp].astype(np.float64))
        if len(self._pp_values):
            pos = np.searchsorted(self._pp_values, ms)
            pos_c = np.minimum(pos, len(self._pp_values) - 1)
            hit = self._pp_values[pos_c] == ms
            out[hit] = self._pp_logs[pos_c[hit]]
        return out

    def lam(self, m: int) -> float:
        return float(self.values(np.array([m]))[0])

    __call__ = lam

    def primes(self, lo: int = 0, hi: int | None = None) -> np.ndarray:
        hi = self.limit if hi is None else min(hi, self.limit)
        vals = self.prime_bits.numbers()
        return vals[(vals > lo) & (vals <= hi)]

    def psi(self, x: int) -> float:
        if not 1 <= x <= self.limit:
            raise ValueError(f"psi({x}) outside table range [1, {self.limit}]")
        logs = np.log(self.primes(0, x).astype(np.float64))
        k = np.searchsorted(self._pp_values, x, side="right")
        return math.fsum(np.concatenate((logs, self._pp_logs[:k])))

    def theta(self, x: int) -> float:
        if not 1 <= x <= self.limit:
            raise ValueError(f"theta({x}) outside table range [1, {self.limit}]")
        return math.fsum(np.log(self.primes(0, x).astype(np.float64)))


def table_bytes(limit: int) -> int:
    n_pp = int(2 * math.isqrt(limit) / max(math.log(max(limit, 3)) / 2, 1)) + 64
    return -(-(limit + 1) // WHEEL) + 24 * n_pp


def build_lambda_table(limit: int, *, max_limit: int = MAX_TABLE_LIMIT,
                       width: int = SEGMENT_WIDTH) -> LambdaTable:
    if limit < 2:
        raise ValueError(f"limit must be >= 2, got {limit}")
    if limit > max_limit:
        raise ResourceError(
            f"Λ-table up to {limit} needs about {table_bytes(limit)} bytes; "
            f"budget allows limit <= {max_limit}"
        )
    base = base_primes_for(limit)
    step = max(WHEEL, (width // WHEEL) * WHEEL)
    chunks, extra = [], set()
    for lo in range(0, limit + 1, step):
        hi = min(lo + step, limit + 1) - 1  # primes in (lo-1, hi] == [lo, hi]
        primes = primes_between(lo - 1, hi, base) if lo else primes_between(0, hi, base)
        bits = Wheel30Bits.from_primes(lo, lo + step - 1, primes)
        chunks.append(bits.data)
        extra |= bits.extra
    bits = Wheel30Bits(0, np.concatenate(chunks), tuple(sorted(extra)))
    return LambdaTable(limit, bits, prime_powers_upto(limit))


# ------------------------------------------------------- sweeps and windows


def log_sum(primes: np.ndarray) -> tuple[float, float]:
    """Correctly rounded Σ log p together with an absolute error bound."""
    if len(primes) == 0:
        return 0.0, 0.0
    logs = np.log(primes.astype(np.float64))
    total = math.fsum(logs)
    bound = len(logs) * 2.0 ** -52 * float(logs.max()) + math.ulp(total)
    return total, bound


def theta_between(t: int, H: int, *, width: int = SEGMENT_WIDTH, return_error: bool = False):
    """θ(t+H) − θ(t) = Σ_{t < p <= t+H} log p."""
    if t < 1 or H < 1:
        raise ValueError(f"need t >= 1 and H >= 1, got t={t}, H={H}")
    base = base_primes_for(t + H)
    parts = []
    for lo in range(t, t + H, width):
        parts.append(primes_between(lo, min(lo + width, t + H), base))
    value, bound = log_sum(np.concatenate(parts))
    return (value, bound) if return_error else value


@dataclass
class PrefixSums:
    """Fixed-point prefix sums Σ_{1<=m<=q} w(m) at query points.

    ``fixed[i]`` is an exact Python int in units of 2**-scale_bits; each
    weight was rounded once, so ``|value - true| <= counts * error_per_term``.
    """

    points: np.ndarray
    fixed: list
    counts: np.ndarray
    scale_bits: int = SCALE_BITS

    @property
    def error_per_term(self) -> float:
        top = max(int(self.points.max()) if len(self.points) else 2, 2)
        return 2.0 ** -(self.scale_bits + 1) + 2.0 ** -52 * math.log(top)

    def value(self, i: int) -> float:
        return self.fixed[i] / float(1 << self.scale_bits)

    def error_bound(self, i: int) -> float:
        return int(self.counts[i]) * self.error_per_term


def _segment_task(lo, hi, queries, prime_powers, base):
    primes = primes_between(lo, hi, base)
    w = np.rint(np.log(primes.astype(np.float64)) * _SCALE).astype(np.int64)
    vals = primes
    if prime_powers is not None and len(prime_powers):
        a = np.searchsorted(prime_powers[:, 0], lo, side="right")
        b = np.searchsorted(prime_powers[:, 0], hi, side="right")
        if b > a:
            pv = prime_powers[a:b]
            pw = np.rint(np.log(pv[:, 1].astype(np.float64)) * _SCALE).astype(np.int64)
            vals = np.concatenate((vals, pv[:, 0]))
            w = np.concatenate((w, pw))
            order = np.argsort(vals, kind="stable")
            vals, w = vals[order], w[order]
    cum = np.cumsum(w)
    idx = np.searchsorted(vals, queries, side="right")
    local = np.where(idx > 0, cum[np.maximum(idx - 1, 0)] if len(cum) else 0, 0)
    total = int(cum[-1]) if len(cum) else 0
    return total, len(vals), [int(v) for v in local], idx


def weighted_prefix(points, *, prime_powers: bool = True, width: int = SEGMENT_WIDTH,
                    threads: int = 1) -> PrefixSums:
    """ψ(q) (or θ(q) with ``prime_powers=False``) at every query point.

    One sieve sweep over (0, max(points)]; points <= 0 give 0.
    """
    pts = np.asarray(points, dtype=np.int64).ravel()
    fixed = [0] * len(pts)
    counts = np.zeros(len(pts), dtype=np.int64)
    if len(pts) == 0 or pts.max() < 2:
        return PrefixSums(pts, fixed, counts)
    top = int(pts.max())
    if top > MAX_SIEVE:
        raise ValueError(f"sweep beyond 2^62 requested ({top})")
    base = base_primes_for(top)
    pp = prime_powers_upto(top) if prime_powers else None
    order = np.argsort(pts, kind="stable")
    sorted_pts = pts[order]
    bounds = list(range(0, top, width))
    jobs = []
    for lo in bounds:
        hi = min(lo + width, top)
        a = np.searchsorted(sorted_pts, lo, side="right")
        b = np.searchsorted(sorted_pts, hi, side="right")
        jobs.append((lo, hi, a, b))

    def run(job):
        lo, hi, a, b = job
        return _segment_task(lo, hi, sorted_pts[a:b], pp, base)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run, jobs))
    else:
        results = [run(j) for j in jobs]

    running, running_n = 0, 0
    for (lo, hi, a, b), (total, n, local, idx) in zip(jobs, results):
        for k in range(b - a):
            fixed[order[a + k]] = running + local[k]
            counts[order[a + k]] = running_n + int(idx[k])
        running += total
        running_n += n
    # points beyond the last segment cannot occur; points <= 0 stay 0
    return PrefixSums(pts, fixed, counts)


def _sweep_log_sum(x: int, prime_powers: bool, width: int) -> tuple[float, float]:
    base = base_primes_for(x)
    acc = CompensatedSum()
    bound = 0.0
    for lo in range(0, x, width):
        value, err = log_sum(primes_between(lo, min(lo + width, x), base))
        acc.add(value)
        bound += err
    if prime_powers:
        pp = prime_powers_upto(x)
        if len(pp):
            logs = np.log(pp[:, 1].astype(np.float64))
            acc.add(math.fsum(logs))
            bound += len(logs) * 2.0 ** -52 * float(logs.max())
    return acc.value, bound + acc.error_bound


def chebyshev_psi(x: int, table: LambdaTable | None = None, *,
                  width: int = SEGMENT_WIDTH, return_error: bool = False):
    """ψ(x) = Σ_{m <= x} Λ(m), from the table when given, else by sweeping."""
    if x < 2:
        raise ValueError(f"psi needs x >= 2, got {x}")
    if table is not None:
        value = table.psi(x)
        bound = 4 * math.ulp(value)
    else:
        value, bound = _sweep_log_sum(x, True, width)
    return (value, bound) if return_error else value


def chebyshev_theta(x: int, table: LambdaTable | None = None, *,
                    width: int = SEGMENT_WIDTH, return_error: bool = False):
    """θ(x) = Σ_{p <= x} log p."""
    if x < 2:
        raise ValueError(f"theta needs x >= 2, got {x}")
    if table is not None:
        value = table.theta(x)
        bound = 4 * math.ulp(value)
    else:
        value, bound = _sweep_log_sum(x, False, width)
    return (value, bound) if return_error else value
