"""Exact small-number arithmetic.

Möbius and von Mangoldt values, square-free tests, exact integer roots, a
deterministic 64-bit primality test, compensated accumulation, and the zeta
constants that feed every asymptotic prediction in the package.
"""
from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from functools import lru_cache

import mpmath

MAX_INT64 = 1 << 63

# Bases proven sufficient for n < 3.3e24 (Sorenson & Webster), so all 64-bit n.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def _check_positive(n: int, name: str = "n") -> None:
    if n < 1:
        raise ValueError(f"{name} must be >= 1, got {n}")
    if n > MAX_INT64:
        raise OverflowError(f"{name}={n} exceeds 2^63")


def factorize(n: int) -> dict[int, int]:
    """Prime factorization by trial division, ``{p: exponent}``.

    Only meant for small inputs (truncation levels, the ``b`` of a²b³).
    """
    _check_positive(n)
    out: dict[int, int] = {}
    while n % 2 == 0:
        out[2] = out.get(2, 0) + 1
        n //= 2
    p = 3
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def mobius(n: int) -> int:
    _check_positive(n)
    exps = factorize(n)
    if any(e > 1 for e in exps.values()):
        return 0
    return -1 if len(exps) % 2 else 1


def is_squarefree(n: int) -> bool:
    _check_positive(n)
    if n % 4 == 0:
        return False
    d = 3
    while d * d <= n:
        if n % d == 0:
            n //= d
            if n % d == 0:
                return False
        d += 2
    return True


def integer_root(n: int, k: int) -> int:
    """Exact ``floor(n ** (1/k))`` using integer Newton iteration.

    The result ``r`` always satisfies ``r**k <= n < (r+1)**k``.
    """
    if n < 0:
        raise ValueError(f"integer_root needs n >= 0, got {n}")
    if k < 2:
        raise ValueError(f"root degree must be >= 2, got {k}")
    if k == 2:
        return math.isqrt(n)
    if n < 2:
        return n
    x = 1 << -(-n.bit_length() // k)  # strictly above the root
    while True:
        y = ((k - 1) * x + n // x ** (k - 1)) // k
        if y >= x:
            return x
        x = y


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, exact for every n < 3.3e24."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@dataclass(frozen=True)
class PrimePower:
    value: int
    base: int
    exponent: int
    log_base: float

    def __post_init__(self):
        if self.exponent < 1 or self.base ** self.exponent != self.value:
            raise ValueError(f"{self.value} != {self.base}^{self.exponent}")


def prime_power(m: int) -> PrimePower | None:
    """Return the ``p^k`` witness for ``m``, or None if m is not a prime power."""
    _check_positive(m, "m")
    if m < 2:
        return None
    for k in range(m.bit_length() - 1, 0, -1):
        r = integer_root(m, k) if k > 1 else m
        if r ** k == m and is_prime(r):
            return PrimePower(m, r, k, math.log(r))
    return None


def von_mangoldt(m: int, classify: bool = False):
    """Λ(m): ``log p`` when ``m = p^k``, else 0.

    With ``classify=True`` returns ``(value, PrimePower | None)``.
    """
    pp = prime_power(m)
    value = pp.log_base if pp is not None else 0.0
    return (value, pp) if classify else value


class CompensatedSum:
    """Running Neumaier sum; ``error_bound`` is an a-posteriori bound on the
    rounding error of ``value`` (inputs assumed exact)."""

    __slots__ = ("_s", "_c", "_n", "_abs")

    def __init__(self, start: float = 0.0):
        self._s = float(start)
        self._c = 0.0
        self._n = 1 if start else 0
        self._abs = abs(float(start))

    def add(self, x: float) -> None:
        x = float(x)
        t = self._s + x
        if abs(self._s) >= abs(x):
            self._c += (self._s - t) + x
        else:
            self._c += (x - t) + self._s
        self._s = t
        self._n += 1
        self._abs += abs(x)

    def __iadd__(self, x: float) -> CompensatedSum:
        self.add(x)
        return self

    @property
    def value(self) -> float:
        return self._s + self._c

    @property
    def error_bound(self) -> float:
        eps = 2.0 ** -53
        # Neumaier bound: |err| <= eps|S| + O(n eps^2) sum|x_i|
        return eps * abs(self.value) + 2 * self._n * eps * eps * self._abs


# --------------------------------------------------------------------- zeta


@dataclass(frozen=True)
class ZetaConstants:
    zeta_3_2: float
    zeta_3: float
    zeta_2_3: float
    zeta_2: float
    leading_ratio: float
    precision_bits: int
    # full-precision decimal strings, kept for auditing
    digits: dict = field(default_factory=dict, compare=False, repr=False)

    def fingerprint(self) -> str:
        blob = "|".join(
            f"{v:.17g}"
            for v in (self.zeta_3_2, self.zeta_3, self.zeta_2_3, self.zeta_2, self.leading_ratio)
        )
        return hashlib.sha256(blob.encode()).hexdigest()[:12]

    def as_dict(self) -> dict:
        return {
            "zeta_3_2": self.zeta_3_2,
            "zeta_3": self.zeta_3,
            "zeta_2_3": self.zeta_2_3,
            "zeta_2": self.zeta_2,
            "leading_ratio": self.leading_ratio,
            "precision_bits": self.precision_bits,
            "fingerprint": self.fingerprint(),
        }


def _rising(s, j: int):
    out = mpmath.mpf(1)
    for i in range(j):
        out *= s + i
    return out


def zeta_euler_maclaurin(s, precision_bits: int, n_terms: int = 32):
    """ζ(s) for real ``s != 1`` by Euler-Maclaurin summation.

    ζ(s) = Σ_{n<N} n^-s + N^(1-s)/(s-1) + N^-s/2
           + Σ_{k=1}^{K} B_2k/(2k)! · s(s+1)…(s+2k-2) · N^(-s-2k+1) + R_K.

    For real s with s + 2K + 1 > 0 the remainder satisfies
    ``|R_K| <= |T_{K+1}|`` (the first omitted correction term), so K is grown
    until that term drops below ``2^-(precision_bits+8) |ζ(s)|``.

    Returns ``(value, tail_bound)`` as mpf numbers at the working precision.
    """
    with mpmath.workprec(precision_bits + 24):
        s = mpmath.mpf(s)
        if s == 1:
            raise ValueError("ζ has a pole at s = 1")
        N = mpmath.mpf(n_terms)
        total = mpmath.fsum(mpmath.mpf(n) ** -s for n in range(1, n_terms))
        total += N ** (1 - s) / (s - 1) + N ** -s / 2
        target = mpmath.mpf(2) ** -(precision_bits + 8)
        k = 1
        while True:
            term = (
                mpmath.bernoulli(2 * k) / mpmath.factorial(2 * k)
                * _rising(s, 2 * k - 1) * N ** (-s - 2 * k + 1)
            )
            nxt = (
                mpmath.bernoulli(2 * k + 2) / mpmath.factorial(2 * k + 2)
                * _rising(s, 2 * k + 1) * N ** (-s - 2 * k - 1)
            )
            total += term
            if s + 2 * k + 1 > 0 and abs(nxt) < target * abs(total):
                return +total, abs(nxt)
            k += 1
            if k > 4 * n_terms:
                raise ArithmeticError(f"Euler-Maclaurin did not converge for s={s}")


@lru_cache(maxsize=8)
def compute_zeta_constants(precision_bits: int = 128) -> ZetaConstants:
    if precision_bits < 53:
        raise ValueError(f"precision_bits must be >= 53, got {precision_bits}")
    vals = {}
    with mpmath.workprec(precision_bits + 24):
        for name, s in (
            ("zeta_3_2", mpmath.mpf(3) / 2),
            ("zeta_3", mpmath.mpf(3)),
            ("zeta_2_3", mpmath.mpf(2) / 3),
            ("zeta_2", mpmath.mpf(2)),
        ):
            vals[name], _ = zeta_euler_maclaurin(s, precision_bits)
        vals["leading_ratio"] = vals["zeta_3_2"] / vals["zeta_3"]
        ndig = int(precision_bits * math.log10(2)) + 1
        digits = {k: mpmath.nstr(v, ndig) for k, v in vals.items()}
    return ZetaConstants(
        zeta_3_2=float(vals["zeta_3_2"]),
        zeta_3=float(vals["zeta_3"]),
        zeta_2_3=float(vals["zeta_2_3"]),
        zeta_2=float(vals["zeta_2"]),
        leading_ratio=float(vals["leading_ratio"]),
        precision_bits=precision_bits,
        digits=digits,
    )
