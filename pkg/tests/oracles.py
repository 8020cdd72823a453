"""Brute-force reference implementations.

Deliberately naive: plain trial division and exhaustive loops, sharing no
code with the package beyond the standard library.
"""
import math
from functools import lru_cache


@lru_cache(maxsize=None)
def factor(n):
    out = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return tuple(sorted(out.items()))


def is_prime(n):
    return n >= 2 and factor(n) == ((n, 1),)


def mobius(n):
    f = factor(n)
    if any(e > 1 for _, e in f):
        return 0
    return (-1) ** len(f)


def lam(m):
    f = factor(m) if m >= 2 else ()
    return math.log(f[0][0]) if len(f) == 1 else 0.0


def is_squarefull(n):
    return all(e >= 2 for _, e in factor(n))


def squarefull_upto(n):
    return [f for f in range(1, n + 1) if is_squarefull(f)]


def ab_decompositions(f):
    """All (a, b) with a²b³ = f and b square-free, by exhaustive search."""
    out = []
    b = 1
    while b ** 3 <= f:
        if mobius(b) != 0 and f % b ** 3 == 0:
            a = math.isqrt(f // b ** 3)
            if a * a * b ** 3 == f:
                out.append((a, b))
        b += 1
    return out


def prime_power_table(limit):
    """Λ(m) for 0 <= m <= limit as a list, by factoring every m."""
    return [0.0] + [lam(m) for m in range(1, limit + 1)]


def repr_pairs(limit, fs):
    """R(N) for N <= limit: double loop over the supports of Λ and of ``fs``.

    Returns per-N lists of terms so callers can fsum them.
    """
    lam_tab = prime_power_table(limit)
    support = [m for m in range(1, limit + 1) if lam_tab[m]]
    terms = [[] for _ in range(limit + 1)]
    for f in fs:
        for m in support:
            if m + f > limit:
                break
            terms[m + f].append(lam_tab[m])
    return terms


def primes_in(lo, hi):
    return [n for n in range(lo + 1, hi + 1) if is_prime(n)]
