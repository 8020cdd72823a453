import math
import random

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sqfullrep.arith import (
    CompensatedSum,
    compute_zeta_constants,
    factorize,
    integer_root,
    is_prime,
    is_squarefree,
    mobius,
    prime_power,
    von_mangoldt,
    zeta_euler_maclaurin,
)
from sqfullrep.sieve import primes_between

from . import oracles


@pytest.mark.parametrize("n, expected", [(1, 1), (4, 0), (30, -1)])
def test_mobius_examples(n, expected):
    assert mobius(n) == expected


def test_mobius_30_matches_factorization_oracle():
    assert oracles.factor(30) == ((2, 1), (3, 1), (5, 1))
    assert mobius(30) == oracles.mobius(30) == -1


def test_mobius_range_error():
    with pytest.raises(OverflowError):
        mobius(2 ** 64)
    with pytest.raises(ValueError):
        mobius(0)


def test_mobius_multiplicative_on_coprime_pairs():
    mu = [0] + [mobius(n) for n in range(1, 10 ** 4 + 1)]
    for m in range(1, 10 ** 4 + 1):
        for n in range(1, 10 ** 4 // m + 1):
            if math.gcd(m, n) == 1:
                assert mu[m * n] == mu[m] * mu[n], (m, n)


def test_mobius_agrees_with_oracle():
    for n in range(1, 3000):
        assert mobius(n) == oracles.mobius(n)


@pytest.mark.parametrize("m, expected", [(1, 0.0), (8, math.log(2)), (6, 0.0)])
def test_von_mangoldt_examples(m, expected):
    assert von_mangoldt(m) == pytest.approx(expected, abs=1e-15)


def test_von_mangoldt_classify():
    value, pp = von_mangoldt(8, classify=True)
    assert pp.base == 2 and pp.exponent == 3 and pp.value == 8
    assert value == pp.log_base
    assert von_mangoldt(6, classify=True) == (0.0, None)


def test_von_mangoldt_large_prime_power():
    p = 2 ** 31 - 1
    assert prime_power(p * p).exponent == 2
    assert von_mangoldt(p * p) == pytest.approx(math.log(p))
    assert von_mangoldt((2 ** 31 - 1) * (2 ** 13 - 1)) == 0.0


def test_lambda_divisor_sum_is_log():
    n_max = 10 ** 4
    lam = [0.0] + [von_mangoldt(m) for m in range(1, n_max + 1)]
    acc = [[] for _ in range(n_max + 1)]
    for d in range(1, n_max + 1):
        if lam[d]:
            for n in range(d, n_max + 1, d):
                acc[n].append(lam[d])
    for n in range(1, n_max + 1):
        assert abs(math.fsum(acc[n]) - math.log(n)) < 1e-9


@pytest.mark.parametrize("n, expected", [(1, True), (12, False), (105, True)])
def test_is_squarefree_examples(n, expected):
    assert is_squarefree(n) is expected


def test_is_squarefree_matches_oracle():
    for n in range(1, 5000):
        assert is_squarefree(n) == (oracles.mobius(n) != 0)


@pytest.mark.parametrize("n, k, expected", [(0, 2, 0), (63, 2, 7), (2 ** 60 - 1, 3, 1048575)])
def test_integer_root_examples(n, k, expected):
    r = integer_root(n, k)
    assert r == expected
    assert r ** k <= n < (r + 1) ** k


def test_integer_root_random_exactness():
    rng = random.Random(20261016)
    for _ in range(10 ** 5):
        n = rng.randrange(0, 2 ** 62 + 1)
        k = rng.choice((2, 3))
        r = integer_root(n, k)
        assert r ** k <= n < (r + 1) ** k


@given(st.integers(min_value=0, max_value=2 ** 64), st.integers(min_value=2, max_value=7))
def test_integer_root_property(n, k):
    r = integer_root(n, k)
    assert r ** k <= n < (r + 1) ** k


@given(st.integers(min_value=1, max_value=2 ** 21))
def test_integer_root_perfect_cubes(r):
    assert integer_root(r ** 3, 3) == r
    assert integer_root(r ** 3 - 1, 3) == r - 1


def test_factorize_roundtrip():
    for n in (1, 2, 360, 9973, 2 ** 20 * 3 ** 5, 999_983 * 3):
        assert math.prod(p ** e for p, e in factorize(n).items()) == n


def test_miller_rabin_against_sieve_up_to_1e7():
    N = 10 ** 7
    flags = np.zeros(N + 1, dtype=bool)
    flags[primes_between(0, N)] = True
    mismatches = [n for n in range(N + 1) if is_prime(n) != flags[n]]
    assert mismatches == []


@pytest.mark.parametrize("n, expected", [
    (2 ** 61 - 1, True),
    (2 ** 64 - 59, True),
    (3215031751, False),          # strong pseudoprime to bases 2, 3, 5, 7
    (3825123056546413051, False),  # strong pseudoprime to bases up to 23
    (10 ** 12 + 39, True),
])
def test_miller_rabin_hard_cases(n, expected):
    assert is_prime(n) is expected


def test_compensated_sum_beats_naive():
    acc = CompensatedSum()
    naive = 0.0
    for x in [1.0, 1e100, 1.0, -1e100] * 1000:
        acc.add(x)
        naive += x
    assert acc.value == 2000.0
    assert naive != 2000.0
    assert acc.error_bound >= 0


# ------------------------------------------------------------------- zeta
#
# Euler-Maclaurin contract: with N = 32 leading terms and corrections
# B_2k/(2k)! s(s+1)...(s+2k-2) N^(-s-2k+1), the remainder after K corrections
# is bounded by the first omitted term for real s with s + 2K + 1 > 0. The
# routine stops once that term is below 2^-(prec+8) |ζ(s)|, so every constant
# must sit within 2^-(prec+4) of an independent evaluation.


@pytest.fixture(scope="module")
def constants():
    return compute_zeta_constants(128)


def test_zeta2_closed_form(constants):
    with mpmath.workprec(160):
        value, tail = zeta_euler_maclaurin(2, 128)
        assert abs(value / (mpmath.pi ** 2 / 6) - 1) < mpmath.mpf(2) ** -124
        assert tail < mpmath.mpf(2) ** -128
    assert constants.zeta_2 == pytest.approx(math.pi ** 2 / 6, rel=2 ** -52)


@pytest.mark.parametrize("s", [mpmath.mpf(3) / 2, mpmath.mpf(3), mpmath.mpf(2) / 3, mpmath.mpf(2)])
def test_euler_maclaurin_against_mpmath(s):
    with mpmath.workprec(160):
        value, _ = zeta_euler_maclaurin(s, 128)
        ref = mpmath.zeta(s)
        assert abs(value / ref - 1) < mpmath.mpf(2) ** -124


@pytest.mark.parametrize("precision_bits", [53, 80, 200])
def test_euler_maclaurin_precision_scales(precision_bits):
    with mpmath.workprec(precision_bits + 40):
        value, _ = zeta_euler_maclaurin(mpmath.mpf(3) / 2, precision_bits)
        assert abs(value / mpmath.zeta(mpmath.mpf(3) / 2) - 1) < mpmath.mpf(2) ** (-precision_bits + 4)


def _direct_sum_bracket(s, N=10 ** 6):
    """Σ_{n<=N} n^-s plus integral bounds on the tail: a bracket for ζ(s)."""
    n = np.arange(1, N + 1, dtype=np.float64)
    head = math.fsum(n ** -s)
    lower = head + (N + 1) ** (1 - s) / (s - 1)
    upper = head + N ** (1 - s) / (s - 1)
    return lower, upper


@pytest.mark.parametrize("name, s, frozen", [
    ("zeta_3_2", 1.5, 2.612375348685),
    ("zeta_3", 3.0, 1.202056903159),
])
def test_constants_against_direct_summation(constants, name, s, frozen):
    lower, upper = _direct_sum_bracket(s)
    value = getattr(constants, name)
    assert lower - 1e-12 <= value <= upper + 1e-12
    assert value == pytest.approx(frozen, abs=1e-12)


def test_constant_invariants(constants):
    assert constants.leading_ratio == pytest.approx(constants.zeta_3_2 / constants.zeta_3, rel=1e-15)
    assert constants.zeta_3_2 > 0 and constants.zeta_3 > 0 and constants.zeta_2 > 0
    assert constants.zeta_2_3 < 0
    assert constants.precision_bits == 128
    assert len(constants.fingerprint()) == 12


def test_constants_precision_floor():
    with pytest.raises(ValueError):
        compute_zeta_constants(52)


def test_pole_rejected():
    with pytest.raises(ValueError):
        zeta_euler_maclaurin(1, 64)
