"""Closed-form predictions and the measured residuals around them.

Covers the leading term ζ(3/2)/ζ(3)·H·sqrt(X), the two-term count of
square-full numbers, the window count prediction, the split of the
restricted interval sum into a fluctuation part and a counting part, the
step-function smoothing residual, and seeded sampling of the short-interval
prime second moment.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .arith import ZetaConstants, compute_zeta_constants
from .representation import IntervalSpec
from .sieve import (
    SEGMENT_WIDTH,
    LambdaTable,
    base_primes_for,
    log_sum,
    primes_between,
    theta_between,
    weighted_prefix,
)
from .squarefull import TruncationLevel, count_squarefull, is_squarefull, squarefull_arrays

SECOND_TERM_VARIANTS = ("zeta3_denominator", "zeta2_denominator")
CALIBRATION_GRID = tuple(10 ** k for k in range(4, 11))


@dataclass(frozen=True)
class AsymptoticFit:
    x_or_X: int
    predicted: float
    actual: float
    abs_error: float
    rel_error: float
    error_normalizer: float

    @classmethod
    def of(cls, x: int, predicted: float, actual: float, normalizer: float) -> AsymptoticFit:
        err = abs(predicted - actual)
        rel = err / abs(actual) if actual else math.inf
        return cls(x, predicted, actual, err, rel, normalizer)

    @property
    def normalized_error(self) -> float:
        return self.abs_error / self.error_normalizer


@dataclass(frozen=True)
class MeanValueSample:
    X: int
    H: int
    sample_count: int
    normalized_second_moment: float
    seed: int = 0


@dataclass(frozen=True)
class SmoothingResidual:
    lhs: float
    rhs: float
    residual: float
    envelope: float  # m log X


def main_term(spec: IntervalSpec, constants: ZetaConstants | None = None) -> float:
    """ζ(3/2)/ζ(3) · H · sqrt(X)."""
    if spec.X <= 0:
        raise ValueError("X must be positive")
    constants = constants or compute_zeta_constants()
    return constants.leading_ratio * spec.H * math.sqrt(spec.X)


def _second_coefficient(constants: ZetaConstants, variant: str) -> float:
    if variant == "zeta3_denominator":
        return constants.zeta_2_3 / constants.zeta_3
    if variant == "zeta2_denominator":
        return constants.zeta_2_3 / constants.zeta_2
    raise ValueError(f"unknown second-term variant {variant!r}")


@lru_cache(maxsize=4)
def calibrate_second_term(constants: ZetaConstants | None = None,
                          grid: tuple = CALIBRATION_GRID) -> str:
    """Pick the x^(1/3) coefficient that best matches exact Q(x) on ``grid``.

    Scored by Σ |Q(x) - prediction| / x^(1/6).
    """
    constants = constants or compute_zeta_constants()
    exact = {x: count_squarefull(x) for x in grid}

    def score(variant):
        return sum(
            abs(exact[x] - _bg(x, constants, variant)) / x ** (1 / 6) for x in grid
        )

    return min(SECOND_TERM_VARIANTS, key=score)


def _bg(x: int, constants: ZetaConstants, variant: str) -> float:
    return constants.leading_ratio * math.sqrt(x) + _second_coefficient(constants, variant) * x ** (1 / 3)


def bateman_grosswald(x: int, constants: ZetaConstants | None = None,
                      second_term_variant: str | None = None) -> float:
    """Two-term prediction of Q(x); the variant defaults to the calibrated one."""
    if x < 1:
        raise ValueError(f"x must be >= 1, got {x}")
    constants = constants or compute_zeta_constants()
    variant = second_term_variant or calibrate_second_term(constants)
    return _bg(x, constants, variant)


def qx_fit(x_grid, constants: ZetaConstants | None = None,
           second_term_variant: str | None = None) -> list[AsymptoticFit]:
    constants = constants or compute_zeta_constants()
    return [
        AsymptoticFit.of(x, bateman_grosswald(x, constants, second_term_variant),
                         count_squarefull(x), x ** (1 / 6))
        for x in x_grid
    ]


def filaseta_trifonov_window(x: int, H: int, constants: ZetaConstants | None = None) -> float:
    """Predicted Q(x+H) - Q(x) = ζ(3/2)/(2ζ(3)) · H / sqrt(x)."""
    if x < 1 or H < 1:
        raise ValueError(f"need x >= 1 and H >= 1, got x={x}, H={H}")
    constants = constants or compute_zeta_constants()
    return constants.leading_ratio / 2 * H / math.sqrt(x)


def window_fit(x: int, H: int, constants: ZetaConstants | None = None) -> AsymptoticFit:
    predicted = filaseta_trifonov_window(x, H, constants)
    actual = count_squarefull(x + H) - count_squarefull(x)
    return AsymptoticFit.of(x, predicted, actual, predicted)


# ------------------------------------------------------- smoothing integrals


def _floor_sqrt(d: np.ndarray) -> np.ndarray:
    m = np.floor(np.sqrt(d.astype(np.float64))).astype(np.int64)
    m -= m * m > d
    m += (m + 1) * (m + 1) <= d
    return m


def _partial_weights(Y: int, primes: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """For primes p < Y: m = floor(sqrt(Y-p)) and log p · (sqrt(Y-p) - m)."""
    d = Y - primes
    m = _floor_sqrt(d)
    frac = np.sqrt(d.astype(np.float64)) - m
    return m, np.log(primes.astype(np.float64)) * frac


def _theta_diff(a: int, b: int) -> float:
    """θ(b) - θ(a) for any integers a <= b (θ vanishes below 2)."""
    a = max(a, 1)
    if b <= a:
        return 0.0
    return theta_between(a, b - a)


def step_integral(Y: int, m: int) -> float:
    """∫_m^{m+1} θ(Y - u²) du, exactly as a sum over primes.

    A prime p counts with weight clamp(sqrt(Y-p) - m, 0, 1).
    """
    lo, hi = Y - (m + 1) ** 2, Y - m * m
    full = _theta_diff(1, lo) if lo >= 2 else 0.0
    primes = primes_between(max(lo, 0), hi) if hi >= 2 else np.empty(0, dtype=np.int64)
    if len(primes) == 0:
        return full
    _, w = _partial_weights(Y, primes)
    return full + math.fsum(w)


def smoothing_residual(m: int, f: int, spec: IntervalSpec) -> SmoothingResidual:
    """Compare the f-window prime sum with its u-average over [m, m+1]."""
    X, H = spec.X, spec.H
    if not m * m <= f < (m + 1) ** 2:
        raise ValueError(f"need m² <= f < (m+1)², got m={m}, f={f}")
    if f > X - 2 * H:
        raise ValueError(f"need f <= X - 2H = {X - 2 * H}, got {f}")
    if not is_squarefull(f):
        raise ValueError(f"{f} is not square-full")
    lhs = _theta_diff(X - f, X + H - f)
    # ∫ θ(X+H-u²) - θ(X-u²) du; the full-weight parts telescope into one window
    lo_full = _theta_diff(X - (m + 1) ** 2, X + H - (m + 1) ** 2)
    parts = []
    for Y in (X + H, X):
        lo, hi = Y - (m + 1) ** 2, Y - m * m
        primes = primes_between(max(lo, 0), hi) if hi >= 2 else np.empty(0, dtype=np.int64)
        _, w = _partial_weights(Y, primes) if len(primes) else (None, np.empty(0))
        parts.append(math.fsum(w))
    rhs = lo_full + parts[0] - parts[1]
    return SmoothingResidual(lhs, rhs, lhs - rhs, m * math.log(X))


@dataclass(frozen=True)
class SigmaDecomposition:
    sigma1: float
    sigma2: float
    restricted_sum: float
    f_count: int


def _restricted_integral_sum(X: int, H: int, ms: np.ndarray, mult: np.ndarray,
                             width: int, threads: int) -> float:
    """Σ_m mult[m] · ∫_m^{m+1} [θ(X+H-u²) - θ(X-u²)] du over distinct m."""
    top = int(ms.max())
    total = 0.0
    for sign, Y in ((1.0, X + H), (-1.0, X)):
        # full-weight part: θ(Y - (m+1)²)
        pref = weighted_prefix(Y - (ms + 1) ** 2, prime_powers=False, width=width, threads=threads)
        full = np.array([pref.value(i) for i in range(len(ms))])
        # fractional part, binned by m = floor(sqrt(Y - p))
        lo = max(Y - (top + 1) ** 2, 0)
        frac = np.zeros(top + 2)
        base = base_primes_for(Y)
        for a in range(lo, Y - 1, width):
            primes = primes_between(a, min(a + width, Y - 1), base)
            if len(primes) == 0:
                continue
            m_p, w = _partial_weights(Y, primes)
            keep = m_p <= top
            frac += np.bincount(m_p[keep], weights=w[keep], minlength=top + 2)
        total += sign * math.fsum(mult * (full + frac[ms]))
    return total


def sigma_decomposition(spec: IntervalSpec, trunc: TruncationLevel,
                        table: LambdaTable | None = None, *, width: int = SEGMENT_WIDTH,
                        threads: int = 1) -> SigmaDecomposition:
    """Split the restricted sum over f <= X-2H into Σ₁ + Σ₂.

    Σ₂ = H · Q_B(X - 2H) exactly; Σ₁ is the residual of the u-smoothed sum
    Σ_f ∫_m^{m+1} θ-window du (m = floor(sqrt f)) after removing Σ₂.
    ``table`` is accepted for interface symmetry; primes come from a sweep.
    """
    X, H = spec.X, spec.H
    if X < 4 * H:
        raise ValueError(f"need X >= 4H, got X={X}, H={H}")
    cut = X - 2 * H
    sigma2 = float(H * count_squarefull(cut, trunc))
    fs = squarefull_arrays(0, cut, trunc)[0]
    ms_all = _floor_sqrt(fs)
    ms, mult = np.unique(ms_all, return_counts=True)
    restricted = _restricted_integral_sum(X, H, ms, mult.astype(np.float64), width, threads)
    return SigmaDecomposition(restricted - sigma2, sigma2, restricted, len(fs))


# ------------------------------------------------------------ mean value


def sample_points(X: int, sample_count: int, seed: int) -> np.ndarray:
    """t_i uniform on [X, 2X]; point i depends only on (seed, i)."""
    out = np.empty(sample_count, dtype=np.int64)
    for i in range(sample_count):
        rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, i])))
        out[i] = rng.integers(X, 2 * X, endpoint=True)
    return out


def mean_value_sample(X: int, H: int, sample_count: int, seed: int, *,
                      threads: int = 1) -> MeanValueSample:
    """Mean of ((θ(t+H) - θ(t) - H) / H)² over seeded t in [X, 2X]."""
    if not math.floor(X ** (1 / 6)) <= H <= X:
        raise ValueError(f"need X^(1/6) <= H <= X, got X={X}, H={H}")
    if sample_count < 10:
        raise ValueError(f"sample_count must be >= 10, got {sample_count}")
    ts = sample_points(X, sample_count, seed)
    base = base_primes_for(2 * X + H)

    def one(t):
        t = int(t)
        value, _ = log_sum(primes_between(t, t + H, base))
        return ((value - H) / H) ** 2

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            sq = list(pool.map(one, ts))
    else:
        sq = [one(t) for t in ts]
    return MeanValueSample(X, H, sample_count, math.fsum(sq) / sample_count, seed)
