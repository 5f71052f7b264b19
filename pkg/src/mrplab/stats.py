"""Statistical primitives used by the Monte Carlo testers.

Everything here is small and classical: exact Kolmogorov-Smirnov distances,
chi-square upper tails through the regularized incomplete gamma, Wilson score
intervals, pooled two-proportion z statistics, and Fisher's method for
combining p-values.  The testers in :mod:`mrplab.properties` depend only on
this module for their statistical decisions, so its behaviour is pinned by
tests rather than by whatever a statistics library of the day happens to do.

Incomplete gamma and the normal quantile are delegated to ``scipy.special``
(``gammaincc``, ``ndtri``, ``erfc``); those are numerics, not statistics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import RejectedInputError

__all__ = [
    "EmpiricalSample",
    "ks_distance",
    "ks_two_sample",
    "kolmogorov_sf",
    "kolmogorov_critical",
    "chi_square_p",
    "wilson_ci",
    "two_proportion_z",
    "normal_two_sided_p",
    "fisher_combine",
]


# ======================================================================
# Samples and Kolmogorov-Smirnov machinery
# ======================================================================

@dataclass(frozen=True)
class EmpiricalSample:
    """A sorted sample with its size; the unit the KS helpers operate on."""

    values: np.ndarray
    n: int

    @staticmethod
    def from_values(values) -> "EmpiricalSample":
        arr = np.asarray(values, dtype=float)
        if arr.ndim != 1 or arr.size == 0:
            raise RejectedInputError("sample must be a non-empty 1-d array")
        if not np.all(np.isfinite(arr)):
            raise RejectedInputError("sample contains non-finite values")
        srt = np.sort(arr)
        srt.flags.writeable = False
        return EmpiricalSample(values=srt, n=int(srt.size))


def ks_distance(sample: EmpiricalSample, cdf) -> float:
    """Exact sup-distance between the empirical cdf and ``cdf``.

    Uses the two-sided order-statistic form: for sorted x_1 <= ... <= x_n the
    supremum is attained at a jump, so it equals
    max_i max(|i/n - F(x_i)|, |(i-1)/n - F(x_i)|).
    """
    x = sample.values
    n = sample.n
    f = np.asarray(cdf(x), dtype=float)
    if f.shape != x.shape:
        raise RejectedInputError("cdf must evaluate elementwise on the sample")
    if np.any(f < -1e-12) or np.any(f > 1 + 1e-12):
        raise RejectedInputError("cdf values escape [0, 1]")
    i = np.arange(1, n + 1, dtype=float)
    upper = np.abs(i / n - f)
    lower = np.abs((i - 1.0) / n - f)
    return float(np.max(np.maximum(upper, lower)))


def ks_two_sample(x, y) -> float:
    """Sup-distance between the empirical cdfs of two samples."""
    a = EmpiricalSample.from_values(x).values
    b = EmpiricalSample.from_values(y).values
    grid = np.concatenate([a, b])
    fa = np.searchsorted(a, grid, side="right") / a.size
    fb = np.searchsorted(b, grid, side="right") / b.size
    return float(np.max(np.abs(fa - fb)))


def kolmogorov_sf(x: float) -> float:
    """Survival function of the limiting KS statistic, 2*sum (-1)^(k-1) exp(-2 k^2 x^2)."""
    if x <= 0.0:
        return 1.0
    total = 0.0
    for k in range(1, 101):
        term = 2.0 * (-1.0) ** (k - 1) * math.exp(-2.0 * k * k * x * x)
        total += term
        if abs(term) < 1e-16:
            break
    return min(1.0, max(0.0, total))


def kolmogorov_critical(alpha: float) -> float:
    """Value c with kolmogorov_sf(c) = alpha; reject when sqrt(n)*D > c."""
    if not 0.0 < alpha < 1.0:
        raise RejectedInputError("alpha must lie in (0, 1)")
    lo, hi = 1e-8, 5.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if kolmogorov_sf(mid) > alpha:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


# ======================================================================
# Chi-square, proportions, and p-value combination
# ======================================================================

def chi_square_p(stat: float, dof: int) -> float:
    """Upper tail P(chi2_dof > stat) = Q(dof/2, stat/2), the regularized
    upper incomplete gamma."""
    if dof < 1:
        raise RejectedInputError("dof must be a positive integer")
    if stat < 0 or not math.isfinite(stat):
        raise RejectedInputError("statistic must be finite and nonnegative")
    return float(special.gammaincc(dof / 2.0, stat / 2.0))


def wilson_ci(successes: int, n: int, level: float) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion.

    Stays inside [0, 1] by construction, unlike the Wald interval.
    """
    if n <= 0:
        raise RejectedInputError("n must be positive")
    if not 0 <= successes <= n:
        raise RejectedInputError("successes must lie in [0, n]")
    if not 0.0 < level < 1.0:
        raise RejectedInputError("level must lie in (0, 1)")
    z = float(special.ndtri(0.5 + level / 2.0))
    phat = successes / n
    denom = 1.0 + z * z / n
    center = (phat + z * z / (2 * n)) / denom
    half = (z / denom) * math.sqrt(phat * (1 - phat) / n + z * z / (4 * n * n))
    # At boundary counts the score bound is exact algebraically; pin it so
    # roundoff cannot pull the interval off the endpoint.
    lo = 0.0 if successes == 0 else max(0.0, center - half)
    hi = 1.0 if successes == n else min(1.0, center + half)
    return (lo, hi)


def two_proportion_z(k1: float, n1: int, k2: float, n2: int) -> float:
    """Pooled z statistic for H0: p1 = p2.

    Counts may be fractional: the testers compare an observed count against a
    model-implied one on the same footing.  Returns 0 when both proportions
    are equal, including the degenerate all-success and all-failure cases.
    """
    if n1 <= 0 or n2 <= 0:
        raise RejectedInputError("sample sizes must be positive")
    if k1 < 0 or k1 > n1 or k2 < 0 or k2 > n2:
        raise RejectedInputError("counts must lie in [0, n]")
    p1 = k1 / n1
    p2 = k2 / n2
    pooled = (k1 + k2) / (n1 + n2)
    var = pooled * (1.0 - pooled) * (1.0 / n1 + 1.0 / n2)
    if var <= 0.0:
        return 0.0
    return float((p1 - p2) / math.sqrt(var))


def normal_two_sided_p(z: float) -> float:
    """Two-sided standard normal p-value, erfc(|z|/sqrt(2))."""
    return float(special.erfc(abs(z) / math.sqrt(2.0)))


def fisher_combine(p_values) -> float:
    """Combine independent p-values by Fisher's method.

    -2 * sum(log p_i) is chi-square with 2k degrees of freedom under the
    joint null.  Inputs are clipped to [1e-300, 1] before taking logs so an
    exact zero cannot poison the statistic.
    """
    ps = np.asarray(p_values, dtype=float)
    if ps.ndim != 1 or ps.size == 0:
        raise RejectedInputError("need at least one p-value")
    if np.any(ps < 0.0) or np.any(ps > 1.0):
        raise RejectedInputError("p-values must lie in [0, 1]")
    clipped = np.clip(ps, 1e-300, 1.0)
    stat = -2.0 * float(np.sum(np.log(clipped)))
    return chi_square_p(stat, 2 * ps.size)
