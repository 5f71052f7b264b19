"""Interarrival kernel families, mixing laws, and parameter maps.

A kernel family fixes, for each admissible rate-like parameter lam > 0, an
interarrival distribution on (0, infinity).  Four families are built in:

* ``exp``            cdf 1 - exp(-lam*t), the memoryless reference family;
* ``pareto``         cdf 1 - 1/(1 + lam*t), unit-shape heavy tail;
* ``gengamma``       cdf 1 - (1 + sqrt(t/lam)) * exp(-sqrt(t/lam));
* ``deterministic``  unit point mass at t = 1, which has no density and is
  the standing counterexample: the renewal process it generates is Markov
  but is not any Poisson mixture.

All sampling goes through the quantile function (inverse transform), so a
fixed uniform input pins the output exactly; the ``gengamma`` quantile
inverts (1+u)*exp(-u) = 1 - v by bisection on the bracket [0, 50] to 1e-12.

Mixing laws (gamma, uniform, dirac) describe the random parameter; parameter
maps (affine, reciprocal, identity) convert the mixed draw into the kernel
parameter.  A map carries an explicit excluded set: evaluating it there is a
hard error rather than a silent zero, because downstream identities would
quietly integrate garbage otherwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy import special

from .errors import (
    NoDensityError,
    NullSetError,
    ParameterError,
    RegularityViolationError,
    RejectedInputError,
)

__all__ = [
    "Family",
    "InterarrivalKernel",
    "ExponentialKernel",
    "ParetoUnitShapeKernel",
    "GenGammaHalfKernel",
    "DeterministicUnitKernel",
    "EXPONENTIAL",
    "PARETO_UNIT_SHAPE",
    "GEN_GAMMA_HALF",
    "DETERMINISTIC_UNIT",
    "kernel_for",
    "hazard_at_zero_numeric",
    "MixingLaw",
    "GammaMixing",
    "UniformMixing",
    "DiracMixing",
    "MappedMixing",
    "ParameterMap",
    "AffineMap",
    "ReciprocalMap",
    "IdentityMap",
]


class Family(str, Enum):
    EXPONENTIAL = "exp"
    PARETO_UNIT_SHAPE = "pareto"
    GEN_GAMMA_HALF = "gengamma"
    DETERMINISTIC_UNIT = "deterministic"


def _check_lam(lam: float) -> float:
    lam = float(lam)
    if not math.isfinite(lam) or lam <= 0.0:
        raise ParameterError(f"kernel parameter must be a positive real, got {lam!r}")
    return lam


def _clamp_uniform(v):
    # Inverse transform needs v in (0, 1): v == 0 would emit a zero gap.
    return np.maximum(v, 2.0 ** -53)


class InterarrivalKernel:
    """Common surface of a kernel family; subclasses fill in the formulas.

    ``cdf``/``pdf``/``survival``/``quantile`` accept scalar or array ``t``
    (resp. ``v``) and broadcast against an array ``lam`` where that makes
    sense; the simulator relies on this for flat vectorised sampling.
    """

    family: Family
    has_density: bool = True

    def cdf(self, lam, t):
        raise NotImplementedError

    def pdf(self, lam, t):
        raise NotImplementedError

    def survival(self, lam, t):
        return 1.0 - self.cdf(lam, t)

    def quantile(self, lam, v):
        raise NotImplementedError

    def sample(self, lam, rng: np.random.Generator, size=None):
        v = _clamp_uniform(rng.random(size))
        return self.quantile(lam, v)

    def hazard_at_zero(self, lam) -> float:
        """p = lim_{t->0+} F'(t), the candidate Poisson rate."""
        raise NotImplementedError

    def density_sup(self, lam) -> float:
        """An analytic upper bound C with pdf <= C everywhere."""
        raise NotImplementedError

    def count_budget(self, lam, horizon) -> np.ndarray:
        """Heuristic number of gaps that almost surely covers the horizon.

        Only a vectorisation hint for the simulator; paths that exhaust the
        budget are finished by a per-path fallback, so correctness does not
        depend on this bound.
        """
        raise NotImplementedError

    def hazard_description(self, lam_expr: str) -> str:
        raise NotImplementedError


class ExponentialKernel(InterarrivalKernel):
    family = Family.EXPONENTIAL

    def cdf(self, lam, t):
        lam = np.asarray(lam, dtype=float)
        return -np.expm1(-lam * np.asarray(t, dtype=float))

    def pdf(self, lam, t):
        lam = np.asarray(lam, dtype=float)
        return lam * np.exp(-lam * np.asarray(t, dtype=float))

    def survival(self, lam, t):
        return np.exp(-np.asarray(lam, dtype=float) * np.asarray(t, dtype=float))

    def quantile(self, lam, v):
        return -np.log1p(-np.asarray(v, dtype=float)) / np.asarray(lam, dtype=float)

    def hazard_at_zero(self, lam) -> float:
        return _check_lam(lam)

    def density_sup(self, lam) -> float:
        return _check_lam(lam)

    def count_budget(self, lam, horizon):
        lam = np.asarray(lam, dtype=float)
        mean = lam * horizon
        return np.ceil(mean + 12.0 * np.sqrt(mean + 12.0) + 16.0).astype(np.int64)

    def hazard_description(self, lam_expr: str) -> str:
        return lam_expr


class ParetoUnitShapeKernel(InterarrivalKernel):
    family = Family.PARETO_UNIT_SHAPE

    def cdf(self, lam, t):
        lt = np.asarray(lam, dtype=float) * np.asarray(t, dtype=float)
        return lt / (1.0 + lt)

    def pdf(self, lam, t):
        lam = np.asarray(lam, dtype=float)
        return lam / (1.0 + lam * np.asarray(t, dtype=float)) ** 2

    def survival(self, lam, t):
        return 1.0 / (1.0 + np.asarray(lam, dtype=float) * np.asarray(t, dtype=float))

    def quantile(self, lam, v):
        v = np.asarray(v, dtype=float)
        return v / ((1.0 - v) * np.asarray(lam, dtype=float))

    def hazard_at_zero(self, lam) -> float:
        return _check_lam(lam)

    def density_sup(self, lam) -> float:
        return _check_lam(lam)

    def count_budget(self, lam, horizon):
        # Heavy tail: mean count is below lam*horizon, but the count tail is
        # wide, so leave generous room before the fallback kicks in.
        lt = np.asarray(lam, dtype=float) * horizon
        return np.ceil(3.0 * lt + 12.0 * np.sqrt(lt + 9.0) + 16.0).astype(np.int64)

    def hazard_description(self, lam_expr: str) -> str:
        return lam_expr


def _aux_survival_inverse(c):
    """Solve (1 + u) * exp(-u) = c for u >= 0, elementwise.

    Bisection on [0, 50]: the left side is strictly decreasing from 1 to
    below 1e-20, so any c representable as 1 - v with v in [0, 1) brackets.
    46 halvings bring the interval below 1e-12, then two Newton steps polish.
    """
    c = np.asarray(c, dtype=float)
    lo = np.zeros_like(c)
    hi = np.full_like(c, 50.0)
    for _ in range(46):
        mid = 0.5 * (lo + hi)
        above = (1.0 + mid) * np.exp(-mid) > c
        lo = np.where(above, mid, lo)
        hi = np.where(above, hi, mid)
    u = 0.5 * (lo + hi)
    for _ in range(2):
        f = (1.0 + u) * np.exp(-u) - c
        df = -u * np.exp(-u)
        step = np.where(np.abs(df) > 1e-300, f / df, 0.0)
        u = np.clip(u - step, 0.0, 50.0)
    return u


class GenGammaHalfKernel(InterarrivalKernel):
    family = Family.GEN_GAMMA_HALF

    def cdf(self, lam, t):
        u = np.sqrt(np.asarray(t, dtype=float) / np.asarray(lam, dtype=float))
        return 1.0 - (1.0 + u) * np.exp(-u)

    def pdf(self, lam, t):
        lam = np.asarray(lam, dtype=float)
        u = np.sqrt(np.asarray(t, dtype=float) / lam)
        return np.exp(-u) / (2.0 * lam)

    def survival(self, lam, t):
        u = np.sqrt(np.asarray(t, dtype=float) / np.asarray(lam, dtype=float))
        return (1.0 + u) * np.exp(-u)

    def quantile(self, lam, v):
        u = _aux_survival_inverse(1.0 - np.asarray(v, dtype=float))
        return np.asarray(lam, dtype=float) * u * u

    def hazard_at_zero(self, lam) -> float:
        return 1.0 / (2.0 * _check_lam(lam))

    def density_sup(self, lam) -> float:
        return 1.0 / (2.0 * _check_lam(lam))

    def count_budget(self, lam, horizon):
        # Gap is lam * U^2 with U gamma(2, 1), so the mean gap is 6 * lam.
        # The quantile here costs a bisection per draw, so budget tightly
        # and let the simulator's fallback finish the rare long path.
        mean = horizon / (6.0 * np.asarray(lam, dtype=float))
        return np.ceil(mean + 2.5 * np.sqrt(mean + 4.0) + 6.0).astype(np.int64)

    def hazard_description(self, lam_expr: str) -> str:
        return f"1/(2*({lam_expr}))"


class DeterministicUnitKernel(InterarrivalKernel):
    """Point mass at 1: the jump cdf that breaks every density condition."""

    family = Family.DETERMINISTIC_UNIT
    has_density = False

    def cdf(self, lam, t):
        t = np.asarray(t, dtype=float)
        return np.where(t >= 1.0, 1.0, 0.0) + np.zeros_like(np.asarray(lam, dtype=float))

    def pdf(self, lam, t):
        raise NoDensityError("unit point mass has no density")

    def quantile(self, lam, v):
        return np.ones_like(np.asarray(v, dtype=float) * np.asarray(lam, dtype=float))

    def hazard_at_zero(self, lam) -> float:
        raise RegularityViolationError(
            "unit point mass has no hazard at zero: cdf is flat at 0+ and jumps at 1"
        )

    def density_sup(self, lam) -> float:
        raise NoDensityError("unit point mass has no density to dominate")

    def count_budget(self, lam, horizon):
        n = int(math.floor(horizon)) + 2
        return np.full(np.shape(np.asarray(lam, dtype=float)), n, dtype=np.int64)

    def hazard_description(self, lam_expr: str) -> str:
        raise RegularityViolationError("unit point mass has no hazard at zero")


EXPONENTIAL = ExponentialKernel()
PARETO_UNIT_SHAPE = ParetoUnitShapeKernel()
GEN_GAMMA_HALF = GenGammaHalfKernel()
DETERMINISTIC_UNIT = DeterministicUnitKernel()

_KERNELS = {
    Family.EXPONENTIAL: EXPONENTIAL,
    Family.PARETO_UNIT_SHAPE: PARETO_UNIT_SHAPE,
    Family.GEN_GAMMA_HALF: GEN_GAMMA_HALF,
    Family.DETERMINISTIC_UNIT: DETERMINISTIC_UNIT,
}


def kernel_for(family) -> InterarrivalKernel:
    return _KERNELS[Family(family)]


def hazard_at_zero_numeric(kernel: InterarrivalKernel, lam: float, step: float = 1e-7) -> float:
    """Forward-difference estimate of F'(0+) with one Richardson refinement.

    d(h) = F(h)/h approximates the hazard with an O(h)-or-worse error term;
    2*d(h/2) - d(h) cancels the leading term for smooth cdfs and still
    shrinks it for the square-root-type behaviour of ``gengamma``.
    """
    lam = _check_lam(lam)
    d1 = float(kernel.cdf(lam, step)) / step
    d2 = float(kernel.cdf(lam, step / 2.0)) / (step / 2.0)
    return 2.0 * d2 - d1


# ======================================================================
# Mixing laws
# ======================================================================

class MixingLaw:
    """Distribution of the latent parameter; scalar-valued in all built-ins."""

    has_density: bool = False

    def sample(self, rng: np.random.Generator, size=None):
        raise NotImplementedError

    def quantile(self, q):
        raise NotImplementedError

    def support(self) -> tuple[float, float]:
        raise NotImplementedError

    def pdf(self, x):
        raise NoDensityError(f"{type(self).__name__} carries no density")

    def mean(self):
        return None

    def token(self) -> str:
        raise NotImplementedError


@dataclass(frozen=True)
class GammaMixing(MixingLaw):
    """Gamma(alpha, beta) in the rate convention: mean alpha/beta."""

    alpha: float
    beta: float
    has_density = True

    def __post_init__(self):
        if not (math.isfinite(self.alpha) and self.alpha > 0):
            raise RejectedInputError("gamma shape must be positive")
        if not (math.isfinite(self.beta) and self.beta > 0):
            raise RejectedInputError("gamma rate must be positive")

    def sample(self, rng, size=None):
        return rng.gamma(shape=self.alpha, scale=1.0 / self.beta, size=size)

    def quantile(self, q):
        return special.gammaincinv(self.alpha, np.asarray(q, dtype=float)) / self.beta

    def support(self):
        return (0.0, math.inf)

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            logpdf = (
                self.alpha * math.log(self.beta)
                + (self.alpha - 1.0) * np.log(x)
                - self.beta * x
                - special.gammaln(self.alpha)
            )
        return np.where(x > 0.0, np.exp(logpdf), 0.0)

    def mean(self):
        return self.alpha / self.beta

    def token(self):
        return f"gamma:{self.alpha:g},{self.beta:g}"


@dataclass(frozen=True)
class UniformMixing(MixingLaw):
    a: float
    b: float
    has_density = True

    def __post_init__(self):
        if not (math.isfinite(self.a) and math.isfinite(self.b) and self.a < self.b):
            raise RejectedInputError("uniform mixing needs finite a < b")

    def sample(self, rng, size=None):
        return rng.uniform(self.a, self.b, size=size)

    def quantile(self, q):
        return self.a + (self.b - self.a) * np.asarray(q, dtype=float)

    def support(self):
        return (self.a, self.b)

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        inside = (x >= self.a) & (x <= self.b)
        return np.where(inside, 1.0 / (self.b - self.a), 0.0)

    def mean(self):
        return 0.5 * (self.a + self.b)

    def token(self):
        return f"uniform:{self.a:g},{self.b:g}"


@dataclass(frozen=True)
class DiracMixing(MixingLaw):
    """Point mass: the unmixed (single-parameter) degenerate case."""

    theta0: float

    def __post_init__(self):
        if not math.isfinite(self.theta0):
            raise RejectedInputError("dirac location must be finite")

    def sample(self, rng, size=None):
        if size is None:
            return self.theta0
        return np.full(size, self.theta0, dtype=float)

    def quantile(self, q):
        return np.full_like(np.asarray(q, dtype=float), self.theta0)

    def support(self):
        return (self.theta0, self.theta0)

    def mean(self):
        return self.theta0

    def token(self):
        return f"dirac:{self.theta0:g}"


@dataclass(frozen=True)
class MappedMixing(MixingLaw):
    """Push-forward of a base law under a parameter map.

    Represented operationally (draw from the base, apply the map); no density
    is claimed.  Quantiles use the map's monotonicity, which every built-in
    map has on the positive axis.
    """

    base: MixingLaw
    pmap: "ParameterMap"

    def sample(self, rng, size=None):
        return self.pmap.apply(self.base.sample(rng, size=size))

    def quantile(self, q):
        q = np.asarray(q, dtype=float)
        inner = q if self.pmap.is_increasing else 1.0 - q
        return self.pmap.apply(self.base.quantile(inner))

    def support(self):
        lo, hi = self.base.support()
        a = self.pmap.apply_endpoint(lo)
        b = self.pmap.apply_endpoint(hi)
        return (min(a, b), max(a, b))

    def token(self):
        return f"mapped({self.base.token()};{self.pmap.token()})"


# ======================================================================
# Parameter maps
# ======================================================================

def _in_excluded(x, excluded) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    hit = np.zeros(x.shape, dtype=bool)
    for lo, hi in excluded:
        hit |= (x >= lo) & (x <= hi)
    return hit


class ParameterMap:
    """Strictly monotone map from the mixing draw to the kernel parameter.

    ``excluded`` lists closed intervals (points as [x, x]) where the map is
    not defined; hitting them raises, never returns a default.
    """

    excluded: tuple[tuple[float, float], ...] = ()
    is_increasing: bool = True

    def _check_domain(self, theta):
        arr = np.asarray(theta, dtype=float)
        if not np.all(np.isfinite(arr)):
            raise NullSetError("map evaluated at a non-finite point")
        if np.any(arr <= 0.0):
            raise NullSetError("map domain is the positive axis")
        if self.excluded and bool(np.any(_in_excluded(arr, self.excluded))):
            raise NullSetError("map evaluated inside its excluded set")
        return arr

    def apply(self, theta):
        raise NotImplementedError

    def invert(self, lam):
        raise NotImplementedError

    def apply_endpoint(self, theta: float) -> float:
        """Extend to closure endpoints (0 or inf) for support bookkeeping."""
        raise NotImplementedError

    def describe(self, theta_symbol: str = "theta") -> str:
        raise NotImplementedError

    def token(self) -> str:
        raise NotImplementedError


@dataclass(frozen=True)
class AffineMap(ParameterMap):
    """theta -> a*theta + b with a > 0, b >= 0; keeps (0, inf) inside itself."""

    a: float
    b: float
    excluded: tuple[tuple[float, float], ...] = ()
    is_increasing = True

    def __post_init__(self):
        if not (math.isfinite(self.a) and self.a > 0.0):
            raise ParameterError("affine slope must be positive")
        if not (math.isfinite(self.b) and self.b >= 0.0):
            raise ParameterError("affine offset must be nonnegative")

    def apply(self, theta):
        arr = self._check_domain(theta)
        out = self.a * arr + self.b
        return float(out) if np.isscalar(theta) or out.ndim == 0 else out

    def invert(self, lam):
        arr = np.asarray(lam, dtype=float)
        pre = (arr - self.b) / self.a
        if np.any(pre <= 0.0) or not np.all(np.isfinite(pre)):
            raise NullSetError("value lies outside the affine image of (0, inf)")
        if self.excluded and bool(np.any(_in_excluded(pre, self.excluded))):
            raise NullSetError("preimage falls in the excluded set")
        return float(pre) if np.isscalar(lam) or pre.ndim == 0 else pre

    def apply_endpoint(self, theta):
        if math.isinf(theta):
            return math.inf
        return self.a * theta + self.b

    def describe(self, theta_symbol="theta"):
        if self.a == 1.0 and self.b == 0.0:
            return theta_symbol
        if self.b == 0.0:
            return f"{self.a:g}*{theta_symbol}"
        return f"{self.a:g}*{theta_symbol}+{self.b:g}"

    def token(self):
        return f"affine:{self.a:g},{self.b:g}"


@dataclass(frozen=True)
class ReciprocalMap(ParameterMap):
    """theta -> 1/theta on (0, inf); strictly decreasing."""

    excluded: tuple[tuple[float, float], ...] = ()
    is_increasing = False

    def apply(self, theta):
        arr = self._check_domain(theta)
        with np.errstate(over="ignore"):  # subnormal theta overflows; caller rejects inf
            out = 1.0 / arr
        return float(out) if np.isscalar(theta) or out.ndim == 0 else out

    def invert(self, lam):
        arr = np.asarray(lam, dtype=float)
        if np.any(arr <= 0.0) or not np.all(np.isfinite(arr)):
            raise NullSetError("value lies outside the reciprocal image of (0, inf)")
        pre = 1.0 / arr
        if self.excluded and bool(np.any(_in_excluded(pre, self.excluded))):
            raise NullSetError("preimage falls in the excluded set")
        return float(pre) if np.isscalar(lam) or pre.ndim == 0 else pre

    def apply_endpoint(self, theta):
        if theta == 0.0:
            return math.inf
        if math.isinf(theta):
            return 0.0
        return 1.0 / theta

    def describe(self, theta_symbol="theta"):
        return f"1/{theta_symbol}"

    def token(self):
        return "reciprocal"


@dataclass(frozen=True)
class IdentityMap(ParameterMap):
    excluded: tuple[tuple[float, float], ...] = ()
    is_increasing = True

    def apply(self, theta):
        arr = self._check_domain(theta)
        return float(arr) if np.isscalar(theta) or arr.ndim == 0 else arr

    def invert(self, lam):
        arr = np.asarray(lam, dtype=float)
        if np.any(arr <= 0.0) or not np.all(np.isfinite(arr)):
            raise NullSetError("value lies outside (0, inf)")
        if self.excluded and bool(np.any(_in_excluded(arr, self.excluded))):
            raise NullSetError("preimage falls in the excluded set")
        return float(arr) if np.isscalar(lam) or arr.ndim == 0 else arr

    def apply_endpoint(self, theta):
        return theta

    def describe(self, theta_symbol="theta"):
        return theta_symbol

    def token(self):
        return "identity"
