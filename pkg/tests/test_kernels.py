"""Interarrival kernels, mixing laws, and parameter maps.

Closed-form values are checked against hand-derived constants; samplers are
checked against their own cdfs with the one-sample KS bound 1.95/sqrt(n).
"""

import math

import numpy as np
import pytest

from mrplab.errors import (
    NoDensityError,
    NullSetError,
    ParameterError,
    RegularityViolationError,
    RejectedInputError,
)
from mrplab.kernels import (
    AffineMap,
    DETERMINISTIC_UNIT,
    DiracMixing,
    EXPONENTIAL,
    Family,
    GEN_GAMMA_HALF,
    GammaMixing,
    IdentityMap,
    MappedMixing,
    PARETO_UNIT_SHAPE,
    ReciprocalMap,
    UniformMixing,
    hazard_at_zero_numeric,
    kernel_for,
)
from mrplab.stats import EmpiricalSample, ks_distance

KS_BOUND = 1.95  # one-sample critical value used throughout at the 0.1% level
N_SAMPLE = 100_000


def _rng(seed):
    return np.random.Generator(np.random.PCG64(seed))


# ----------------------------------------------------------------------
# closed forms
# ----------------------------------------------------------------------

def test_exponential_closed_forms():
    k = EXPONENTIAL
    assert k.cdf(2.0, 1.0) == pytest.approx(1.0 - math.exp(-2.0), rel=1e-14)
    assert k.quantile(2.0, 0.5) == pytest.approx(math.log(2.0) / 2.0, rel=1e-14)
    assert k.hazard_at_zero(2.0) == 2.0
    assert k.density_sup(2.0) == 2.0
    assert k.survival(2.0, 1.5) == pytest.approx(math.exp(-3.0), rel=1e-14)


def test_pareto_closed_forms():
    k = PARETO_UNIT_SHAPE
    assert k.cdf(1.0, 1.0) == pytest.approx(0.5, rel=1e-14)
    assert k.pdf(1.0, 1.0) == pytest.approx(0.25, rel=1e-14)
    assert k.quantile(1.0, 0.5) == pytest.approx(1.0, rel=1e-14)
    assert k.quantile(2.0, 0.75) == pytest.approx(0.75 / (0.25 * 2.0), rel=1e-14)
    assert k.hazard_at_zero(3.0) == 3.0
    assert k.density_sup(3.0) == 3.0


def test_gengamma_half_closed_forms():
    k = GEN_GAMMA_HALF
    # F(t) = 1 - (1 + sqrt(t/lam)) exp(-sqrt(t/lam))
    assert k.cdf(1.0, 1.0) == pytest.approx(1.0 - 2.0 * math.exp(-1.0), rel=1e-14)
    assert k.pdf(1.0, 1.0) == pytest.approx(0.5 * math.exp(-1.0), rel=1e-14)
    assert k.hazard_at_zero(1.0) == pytest.approx(0.5, rel=1e-14)
    assert k.hazard_at_zero(2.0) == pytest.approx(0.25, rel=1e-14)
    assert k.density_sup(2.0) == pytest.approx(0.25, rel=1e-14)


def test_gengamma_quantile_inverts_cdf():
    k = GEN_GAMMA_HALF
    vs = np.linspace(0.001, 0.999, 97)
    for lam in (0.5, 1.0, 3.0):
        ts = k.quantile(lam, vs)
        back = k.cdf(lam, ts)
        assert np.max(np.abs(back - vs)) < 1e-10


def test_deterministic_unit_kernel():
    k = DETERMINISTIC_UNIT
    assert k.cdf(1.0, 0.999) == 0.0
    assert k.cdf(1.0, 1.0) == 1.0
    assert np.all(k.quantile(1.0, np.array([0.1, 0.9])) == 1.0)
    assert not k.has_density
    with pytest.raises(RegularityViolationError):
        k.hazard_at_zero(1.0)
    with pytest.raises(NoDensityError):
        k.pdf(1.0, np.array([0.5]))
    with pytest.raises(NoDensityError):
        k.density_sup(1.0)


def test_kernel_parameter_validation():
    # Shape functions stay unguarded for vectorised speed; the validated
    # entry points are the rate summaries and the model boundary.
    for k in (EXPONENTIAL, PARETO_UNIT_SHAPE, GEN_GAMMA_HALF):
        with pytest.raises(ParameterError):
            k.hazard_at_zero(0.0)
        with pytest.raises(ParameterError):
            k.hazard_at_zero(-1.0)
        with pytest.raises(ParameterError):
            k.density_sup(float("nan"))


def test_kernel_for_family_round_trip():
    assert kernel_for("exp") is EXPONENTIAL
    assert kernel_for(Family.PARETO_UNIT_SHAPE) is PARETO_UNIT_SHAPE
    assert kernel_for("gengamma") is GEN_GAMMA_HALF
    assert kernel_for("deterministic") is DETERMINISTIC_UNIT
    with pytest.raises(ValueError):
        kernel_for("weibull")


# ----------------------------------------------------------------------
# numeric hazard vs analytic
# ----------------------------------------------------------------------

def test_numeric_hazard_matches_exponential():
    for lam in (0.25, 1.0, 4.0):
        est = hazard_at_zero_numeric(EXPONENTIAL, lam)
        assert est == pytest.approx(lam, rel=1e-6)


def test_numeric_hazard_matches_pareto():
    for lam in (0.25, 0.7, 1.0, 2.5, 4.0):
        est = hazard_at_zero_numeric(PARETO_UNIT_SHAPE, lam)
        assert est == pytest.approx(lam, rel=1e-4)


def test_numeric_hazard_matches_gengamma():
    # sqrt-type cdf: the Richardson step must still deliver 1e-4 relative
    for lam in np.linspace(1.0, 2.0, 5):
        est = hazard_at_zero_numeric(GEN_GAMMA_HALF, float(lam))
        assert est == pytest.approx(1.0 / (2.0 * lam), rel=1e-4)


# ----------------------------------------------------------------------
# samplers against their own cdfs
# ----------------------------------------------------------------------

@pytest.mark.parametrize(
    "kernel,lam",
    [(EXPONENTIAL, 1.7), (PARETO_UNIT_SHAPE, 0.9), (GEN_GAMMA_HALF, 1.3)],
)
def test_sampler_matches_cdf(kernel, lam):
    draws = kernel.sample(lam, _rng(42), size=N_SAMPLE)
    sample = EmpiricalSample.from_values(draws)
    d = ks_distance(sample, lambda t: kernel.cdf(lam, t))
    assert d < KS_BOUND / math.sqrt(N_SAMPLE)


def test_gengamma_sample_mean():
    # gap = lam * U^2 with U ~ Gamma(2,1): mean 6*lam, variance 84*lam^2
    lam = 0.8
    draws = GEN_GAMMA_HALF.sample(lam, _rng(7), size=N_SAMPLE)
    se = lam * math.sqrt(84.0 / N_SAMPLE)
    assert abs(float(np.mean(draws)) - 6.0 * lam) < 4.0 * se


def test_deterministic_sample_is_constant():
    draws = DETERMINISTIC_UNIT.sample(1.0, _rng(3), size=100)
    assert np.all(draws == 1.0)


# ----------------------------------------------------------------------
# mixing laws
# ----------------------------------------------------------------------

def test_gamma_mixing_quantile_and_pdf():
    g = GammaMixing(2.0, 1.0)
    assert g.quantile(0.5) == pytest.approx(1.6783469900166608, rel=1e-12)
    assert g.pdf(1.0) == pytest.approx(math.exp(-1.0), rel=1e-12)
    assert g.mean() == 2.0
    # rate convention: scaling beta scales quantiles down
    g2 = GammaMixing(2.0, 4.0)
    assert g2.quantile(0.5) == pytest.approx(g.quantile(0.5) / 4.0, rel=1e-12)
    draws = g.sample(_rng(11), size=N_SAMPLE)
    assert abs(float(np.mean(draws)) - 2.0) < 4.0 * math.sqrt(2.0 / N_SAMPLE)


def test_uniform_mixing():
    u = UniformMixing(1.0, 2.0)
    assert u.quantile(0.25) == 1.25
    assert u.pdf(1.5) == 1.0
    assert u.pdf(2.5) == 0.0
    assert u.support() == (1.0, 2.0)
    with pytest.raises(RejectedInputError):
        UniformMixing(2.0, 1.0)


def test_dirac_mixing():
    d = DiracMixing(1.5)
    assert d.sample(_rng(0)) == 1.5
    assert np.all(d.sample(_rng(0), size=10) == 1.5)
    assert np.all(d.quantile(np.array([0.01, 0.99])) == 1.5)
    assert not d.has_density
    with pytest.raises(NoDensityError):
        d.pdf(1.5)


def test_mapped_mixing_pushforward():
    base = GammaMixing(2.0, 1.0)
    pushed = MappedMixing(base=base, pmap=ReciprocalMap())
    # decreasing map: the q-quantile of 1/theta is 1/(1-q quantile of theta)
    q = 0.3
    assert pushed.quantile(q) == pytest.approx(1.0 / base.quantile(1.0 - q), rel=1e-12)
    draws = pushed.sample(_rng(5), size=1000)
    assert np.all(draws > 0.0)
    lo, hi = pushed.support()
    assert lo == 0.0 and hi == math.inf
    assert pushed.token() == "mapped(gamma:2,1;reciprocal)"


# ----------------------------------------------------------------------
# parameter maps
# ----------------------------------------------------------------------

def test_affine_map_round_trip():
    m = AffineMap(2.0, 1.0)
    assert m.apply(3.0) == 7.0
    assert m.invert(7.0) == 3.0
    arr = np.array([0.5, 1.0, 2.0])
    assert np.allclose(m.invert(m.apply(arr)), arr)
    with pytest.raises(ParameterError):
        AffineMap(0.0, 1.0)
    with pytest.raises(ParameterError):
        AffineMap(1.0, -0.5)


def test_reciprocal_map_round_trip():
    m = ReciprocalMap()
    assert m.apply(2.0) == 0.5
    assert m.invert(0.5) == 2.0
    assert m.apply_endpoint(0.0) == math.inf
    assert m.apply_endpoint(math.inf) == 0.0
    assert not m.is_increasing


def test_maps_reject_null_set_points():
    # hitting a measure-zero bad point must raise, never default to a value
    for m in (AffineMap(1.0, 0.0), ReciprocalMap(), IdentityMap()):
        with pytest.raises(NullSetError):
            m.apply(0.0)
        with pytest.raises(NullSetError):
            m.apply(-1.0)
        with pytest.raises(NullSetError):
            m.apply(float("nan"))


def test_excluded_interval_raises():
    m = AffineMap(1.0, 0.0, excluded=((1.0, 2.0),))
    assert m.apply(0.5) == 0.5
    assert m.apply(3.0) == 3.0
    with pytest.raises(NullSetError):
        m.apply(1.5)
    with pytest.raises(NullSetError):
        m.apply(np.array([0.5, 1.0]))  # endpoint belongs to the closed interval
    with pytest.raises(NullSetError):
        m.invert(1.5)


def test_map_descriptions():
    assert AffineMap(1.0, 0.0).describe() == "theta"
    assert AffineMap(2.0, 0.0).describe() == "2*theta"
    assert AffineMap(2.0, 3.0).describe() == "2*theta+3"
    assert ReciprocalMap().describe() == "1/theta"
    assert EXPONENTIAL.hazard_description("theta") == "theta"
    assert PARETO_UNIT_SHAPE.hazard_description("1/theta") == "1/theta"
    assert GEN_GAMMA_HALF.hazard_description("theta") == "1/(2*(theta))"
