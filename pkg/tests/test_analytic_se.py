import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mmudn.analytic_se import (
    NetworkParams,
    UDNRegimeWarning,
    interference_constant,
    approximation_validity_probability,
    los_probability,
    se_mmw_asymptotic,
    se_mmw_bounds_integral,
    se_mmw_bounds_tractable,
    se_muw_asymptotic,
    se_muw_bounds,
)
from mmudn.errors import DomainError, ParameterError


def mk_params(lambda_hat_m, r_los=50.0, lambda_u=1e-4, **kw):
    return NetworkParams(
        lambda_m=lambda_hat_m * lambda_u,
        lambda_mu=2 * lambda_u,
        lambda_u=lambda_u,
        r_los=r_los,
        **kw,
    )


# --- interference constant ---------------------------------------------------


def test_interference_constant_values():
    assert interference_constant(4.0) == pytest.approx(math.pi / 2, rel=1e-12)
    assert interference_constant(2.5) == pytest.approx(4.275837328, rel=1e-8)
    assert interference_constant(1e6) == pytest.approx(1.0, abs=1e-9)


def test_interference_constant_domain():
    for alpha in (2.0, 1.5, -1.0):
        with pytest.raises(DomainError):
            interference_constant(alpha)


# --- microwave tier ----------------------------------------------------------


def test_muw_asymptotic_values():
    assert se_muw_asymptotic(1.0, 4.0) == 0.0
    assert se_muw_asymptotic(100.0, 4.0) == pytest.approx(9.21034037, rel=1e-8)
    assert se_muw_asymptotic(50.0, 8.0) == pytest.approx(
        2 * se_muw_asymptotic(50.0, 4.0), rel=1e-12
    )


def test_muw_bounds_reference_point():
    b = se_muw_bounds(100.0, 4.0)
    assert b.lower == pytest.approx(6.307422, abs=1e-5)
    assert b.upper == pytest.approx(8.021315, abs=1e-5)
    # The asymptote (alpha/2) ln lhat is a density->inf limit, not bracketed
    # at finite lhat; only the ordering of the finite-density bounds holds.
    assert b.lower <= b.upper


def test_muw_bounds_clamped_at_unity_ratio():
    b = se_muw_bounds(1.0, 4.0)
    assert b.lower == 0.0
    assert b.upper == 0.0
    assert b.asymptotic == 0.0


def test_muw_gap_stays_bounded():
    # Analytic gap limit (alpha/2) * log(rho * (1 + 2/alpha)) ~ 1.714 at alpha=4.
    limit = 2.0 * math.log(interference_constant(4.0) * 1.5)
    assert limit == pytest.approx(1.714, abs=2e-3)
    for lhat in (1e2, 1e3):
        b = se_muw_bounds(lhat, 4.0)
        assert b.upper - b.lower <= limit + 1e-6


def test_muw_warns_outside_udn_regime():
    with pytest.warns(UDNRegimeWarning):
        b = se_muw_bounds(0.5, 4.0)
    assert b.udn_warning


@given(st.floats(1.0, 1e8), st.floats(2.1, 8.0))
@settings(max_examples=100, deadline=None)
def test_muw_bounds_ordering(lhat, alpha):
    b = se_muw_bounds(lhat, alpha)
    assert 0.0 <= b.lower <= b.upper


def test_muw_lower_to_asymptotic_ratio_converges():
    # The ratio improves monotonically and approaches 1 deep in the UDN regime
    # (it is still ~0.9 at lhat = 1e6 for alpha = 4).
    ratios = [
        se_muw_bounds(lh, 4.0).lower / se_muw_asymptotic(lh, 4.0)
        for lh in (1e4, 1e6, 1e9, 1e13)
    ]
    assert np.all(np.diff(ratios) > 0)
    assert ratios[-1] > 0.95


# --- LOS probability ----------------------------------------------------------


def test_los_probability_values():
    assert los_probability(0.0, 10.0) == 0.0
    assert los_probability(1.0, 10.0) == pytest.approx(1.0, abs=1e-12)
    assert los_probability(1.5e-4, 49.61) == pytest.approx(0.686477, abs=1e-4)


def test_los_probability_monotone():
    grid = np.linspace(1e-5, 1e-2, 30)
    vals = [los_probability(l, 30.0) for l in grid]
    assert np.all(np.diff(vals) > 0)


# --- millimeter-wave tier -------------------------------------------------------


def test_mmw_asymptotic_values():
    # Saturated LOS probability: (alpha/2) ln lhat.
    assert se_mmw_asymptotic(100.0, 1.0, 2.5, 10.0) == pytest.approx(
        1.25 * math.log(100.0), rel=1e-9
    )
    assert se_mmw_asymptotic(1.0, 1e-4, 2.5, 50.0) == 0.0
    assert se_mmw_asymptotic(100.0, 1e-4, 2.5, 1e-6) == pytest.approx(0.0, abs=1e-9)


def test_mmw_tractable_omnidirectional_reduces_gain():
    p_wide = mk_params(100.0, theta=2 * math.pi)
    p_narrow = mk_params(100.0, theta=math.pi / 12)
    wide, narrow = se_mmw_bounds_tractable(p_wide), se_mmw_bounds_tractable(p_narrow)
    # Narrow mainlobes thin interference -> higher SE bounds.
    assert narrow.lower > wide.lower
    assert narrow.upper > wide.upper


def test_mmw_integral_within_tractable():
    for lhat in (5.0, 100.0, 1e4):
        for r_los in (10.0, 50.0):
            p = mk_params(lhat, r_los=r_los, alpha_m=2.5)
            tr = se_mmw_bounds_tractable(p)
            it = se_mmw_bounds_integral(p)
            assert it.lower >= tr.lower - 1e-9
            assert it.upper <= tr.upper + 1e-9
            assert it.lower <= it.upper


def test_mmw_integral_frozen_point():
    # Directional-mmW reference parameters, frozen against the quadrature oracle.
    p = NetworkParams(
        lambda_m=1.0,
        lambda_mu=1e-9,
        lambda_u=0.01,
        alpha_m=2.5,
        theta=math.radians(15.0),
        r_los=10.0,
    )
    b = se_mmw_bounds_integral(p)
    assert b.lower == pytest.approx(5.8829, abs=2e-3)
    assert b.upper == pytest.approx(8.4215, abs=2e-3)


def test_mmw_bounds_monotone_in_density_ratio():
    uppers, lowers = [], []
    for lhat in (10.0, 100.0, 1000.0):
        b = se_mmw_bounds_integral(mk_params(lhat))
        uppers.append(b.upper)
        lowers.append(b.lower)
    assert np.all(np.diff(uppers) > 0)
    assert np.all(np.diff(lowers) > 0)


@given(st.floats(1.0, 1e6), st.floats(2.2, 6.0), st.floats(5.0, 200.0))
@settings(max_examples=60, deadline=None)
def test_mmw_tractable_ordering(lhat, alpha, r_los):
    p = mk_params(lhat, r_los=r_los, alpha_m=alpha)
    b = se_mmw_bounds_tractable(p)
    assert 0.0 <= b.lower <= b.upper


# --- parameter validation -------------------------------------------------------


def test_network_params_validation():
    with pytest.raises(ParameterError):
        NetworkParams(lambda_m=-1.0, lambda_mu=1.0, lambda_u=1.0)
    with pytest.raises(ParameterError):
        NetworkParams(lambda_m=1.0, lambda_mu=1.0, lambda_u=1.0, alpha_m=2.0)
    with pytest.raises(ParameterError):
        NetworkParams(lambda_m=1.0, lambda_mu=1.0, lambda_u=1.0, theta=7.0)
    with pytest.raises(ParameterError):
        NetworkParams(lambda_m=1.0, lambda_mu=1.0, lambda_u=1.0, r_los=0.0)
    with pytest.raises(ParameterError):
        NetworkParams(lambda_m=1.0, lambda_mu=1.0, lambda_u=0.0).lambda_hat_m


def test_approximation_validity_probability_close_to_one():
    p = mk_params(100.0, lambda_u=1e-4, r_los=50.0)
    val = approximation_validity_probability(p)
    assert 0.0 < val < 1.0
    expected = -math.expm1(-interference_constant(2.5) * 1e-4 * math.pi * 50.0**2)
    assert val == pytest.approx(expected, rel=1e-12)
