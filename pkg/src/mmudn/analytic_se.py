"""Closed-form spectral-efficiency asymptotics and bounds for microwave and
millimeter-wave ultra-dense networks.

All spectral efficiencies are in nats/s/Hz.  Downlink and uplink share one
implementation per tier: the bounds are identical in the ultra-dense regime
and transmit powers cancel out of the SIR, so powers live in
:class:`NetworkParams` only for the simulator's invariance check.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .errors import DomainError, NumericError, ParameterError

__all__ = [
    "NetworkParams",
    "SEBounds",
    "NATS_PER_BIT",
    "interference_constant",
    "los_probability",
    "se_muw_asymptotic",
    "se_muw_bounds",
    "se_mmw_asymptotic",
    "se_mmw_bounds_tractable",
    "se_mmw_bounds_integral",
    "approximation_validity_probability",
]

NATS_PER_BIT = math.log(2.0)


class UDNRegimeWarning(UserWarning):
    """Raised when a BS-to-user density ratio falls below 1 (outside the UDN regime)."""


@dataclass(frozen=True)
class NetworkParams:
    """Densities, propagation exponents and mmW geometry of the two-tier network.

    Densities are per m^2; ``theta`` is the mmW mainlobe width in radians and
    ``r_los`` the average LOS distance in meters.  Transmit powers are in
    watts and cancel out of every SIR; they are kept for the simulator's
    power-invariance check.
    """

    lambda_m: float
    lambda_mu: float
    lambda_u: float
    alpha_m: float = 2.5
    alpha_mu: float = 4.0
    theta: float = math.pi / 12
    r_los: float = 50.0
    p_m_d: float = 1.0
    p_m_u: float = 1.0
    p_mu_d: float = 1.0
    p_mu_u: float = 1.0

    def __post_init__(self):
        if min(self.lambda_m, self.lambda_mu, self.lambda_u) < 0:
            raise ParameterError("densities must be nonnegative")
        if self.alpha_m <= 2 or self.alpha_mu <= 2:
            raise ParameterError("path-loss exponents must exceed 2")
        if not 0 < self.theta <= 2 * math.pi:
            raise ParameterError("beamwidth must lie in (0, 2*pi]")
        if self.r_los <= 0:
            raise ParameterError("LOS distance must be positive")
        if min(self.p_m_d, self.p_m_u, self.p_mu_d, self.p_mu_u) <= 0:
            raise ParameterError("transmit powers must be positive")

    @property
    def lambda_hat_m(self) -> float:
        if self.lambda_u <= 0:
            raise ParameterError("lambda_u must be positive for density ratios")
        return self.lambda_m / self.lambda_u

    @property
    def lambda_hat_mu(self) -> float:
        if self.lambda_u <= 0:
            raise ParameterError("lambda_u must be positive for density ratios")
        return self.lambda_mu / self.lambda_u


@dataclass(frozen=True)
class SEBounds:
    lower: float
    upper: float
    asymptotic: float
    udn_warning: bool = False

    def __post_init__(self):
        if self.lower > self.upper + 1e-12:
            raise NumericError(f"lower bound {self.lower} exceeds upper bound {self.upper}")


def interference_constant(alpha: float) -> float:
    """Full-plane interference constant ``(2*pi/alpha) * csc(2*pi/alpha)``."""
    if alpha <= 2:
        raise DomainError(f"interference integral diverges for alpha <= 2, got {alpha}")
    x = 2 * math.pi / alpha
    return x / math.sin(x)


def _warn_if_sparse(lambda_hat: float) -> bool:
    if lambda_hat < 1:
        warnings.warn(
            f"density ratio {lambda_hat} < 1 is outside the ultra-dense regime",
            UDNRegimeWarning,
            stacklevel=3,
        )
        return True
    return False


def se_muw_asymptotic(lambda_hat_mu: float, alpha_mu: float) -> float:
    """Limit microwave SE (alpha/2) * ln(lambda_hat); DL and UL coincide."""
    if alpha_mu <= 2:
        raise DomainError("alpha_mu must exceed 2")
    _warn_if_sparse(lambda_hat_mu)
    return 0.5 * alpha_mu * math.log(lambda_hat_mu)


def se_muw_bounds(lambda_hat_mu: float, alpha_mu: float) -> SEBounds:
    """Microwave DL/UL SE bounds, clamped at zero:

    lower = ln(1 + [lhat/rho]^(a/2)) - a/2,
    upper = ln(1 + [(1 + 2/a) lhat]^(a/2)) - a/2.
    """
    rho = interference_constant(alpha_mu)
    warned = _warn_if_sparse(lambda_hat_mu)
    half = 0.5 * alpha_mu
    lower = math.log1p((lambda_hat_mu / rho) ** half) - half
    upper = math.log1p(((1 + 2 / alpha_mu) * lambda_hat_mu) ** half) - half
    return SEBounds(
        lower=max(0.0, lower),
        upper=max(0.0, upper),
        asymptotic=max(0.0, half * math.log(lambda_hat_mu)),
        udn_warning=warned,
    )


def los_probability(lambda_m: float, r_los: float) -> float:
    """Probability the nearest mmW BS is within the LOS distance,
    ``1 - exp(-lambda_m * pi * r_los^2)``.
    """
    if lambda_m < 0:
        raise ParameterError("lambda_m must be nonnegative")
    if r_los <= 0:
        raise ParameterError("r_los must be positive")
    return -math.expm1(-lambda_m * math.pi * r_los**2)


def se_mmw_asymptotic(
    lambda_hat_m: float, lambda_m: float, alpha_m: float, r_los: float
) -> float:
    """Limit mmW SE (alpha * p_L / 2) * ln(lambda_hat); DL and UL coincide."""
    if alpha_m <= 2:
        raise DomainError("alpha_m must exceed 2")
    _warn_if_sparse(lambda_hat_m)
    return 0.5 * alpha_m * los_probability(lambda_m, r_los) * math.log(lambda_hat_m)


def se_mmw_bounds_tractable(params: NetworkParams) -> SEBounds:
    """Closed-form mmW DL/UL SE bounds.

    lower = p_L * [ln(1 + (2pi/theta) [lhat/rho]^(a/2)) - a/2],
    upper = C * ln(1 + (2pi/theta) [(1 + 2/a) lhat]^(a/2)) with
    C = 1 - exp(-lambda_m pi R_L^2 (1 + rho (1 + 2/a))).
    """
    a = params.alpha_m
    lhat = params.lambda_hat_m
    rho = interference_constant(a)
    warned = _warn_if_sparse(lhat)
    p_l = los_probability(params.lambda_m, params.r_los)
    gain = 2 * math.pi / params.theta
    half = 0.5 * a
    lower = p_l * (math.log1p(gain * (lhat / rho) ** half) - half)
    c_l2 = -math.expm1(
        -params.lambda_m * math.pi * params.r_los**2 * (1 + rho * (1 + 2 / a))
    )
    upper = c_l2 * math.log1p(gain * ((1 + 2 / a) * lhat) ** half)
    lower = max(0.0, lower)
    upper = max(lower, max(0.0, upper))
    asym = max(0.0, half * p_l * math.log(lhat))
    return SEBounds(lower=lower, upper=upper, asymptotic=asym, udn_warning=warned)


def _integral_bound(
    lhat: float,
    alpha: float,
    theta: float,
    lam_pi_rl2: float,
    rho: float,
    shrink: float,
    abs_tol: float,
) -> float:
    """Integrate p_L^(t) * (1 - shrink * [theta/(2pi) (e^t - 1)]^(2/a))^+ over t > 0.

    ``shrink`` is rho/lhat for the lower bound and 1/((1+2/a) lhat) for the
    upper one; the integrand's bracket hits zero at a finite cutoff.
    """
    gain = theta / (2 * math.pi)
    two_over_a = 2.0 / alpha

    def integrand(t: float) -> float:
        x = gain * math.expm1(t)
        frac = x**two_over_a
        bracket = 1.0 - shrink * frac
        if bracket <= 0.0:
            return 0.0
        p_l_t = -math.expm1(-lam_pi_rl2 * (1.0 + rho / lhat * frac))
        return p_l_t * bracket

    # Cutoff where the bracket vanishes: e^t - 1 = (2pi/theta) shrink^(-a/2).
    t_max = math.log1p(shrink ** (-alpha / 2.0) / gain)
    val, err = quad(integrand, 0.0, t_max, epsabs=abs_tol, epsrel=0.0, limit=400)
    if err > 10 * max(abs_tol, 1e-12 * abs(val)):
        raise NumericError(
            f"SE bound quadrature error {err:.3e} exceeds tolerance (value {val:.6e})"
        )
    return val


def se_mmw_bounds_integral(params: NetworkParams, abs_tol: float = 1e-6) -> SEBounds:
    """mmW DL/UL SE bounds in integral form (tighter than the tractable pair
    on the lower side).  Adaptive quadrature at absolute tolerance ``abs_tol``.
    """
    a = params.alpha_m
    lhat = params.lambda_hat_m
    rho = interference_constant(a)
    warned = _warn_if_sparse(lhat)
    lam_pi_rl2 = params.lambda_m * math.pi * params.r_los**2
    lower = _integral_bound(lhat, a, params.theta, lam_pi_rl2, rho, rho / lhat, abs_tol)
    upper = _integral_bound(
        lhat, a, params.theta, lam_pi_rl2, rho, 1.0 / ((1 + 2 / a) * lhat), abs_tol
    )
    lower = max(0.0, lower)
    upper = max(lower, max(0.0, upper))
    p_l = los_probability(params.lambda_m, params.r_los)
    asym = max(0.0, 0.5 * a * p_l * math.log(lhat))
    return SEBounds(lower=lower, upper=upper, asymptotic=asym, udn_warning=warned)


def approximation_validity_probability(params: NetworkParams) -> float:
    """Probability that the mmW interference-constant bounds hold in a UDN,
    ``1 - exp(-rho_m * lambda_u * pi * R_L^2)``.  Reported for diagnostics;
    the closed forms assume it holds.
    """
    rho = interference_constant(params.alpha_m)
    return -math.expm1(-rho * params.lambda_u * math.pi * params.r_los**2)
