"""TDD UL/DL resource allocation for the two-tier network.

Covers the PAPR-limited mmW UL bandwidth, the linear DL/UL rate model,
low/high-density region classification, closed-form optimal UL allocation
fractions with and without mmW UL decoupling, the maximized DL rate, and an
exact two-variable LP oracle used to verify the closed forms.

Rates are in nats/s throughout; CSV emission adds bits/s columns.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .analytic_se import NATS_PER_BIT, NetworkParams, los_probability
from .errors import AssumptionError, DomainError, NumericError, ParameterError

__all__ = [
    "SpectrumParams",
    "Allocation",
    "RatePair",
    "RegionLabel",
    "Gammas",
    "AllocationResult",
    "MaxRateResult",
    "papr_outage",
    "mmw_ul_bandwidth",
    "gammas_from_params",
    "rates",
    "region_classify",
    "cl_boundary",
    "allocation_limits",
    "optimal_allocation",
    "optimal_allocation_decoupled",
    "max_dl_rate",
    "lp_oracle",
    "sweep_allocation",
    "write_sweep_csv",
    "SWEEP_CSV_HEADER",
]

_BOX_TOL = 1e-12

SWEEP_CSV_HEADER = [
    "lambda_hat_m",
    "region",
    "beta_m",
    "beta_mu",
    "r_d",
    "r_u",
    "r_d_decoupled",
    "gain",
    "r_d_bits",
    "r_u_bits",
    "r_d_decoupled_bits",
]


@dataclass(frozen=True)
class SpectrumParams:
    """Bandwidths (Hz), PAPR parameters and the minimum UL/DL rate ratio.

    ``w_m_ul`` is the usable mmW UL bandwidth.  The rate model assumes
    w_m > w_mu_band; w_m_ul is clamped to w_m with a warning because the
    as-printed PAPR bandwidth can exceed the mmW band itself.
    """

    w_m: float
    w_mu_band: float
    w_m_ul: float = 100e6
    f_s: float = 244140.0
    delta: float = 10.0
    epsilon: float = 0.7
    zeta: float = 0.25

    def __post_init__(self):
        if not self.w_m > self.w_mu_band > 0:
            raise ParameterError(
                f"need w_m > w_mu_band > 0, got {self.w_m}, {self.w_mu_band}"
            )
        if self.w_m_ul <= 0:
            raise ParameterError("w_m_ul must be positive")
        if self.w_m_ul > self.w_m:
            warnings.warn(
                f"w_m_ul = {self.w_m_ul:.4g} Hz exceeds w_m = {self.w_m:.4g} Hz; "
                "clamping to w_m",
                stacklevel=2,
            )
            object.__setattr__(self, "w_m_ul", self.w_m)
        if self.f_s <= 0 or self.delta <= 0:
            raise ParameterError("f_s and delta must be positive")
        if not 0 < self.epsilon < 1:
            raise ParameterError(f"epsilon must lie in (0, 1), got {self.epsilon}")
        if not 0 <= self.zeta <= 1:
            raise ParameterError(f"zeta must lie in [0, 1], got {self.zeta}")


@dataclass(frozen=True)
class Allocation:
    """UL bandwidth fractions: beta_m for the mmW band, beta_mu for the uW band."""

    beta_m: float
    beta_mu: float

    def __post_init__(self):
        for name, b in (("beta_m", self.beta_m), ("beta_mu", self.beta_mu)):
            if not -_BOX_TOL <= b <= 1 + _BOX_TOL:
                raise ParameterError(f"{name} must lie in [0, 1], got {b}")
        object.__setattr__(self, "beta_m", min(1.0, max(0.0, self.beta_m)))
        object.__setattr__(self, "beta_mu", min(1.0, max(0.0, self.beta_mu)))


@dataclass(frozen=True)
class RatePair:
    r_d: float
    r_u: float

    def __post_init__(self):
        if self.r_d < 0 or self.r_u < 0:
            raise ParameterError("rates must be nonnegative")


@dataclass(frozen=True)
class RegionLabel:
    """Density-region label: 'C_L' or 'C_H', plus decoupling-region membership.

    ``in_d`` is None when decoupling is not considered.
    """

    region: str
    in_d: bool | None = None

    def __post_init__(self):
        if self.region not in ("C_L", "C_H"):
            raise ParameterError(f"region must be 'C_L' or 'C_H', got {self.region!r}")

    def __str__(self) -> str:
        if self.in_d:
            return f"{self.region}+D"
        return self.region


@dataclass(frozen=True)
class Gammas:
    """Per-band spectral efficiencies (nats/s/Hz): mmW DL, uW DL/UL, mmW UL."""

    gamma_m: float
    gamma_mu: float
    gamma_m_u: float

    def __post_init__(self):
        if min(self.gamma_m, self.gamma_mu, self.gamma_m_u) < 0:
            raise ParameterError("spectral efficiencies must be nonnegative")


@dataclass(frozen=True)
class AllocationResult:
    allocation: Allocation
    region: RegionLabel
    rate: RatePair
    gammas: Gammas
    a1_satisfied: bool


@dataclass(frozen=True)
class MaxRateResult:
    """Maximized DL rate by substitution, with the closed-form expression as a
    cross-check.  ``printed_literal`` is the alternative literal reading of the
    decoupled dense-region expression (LOS distance in place of LOS
    probability in the exponent); None off that branch.
    """

    r_d_star: float
    printed_formula_value: float
    branch: str
    printed_literal: float | None = None


# ---------------------------------------------------------------------------
# PAPR-limited mmW UL bandwidth
# ---------------------------------------------------------------------------


def papr_outage(w: float, f_s: float, delta: float) -> float:
    """PAPR outage probability 1 - exp(-(w e^-delta / f_s) sqrt(pi delta / 3))."""
    if w < 0:
        raise ParameterError(f"bandwidth must be nonnegative, got {w}")
    if f_s <= 0 or delta <= 0:
        raise ParameterError("f_s and delta must be positive")
    return -math.expm1(-(w * math.exp(-delta) / f_s) * math.sqrt(math.pi * delta / 3))


def mmw_ul_bandwidth(
    f_s: float,
    delta: float,
    epsilon: float,
    mode: str = "exact-inversion",
    cap: float = math.inf,
) -> float:
    """Maximum mmW UL bandwidth meeting the PAPR outage target epsilon.

    'exact-inversion' solves papr_outage(w) = epsilon exactly; 'as-printed'
    evaluates sqrt(3) f_s e^delta (pi delta)^(-1/2) / ln(1/epsilon), an
    approximation that does not round-trip.  Results above ``cap`` are
    clamped with a warning.
    """
    if f_s <= 0 or delta <= 0:
        raise ParameterError("f_s and delta must be positive")
    if not 0 < epsilon < 1:
        raise ParameterError(f"epsilon must lie in (0, 1), got {epsilon}")
    base = f_s * math.exp(delta) * math.sqrt(3.0 / (math.pi * delta))
    if mode == "as-printed":
        w = base / math.log(1.0 / epsilon)
    elif mode == "exact-inversion":
        w = base * (-math.log1p(-epsilon))
    else:
        raise ParameterError(f"mode must be 'as-printed' or 'exact-inversion', got {mode!r}")
    if w > cap:
        warnings.warn(
            f"PAPR-limited bandwidth {w:.4g} Hz exceeds cap {cap:.4g} Hz; clamping",
            stacklevel=2,
        )
        return cap
    return w


# ---------------------------------------------------------------------------
# Rate model and regions
# ---------------------------------------------------------------------------


def gammas_from_params(
    params: NetworkParams,
    p_l: float | None = None,
    decoupled: bool = False,
    combined_density_pl: bool = False,
) -> Gammas:
    """Asymptotic per-band SEs from network parameters.

    ``p_l`` overrides the computed LOS probability.  Without decoupling the
    mmW UL SE equals the DL one; with decoupling the UL receiver set has
    density lambda_m + lambda_mu, so the density ratio inside the log grows
    accordingly.  ``combined_density_pl`` additionally recomputes the LOS
    probability against the merged set (off by default).
    """
    lhat_m, lhat_mu = params.lambda_hat_m, params.lambda_hat_mu
    if lhat_m < 1 or lhat_mu < 1:
        raise DomainError("density ratios must be >= 1 for the asymptotic SEs")
    pl = los_probability(params.lambda_m, params.r_los) if p_l is None else p_l
    if not 0 <= pl <= 1:
        raise ParameterError(f"p_l must lie in [0, 1], got {pl}")
    gamma_m = 0.5 * params.alpha_m * pl * math.log(lhat_m)
    gamma_mu = 0.5 * params.alpha_mu * math.log(lhat_mu)
    if not decoupled:
        gamma_m_u = gamma_m
    else:
        pl_dec = pl
        if combined_density_pl and p_l is None:
            pl_dec = los_probability(params.lambda_m + params.lambda_mu, params.r_los)
        gamma_m_u = 0.5 * params.alpha_m * pl_dec * math.log(lhat_m + lhat_mu)
    return Gammas(gamma_m=gamma_m, gamma_mu=gamma_mu, gamma_m_u=gamma_m_u)


def rates(alloc: Allocation, spectrum: SpectrumParams, gammas: Gammas) -> RatePair:
    """Linear DL/UL rates of the allocation:

    R_u = beta_m W_m.u gamma_m.u + beta_mu W_mu gamma_mu,
    R_d = (1 - beta_m) W_m gamma_m + (1 - beta_mu) W_mu gamma_mu.
    """
    r_u = (
        alloc.beta_m * spectrum.w_m_ul * gammas.gamma_m_u
        + alloc.beta_mu * spectrum.w_mu_band * gammas.gamma_mu
    )
    r_d = (1.0 - alloc.beta_m) * spectrum.w_m * gammas.gamma_m + (
        1.0 - alloc.beta_mu
    ) * spectrum.w_mu_band * gammas.gamma_mu
    return RatePair(r_d=r_d, r_u=r_u)


def region_classify(
    params: NetworkParams,
    spectrum: SpectrumParams,
    decoupled: bool = False,
    p_l: float | None = None,
) -> RegionLabel:
    """Classify the operating point into C_L / C_H and (if decoupled) D.

    C_L holds iff zeta W_m gamma_m <= W_mu gamma_mu (the low-density side of
    the allocation branch switch); zeta = 0 is C_L by convention.  D holds iff
    ln(lhat_m + lhat_mu) >= (W_m / W_m.u) ln(lhat_m), evaluated in log form.
    """
    g = gammas_from_params(params, p_l=p_l)
    if spectrum.zeta == 0:
        low = True
    else:
        low = spectrum.zeta * spectrum.w_m * g.gamma_m <= spectrum.w_mu_band * g.gamma_mu
    in_d = None
    if decoupled:
        lhat_m, lhat_mu = params.lambda_hat_m, params.lambda_hat_mu
        in_d = math.log(lhat_m + lhat_mu) >= (
            spectrum.w_m / spectrum.w_m_ul
        ) * math.log(lhat_m)
    return RegionLabel(region="C_L" if low else "C_H", in_d=in_d)


def cl_boundary(
    params: NetworkParams, spectrum: SpectrumParams, lhat_max: float = 1e12
) -> float:
    """Density ratio lhat_m at the C_L/C_H switch, by root bisection.

    The LOS probability depends on lambda_m = lhat_m * lambda_u, so the
    boundary is a fixed point; solved to 1e-9 relative tolerance.  Returns
    inf when the switch never happens (zeta = 0 or the band is too narrow).
    """
    if spectrum.zeta == 0:
        return math.inf
    target = 0.5 * params.alpha_mu * spectrum.w_mu_band * math.log(params.lambda_hat_mu)

    def f(lhat: float) -> float:
        pl = los_probability(lhat * params.lambda_u, params.r_los)
        return (
            spectrum.zeta * spectrum.w_m * 0.5 * params.alpha_m * pl * math.log(lhat)
            - target
        )

    lo = 1.0 + 1e-12
    if f(lhat_max) < 0:
        return math.inf
    try:
        return float(brentq(f, lo, lhat_max, rtol=1e-9))
    except (ValueError, RuntimeError) as exc:
        raise NumericError(f"C_L/C_H boundary bisection failed: {exc}") from exc


def allocation_limits(spectrum: SpectrumParams) -> tuple[float, float]:
    """(min over densities of beta_mu*, max over densities of beta_m*):
    zeta/(1+zeta) and 1/(1 + W_m.u/(zeta W_m)); both 0 at zeta = 0.
    """
    z = spectrum.zeta
    if z == 0:
        return 0.0, 0.0
    return z / (1.0 + z), 1.0 / (1.0 + spectrum.w_m_ul / (z * spectrum.w_m))


# ---------------------------------------------------------------------------
# Optimal allocations
# ---------------------------------------------------------------------------


def _check_a1(spectrum: SpectrumParams, g: Gammas, strict: bool) -> bool:
    """Dominant-mmW-DL assumption W_m gamma_m > W_mu gamma_mu underlying the
    closed forms; violated near lhat_m = 1.  The branch formulas still match
    the LP there, so by default only a flag is set.
    """
    ok = spectrum.w_m * g.gamma_m > spectrum.w_mu_band * g.gamma_mu
    if not ok and strict:
        raise AssumptionError(
            "W_m gamma_m <= W_mu gamma_mu: mmW DL does not dominate "
            f"({spectrum.w_m * g.gamma_m:.6g} <= {spectrum.w_mu_band * g.gamma_mu:.6g})"
        )
    return ok


def _closed_form(
    spectrum: SpectrumParams, g: Gammas, region: RegionLabel
) -> Allocation:
    """Branch formulas shared by the plain and decoupled optima (the decoupled
    case differs only through gamma_m_u and the D branch)."""
    z = spectrum.zeta
    wm_gm = spectrum.w_m * g.gamma_m
    wmu_gmu = spectrum.w_mu_band * g.gamma_mu
    wmul_gmu_ul = spectrum.w_m_ul * g.gamma_m_u
    if z == 0:
        return Allocation(0.0, 0.0)
    if region.in_d:
        beta_m = z * (wm_gm + wmu_gmu) / (wmul_gmu_ul + z * wm_gm)
        return Allocation(beta_m, 0.0)
    if region.region == "C_L":
        beta_mu = (z / (1.0 + z)) * (1.0 + wm_gm / wmu_gmu)
        return Allocation(0.0, min(1.0, beta_mu))
    beta_m = (z * wm_gm - wmu_gmu) / (z * wm_gm + wmul_gmu_ul)
    return Allocation(max(0.0, beta_m), 1.0)


def optimal_allocation(
    params: NetworkParams,
    spectrum: SpectrumParams,
    p_l: float | None = None,
    strict: bool = False,
) -> AllocationResult:
    """DL-rate-maximizing UL allocation subject to R_u >= zeta R_d (no decoupling)."""
    g = gammas_from_params(params, p_l=p_l, decoupled=False)
    a1 = _check_a1(spectrum, g, strict)
    region = region_classify(params, spectrum, decoupled=False, p_l=p_l)
    alloc = _closed_form(spectrum, g, region)
    return AllocationResult(
        allocation=alloc,
        region=region,
        rate=rates(alloc, spectrum, g),
        gammas=g,
        a1_satisfied=a1,
    )


def optimal_allocation_decoupled(
    params: NetworkParams,
    spectrum: SpectrumParams,
    p_l: float | None = None,
    strict: bool = False,
    combined_density_pl: bool = False,
) -> AllocationResult:
    """Optimal UL allocation with mmW UL decoupling (uW BSs receive mmW UL).

    In the dense region D the UL rides entirely on the mmW band (beta_mu = 0);
    outside D the plain branch formulas apply with the decoupled mmW UL SE.
    """
    g = gammas_from_params(
        params, p_l=p_l, decoupled=True, combined_density_pl=combined_density_pl
    )
    a1 = _check_a1(spectrum, g, strict)
    region = region_classify(params, spectrum, decoupled=True, p_l=p_l)
    alloc = _closed_form(spectrum, g, region)
    return AllocationResult(
        allocation=alloc,
        region=region,
        rate=rates(alloc, spectrum, g),
        gammas=g,
        a1_satisfied=a1,
    )


def max_dl_rate(
    params: NetworkParams,
    spectrum: SpectrumParams,
    decoupled: bool = False,
    p_l: float | None = None,
) -> MaxRateResult:
    """Maximized DL rate: substitution of the optimal allocation into the rate
    model (authoritative), with the closed-form branch expression evaluated as
    a cross-check.  On the decoupled D branch the closed form disagrees with
    substitution; both it and its literal alternative reading are reported.
    """
    if decoupled:
        res = optimal_allocation_decoupled(params, spectrum, p_l=p_l)
    else:
        res = optimal_allocation(params, spectrum, p_l=p_l)
    g, z = res.gammas, spectrum.zeta
    wm_gm = spectrum.w_m * g.gamma_m
    wmu_gmu = spectrum.w_mu_band * g.gamma_mu
    wmul_gmu_ul = spectrum.w_m_ul * g.gamma_m_u
    literal = None
    if res.region.in_d:
        branch = "D"
        # The closed-form dense-branch numerator uses the non-decoupled mmW UL
        # SE; with the LOS-probability reading of its exponent:
        wmul_gm = spectrum.w_m_ul * g.gamma_m
        printed = wmul_gmu_ul * (wmu_gmu + wmul_gm) / (wmul_gmu_ul + z * wm_gm)
        # Literal reading: LOS distance instead of LOS probability.
        pl = los_probability(params.lambda_m, params.r_los) if p_l is None else p_l
        if pl > 0:
            wmul_gm_lit = wmul_gm * (params.r_los / pl)
            literal = wmul_gmu_ul * (wmu_gmu + wmul_gm_lit) / (wmul_gmu_ul + z * wm_gm)
    elif res.region.region == "C_L":
        branch = "C_L"
        printed = (wm_gm + wmu_gmu) / (1.0 + z)
    else:
        branch = "C_H"
        printed = wm_gm * (wmul_gmu_ul + wmu_gmu) / (z * wm_gm + wmul_gmu_ul)
    return MaxRateResult(
        r_d_star=res.rate.r_d,
        printed_formula_value=printed,
        branch=branch,
        printed_literal=literal,
    )


# ---------------------------------------------------------------------------
# Exact LP oracle
# ---------------------------------------------------------------------------


def lp_oracle(
    params: NetworkParams,
    spectrum: SpectrumParams,
    decoupled: bool = False,
    p_l: float | None = None,
    combined_density_pl: bool = False,
) -> tuple[Allocation, float]:
    """Exact solution of the two-variable LP max R_d s.t. R_u >= zeta R_d,
    0 <= beta <= 1, by vertex enumeration of the feasible polygon.

    Ties (within 1e-15 relative in R_d) break toward smaller beta_m, then
    smaller beta_mu.  Returns (allocation, maximal R_d).
    """
    g = gammas_from_params(
        params, p_l=p_l, decoupled=decoupled, combined_density_pl=combined_density_pl
    )
    z = spectrum.zeta
    # Constraint A beta_m + B beta_mu >= C.
    a = spectrum.w_m_ul * g.gamma_m_u + z * spectrum.w_m * g.gamma_m
    b = (1.0 + z) * spectrum.w_mu_band * g.gamma_mu
    c = z * (spectrum.w_m * g.gamma_m + spectrum.w_mu_band * g.gamma_mu)

    def feasible(bm: float, bmu: float) -> bool:
        slack = a * bm + b * bmu - c
        return slack >= -1e-9 * max(1.0, abs(c))

    candidates: list[tuple[float, float]] = [
        (bm, bmu) for bm in (0.0, 1.0) for bmu in (0.0, 1.0) if feasible(bm, bmu)
    ]
    # Intersections of the constraint line with the four box edges.
    if a != 0.0:
        for bmu in (0.0, 1.0):
            bm = (c - b * bmu) / a
            if 0.0 <= bm <= 1.0:
                candidates.append((bm, bmu))
    if b != 0.0:
        for bm in (0.0, 1.0):
            bmu = (c - a * bm) / b
            if 0.0 <= bmu <= 1.0:
                candidates.append((bm, bmu))
    if not candidates:
        raise AssumptionError(
            "empty feasible region: UL constraint unsatisfiable inside the box "
            f"(A={a:.6g}, B={b:.6g}, C={c:.6g})"
        )

    def r_d(v: tuple[float, float]) -> float:
        return rates(Allocation(*v), spectrum, g).r_d

    best = max(r_d(v) for v in candidates)
    tol = 1e-15 * max(1.0, abs(best))
    tied = sorted(v for v in candidates if r_d(v) >= best - tol)
    bm, bmu = tied[0]
    return Allocation(bm, bmu), best


# ---------------------------------------------------------------------------
# Sweeps
# ---------------------------------------------------------------------------


def sweep_allocation(
    lambda_hat_grid,
    params_template: NetworkParams,
    spectrum: SpectrumParams,
    strict: bool = False,
) -> list[dict]:
    """Optimal allocation with and without decoupling over a lhat_m grid.

    Each row: lambda_hat_m, region label (decoupling-aware), plain-optimum
    betas and rates, decoupled DL rate and the decoupling gain.  With
    ``strict`` the dominant-mmW-DL assumption check raises instead of
    flagging.
    """
    grid = np.atleast_1d(np.asarray(lambda_hat_grid, dtype=float))
    if grid.size == 0:
        raise ParameterError("lambda_hat grid must be nonempty")
    rows = []
    for lhat in grid:
        params = NetworkParams(
            lambda_m=lhat * params_template.lambda_u,
            lambda_mu=params_template.lambda_mu,
            lambda_u=params_template.lambda_u,
            alpha_m=params_template.alpha_m,
            alpha_mu=params_template.alpha_mu,
            theta=params_template.theta,
            r_los=params_template.r_los,
        )
        plain = optimal_allocation(params, spectrum, strict=strict)
        dec = optimal_allocation_decoupled(params, spectrum, strict=strict)
        gain = dec.rate.r_d / plain.rate.r_d if plain.rate.r_d > 0 else math.nan
        rows.append(
            dict(
                lambda_hat_m=float(lhat),
                region=str(dec.region),
                beta_m=plain.allocation.beta_m,
                beta_mu=plain.allocation.beta_mu,
                r_d=plain.rate.r_d,
                r_u=plain.rate.r_u,
                r_d_decoupled=dec.rate.r_d,
                gain=gain,
            )
        )
    return rows


def write_sweep_csv(rows: list[dict], fh, header_lines: list[str] | None = None) -> None:
    """Emit sweep rows with rates in nats/s and duplicated bits/s columns."""
    for line in header_lines or []:
        fh.write(f"# {line}\n")
    writer = csv.writer(fh)
    writer.writerow(SWEEP_CSV_HEADER)
    for r in rows:
        writer.writerow(
            [
                f"{r['lambda_hat_m']:.10g}",
                r["region"],
                f"{r['beta_m']:.10g}",
                f"{r['beta_mu']:.10g}",
                f"{r['r_d']:.10g}",
                f"{r['r_u']:.10g}",
                f"{r['r_d_decoupled']:.10g}",
                f"{r['gain']:.10g}",
                f"{r['r_d'] / NATS_PER_BIT:.10g}",
                f"{r['r_u'] / NATS_PER_BIT:.10g}",
                f"{r['r_d_decoupled'] / NATS_PER_BIT:.10g}",
            ]
        )
