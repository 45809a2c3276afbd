"""Three-ball growth experiments.

Measures lower bounds for the three-ball constant: with M the running max
of a single separated mode, C >= (M(2kr)/M(kr))^alpha * (M(2kr)/M(4kr))^(1-alpha)
for every admissible order m, so a good m gives a certified lower bound.
The mode windows per curvature sign put the middle radius just past the
turning point, which is what makes the bound grow exponentially in kr.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bessel import bessel_j, bessel_max_function
from .comparisons import BoundReport
from .errors import DataError, DomainError, PreconditionError
from .geometry import CurvatureContext, cutoff_radii, inv_sin_kappa, sin_kappa
from .radial import integrate_radial, max_function
from .scaling import ScaledValue

_POLICIES = ("paper_rule", "free_search")


@dataclass(frozen=True)
class ThreeBallQuery:
    """One three-ball measurement: space, ball radius, interpolation
    exponent, and how the mode is chosen."""

    space: CurvatureContext
    r: float
    alpha: float
    policy: str = "paper_rule"

    def __post_init__(self):
        if not (self.r > 0 and math.isfinite(self.r)):
            raise DomainError(f"radius must be positive, got {self.r}")
        if not 0.0 < self.alpha <= 1.0:
            raise DomainError(f"alpha must lie in (0, 1], got {self.alpha}")
        if self.policy not in _POLICIES:
            raise DomainError(f"unknown policy {self.policy!r}")
        K = self.space.K
        if K > 0 and not self.r < math.pi / (8.0 * math.sqrt(K)):
            raise DomainError(
                f"r = {self.r} too large for K = {K}: need "
                f"r < pi/(8 sqrt(K)) = {math.pi / (8.0 * math.sqrt(K))}")

    @property
    def k(self) -> float:
        return self.space.k

    @property
    def kr(self) -> float:
        return self.space.k * self.r


def select_mode(kappa: float, kr: float, policy: str = "paper_rule") -> int:
    """The order used for the bound: the largest integer strictly inside
    the per-space window, or 0 when the window holds no integer."""
    if policy not in _POLICIES:
        raise DomainError(f"unknown policy {policy!r}")
    if kappa == 0:
        lo, hi = 6.0 * kr / 5.0, 3.0 * kr / 2.0
    elif kappa < 0:
        lo, hi = 18.0 * kr / 11.0, 18.0 * kr / 10.0
    else:
        lo, hi = 12.0 * kr / 11.0, 12.0 * kr / 10.0
    m = math.ceil(hi) - 1
    if m <= lo:
        return 0
    return m


def _mode_bound(space: CurvatureContext, m: int, kr: float, alpha: float,
                pipeline: str) -> ScaledValue:
    if m == 0:
        return ScaledValue.one()
    if pipeline == "bessel":
        if space.K != 0:
            raise DomainError("bessel pipeline requires flat space")
        m1 = bessel_max_function(m, kr)
        m2 = bessel_max_function(m, 2.0 * kr)
        m4 = bessel_max_function(m, 4.0 * kr)
    elif pipeline == "radial":
        profile = integrate_radial(space, m, 4.0 * kr)
        mf = max_function(profile)
        m1, m2, m4 = mf(kr), mf(2.0 * kr), mf(4.0 * kr)
    else:
        raise DomainError(f"unknown pipeline {pipeline!r}")
    log_bound = (alpha * (m2.log_abs - m1.log_abs)
                 + (1.0 - alpha) * (m2.log_abs - m4.log_abs))
    return ScaledValue.from_log(1, log_bound)


def three_ball_lower_bound(query: ThreeBallQuery, *,
                           pipeline: str = "radial") -> ScaledValue:
    """Certified lower bound on the three-ball constant for this query.

    paper_rule picks the windowed order (0 when the window is empty, with
    bound 1); free_search maximizes over all integer orders up to 3kr.
    """
    kr = query.kr
    if query.policy == "paper_rule":
        m = select_mode(query.space.kappa, kr, query.policy)
        return _mode_bound(query.space, m, kr, query.alpha, pipeline)
    best = ScaledValue.one()  # m = 0 baseline
    for m in range(1, int(math.floor(3.0 * kr)) + 1):
        b = _mode_bound(query.space, m, kr, query.alpha, pipeline)
        if b > best:
            best = b
    return best


@dataclass
class GrowthFit:
    """Least-squares fit of log lower bound against kr."""

    samples: list  # (kr, log_bound)
    slope: float
    intercept: float
    r_squared: float
    alpha: float
    space_curvature: float
    r: float


def growth_fit(space: float, r: float, alpha: float, k_grid) -> GrowthFit:
    """Sweep k at fixed physical curvature and ball radius, fit the
    exponential growth rate of the lower bound.

    space is the physical curvature K; each k gives kappa = K/k^2.
    """
    ks = sorted(float(k) for k in k_grid)
    if len(ks) < 8:
        raise DataError(f"need at least 8 wave numbers, got {len(ks)}")
    if ks[0] <= 0:
        raise DataError("wave numbers must be positive")
    if ks[-1] / ks[0] < 5.0:
        raise DataError(
            f"kr span must cover a factor of 5, got {ks[-1] / ks[0]:.3g}")
    samples = []
    for k in ks:
        ctx = CurvatureContext.from_physical(space, k)
        q = ThreeBallQuery(ctx, r, alpha, "paper_rule")
        bound = three_ball_lower_bound(q)
        if bound.sign <= 0:
            raise DataError(f"non-positive bound at k = {k}")
        samples.append((k * r, bound.log_abs))
    xs = np.array([s[0] for s in samples])
    ys = np.array([s[1] for s in samples])
    A = np.column_stack([xs, np.ones_like(xs)])
    coef, _, _, _ = np.linalg.lstsq(A, ys, rcond=None)
    slope, intercept = float(coef[0]), float(coef[1])
    resid = ys - A @ coef
    ss_res = float(np.sum(resid ** 2))
    ss_tot = float(np.sum((ys - ys.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0 else 1.0 - ss_res / ss_tot
    return GrowthFit(samples, slope, intercept, r2, alpha, space, r)


def lemma_ratio_check(m: float, gamma: float, delta: float,
                      cap: float = 10.0) -> BoundReport:
    """Realized constant in the two-point ratio bound
    J_m(gamma m) (delta/gamma)^(beta m) <= C J_m(delta m),
    beta = sqrt(1 - delta^2).  Both arguments sit before the first zero
    (j_m > m), so both values are positive."""
    if not (0.0 < gamma < delta < 1.0):
        raise DomainError(
            f"need 0 < gamma < delta < 1, got gamma={gamma}, delta={delta}")
    if m <= 0:
        raise DomainError(f"order must be positive, got {m}")
    beta = math.sqrt(1.0 - delta * delta)
    j_lo = bessel_j(m, gamma * m)
    j_hi = bessel_j(m, delta * m)
    c_real = ScaledValue.from_log(
        1, j_lo.log_abs - j_hi.log_abs
        + beta * m * math.log(delta / gamma))
    return BoundReport.from_leq(
        "lemma_ratio", c_real, ScaledValue.from_float(cap),
        {"m": m, "gamma": gamma, "delta": delta, "beta": beta,
         "c_real_log": c_real.log_abs, "cap": cap})


def lemma_ratio_sweep(m_values, gamma: float, delta: float):
    """All realized constants over a family; the cap is the family max, so
    each verdict restates boundedness by that cap."""
    raw = [lemma_ratio_check(float(m), gamma, delta) for m in m_values]
    cap = max(math.exp(r.params["c_real_log"]) for r in raw)
    reports = [lemma_ratio_check(float(m), gamma, delta, cap=cap)
               for m in m_values]
    return reports, cap


def _upper_ratio_kappa_leq0(kappa: float, m: float, rho1: float,
                            xi: float) -> ScaledValue:
    # envelope decreases forever, so the running max plateaus at the first
    # extremum; only rho1 before that extremum gives a ratio above one
    step = 6.0 * math.pi / math.sqrt(1.0 - xi ** -2) + 2.0
    ctx = CurvatureContext.from_kappa(kappa)
    profile = integrate_radial(ctx, m, rho1 + step,
                               stop_after_extremum_past=rho1)
    interior = [(x, v) for x, v in profile.extrema if x <= rho1]
    if interior:
        return ScaledValue.one()
    later = [(x, v) for x, v in profile.extrema if x > rho1]
    if not later:
        raise DomainError(
            f"no extremum found within {step} past rho1 = {rho1}")
    top = later[0][1]
    at_rho1 = abs(profile.evaluate(rho1))
    return top / at_rho1


def _upper_ratio_kappa_pos(kappa: float, m: float, rho1: float,
                           xi: float) -> ScaledValue:
    # the frequency hypothesis sin_kappa > xi m holds on a symmetric window
    # around the equator; the global max is taken up to its far end
    rho_end = math.pi / math.sqrt(kappa) - rho1
    ctx = CurvatureContext.from_kappa(kappa)
    profile = integrate_radial(ctx, m, rho_end)
    mf = max_function(profile)
    return mf(rho_end) / mf(rho1)


def upper_ratio_check(kappa: float, m: float, rho1: float, xi: float,
                      cap: float = 10.0) -> BoundReport:
    """Stability of the running max past the frequency radius: reports
    (global max / max up to rho1 - 1) * (xi - 1) * m against the cap."""
    if xi <= 1.0:
        raise PreconditionError("xi_range", f"need xi > 1, got {xi}")
    if m <= 0:
        raise PreconditionError("xi_range", f"order must be positive: {m}")
    radii = cutoff_radii(kappa)
    if not rho1 < radii.r_abs_kappa:
        raise PreconditionError(
            "admissible_radius",
            f"rho1 = {rho1} must stay below {radii.r_abs_kappa}")
    s1 = sin_kappa(kappa, rho1)
    if not s1 > xi * m:
        raise PreconditionError(
            "frequency_window",
            f"sin_kappa(rho1) = {s1} must exceed xi*m = {xi * m}")
    if kappa > 0:
        ratio = _upper_ratio_kappa_pos(kappa, m, rho1, xi)
    else:
        ratio = _upper_ratio_kappa_leq0(kappa, m, rho1, xi)
    excess = ratio - ScaledValue.one()
    if excess.sign < 0:
        excess = ScaledValue.zero()
    product = excess * ((xi - 1.0) * m)
    return BoundReport.from_leq(
        "upper_ratio", product, ScaledValue.from_float(cap),
        {"kappa": kappa, "m": m, "rho1": rho1, "xi": xi,
         "ratio_log": ratio.log_abs, "cap": cap})


def upper_ratio_geometry(space: str, m: float, xi: float):
    """(kappa, rho1) for the per-space test family.

    flat: rho1 just past the frequency radius; hyperbolic: rho1 pinned at
    80% of the cutoff radius with curvature solved to match; spherical:
    curvature chosen so the equator frequency clears xi m by 5%.
    """
    if space == "flat":
        return 0.0, 1.05 * xi * m
    if space == "hyperbolic":
        s = math.sinh(0.4 * math.pi) / (1.05 * xi * m)
        kappa = -s * s
        return kappa, 0.4 * math.pi / s
    if space == "spherical":
        s = 0.95 / (xi * m)
        kappa = s * s
        return kappa, inv_sin_kappa(kappa, 1.0263 * xi * m)
    raise DomainError(f"unknown space {space!r}")


def upper_ratio_family(space: str, m_values, xi: float):
    """Products over a family, reported against a fitted cap: twice the
    first-half max (at least 1), so a pass certifies no growth trend."""
    raw = []
    for m in m_values:
        kappa, rho1 = upper_ratio_geometry(space, float(m), xi)
        raw.append(upper_ratio_check(kappa, float(m), rho1, xi, cap=1e12))
    products = [r.lhs.to_float() for r in raw]
    half = max(1, len(products) // 2)
    cap = max(1.0, 2.0 * max(products[:half]))
    reports = [BoundReport.from_leq("upper_ratio", r.lhs,
                                    ScaledValue.from_float(cap),
                                    {**r.params, "cap": cap})
               for r in raw]
    return reports, cap
