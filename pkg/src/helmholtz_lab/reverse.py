"""Mode masses and the reverse inner-ball-versus-annulus inequality.

A separated mode u = L_{kappa,m}(k rho) cos(m theta) on a constant-curvature
surface has squared L2 norm over a radial window [a, b] (physical radii)

    mass = (1/k^2) * integral of L(x)^2 sin_kappa(x) dx  over x in [k a, k b],

because the physical area element sin_K(rho) d rho equals sin_kappa(k rho)/k
d rho after nondimensionalizing.  The matching Dirichlet energy carries no
1/k^2:

    gradient_mass = integral of (L'(x)^2 sin_kappa(x)
                                 + m^2 L(x)^2 / sin_kappa(x)) dx.

Angular orthogonality reduces the worst case over all separated-series
solutions to a per-mode maximum, which is how ``reverse_constant`` measures
the constant C(r, R1) in

    integral of u^2 over B_r  <=  C * integral of u^2 over B_R1 minus B_r,

and how ``equator_counterexample`` watches that constant blow up once the
annulus slides past the equator of a sphere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .comparisons import BoundReport
from .errors import DomainError, PreconditionError
from .geometry import CurvatureContext, cot_kappa, sin_kappa
from .ode import BatchedLinearIntegration, quintic_coefficients, quintic_eval
from .quadrature import gauss_nodes, integrate_log
from .radial import RadialProfile, _series_coefficients, integrate_radial
from .scaling import ScaledValue

# tail certificate: stop once this many consecutive ratios decrease while
# sitting at least PEAK_FACTOR below the peak
TAIL_WINDOW = 5
PEAK_FACTOR = 1.0e3

_EFOLDS = 20.0          # evanescent depth clipped from batched sweeps
_GL_ORDER = 8           # per-interval nodes; the interpolant is degree five


@dataclass(frozen=True)
class ModeMass:
    """Squared norms of one separated mode over a radial window.

    ``interval`` stores the physical radii (a, b).  ``mass`` is the L2
    integral with the area element; ``gradient_mass`` is the Dirichlet
    integral of the full two-dimensional gradient of the separated mode.
    Both carry the profile's own normalization, so only ratios of values
    sharing one profile are meaningful across modes.
    """

    m: int
    k: float
    interval: tuple
    mass: ScaledValue
    gradient_mass: ScaledValue


def _sin_kappa_vec(kappa: float, xs: np.ndarray) -> np.ndarray:
    if kappa == 0.0:
        return np.asarray(xs, dtype=float)
    s = math.sqrt(abs(kappa))
    if kappa > 0:
        return np.sin(s * np.asarray(xs, dtype=float)) / s
    return np.sinh(s * np.asarray(xs, dtype=float)) / s


def _mass_fns(profile: RadialProfile, m: float):
    """Log-space integrands for the two windows of one profile.

    Points below the series start are handled per point; the sorted bulk
    goes through the profile's vectorized evaluator.
    """
    kappa = profile.context.kappa
    rho0 = profile.rho0

    def eval_logs(xs):
        xs = np.asarray(xs, dtype=float)
        sign_l = np.empty_like(xs)
        log_l = np.empty_like(xs)
        sign_d = np.empty_like(xs)
        log_d = np.empty_like(xs)
        small = xs < rho0
        if np.any(small):
            for i in np.nonzero(small)[0]:
                val, slope = profile.evaluate_pair(float(xs[i]))
                sign_l[i], log_l[i] = val.sign, val.log_abs
                sign_d[i], log_d[i] = slope.sign, slope.log_abs
        if np.any(~small):
            idx = np.nonzero(~small)[0]
            sl, ll, sd, ld = profile.log_eval_sorted(xs[idx])
            sign_l[idx], log_l[idx] = sl, ll
            sign_d[idx], log_d[idx] = sd, ld
        return sign_l, log_l, sign_d, log_d

    def mass_fn(xs):
        sign_l, log_l, _, _ = eval_logs(xs)
        with np.errstate(divide="ignore"):
            log_sin = np.log(_sin_kappa_vec(kappa, xs))
        live = (sign_l != 0).astype(float)
        return live, 2.0 * log_l + log_sin

    def grad_fn(xs):
        sign_l, log_l, sign_d, log_d = eval_logs(xs)
        with np.errstate(divide="ignore"):
            log_sin = np.log(_sin_kappa_vec(kappa, xs))
        term_d = np.where(sign_d != 0, 2.0 * log_d + log_sin, -np.inf)
        if m > 0:
            term_m = np.where(sign_l != 0,
                              2.0 * log_l + 2.0 * math.log(m) - log_sin,
                              -np.inf)
        else:
            term_m = np.full_like(xs, -np.inf)
        total = np.logaddexp(term_d, term_m)
        live = np.isfinite(total).astype(float)
        return live, total

    return mass_fn, grad_fn


def _masses_on(profile: RadialProfile, m: float, pairs,
               rel_tol: float = 1e-10):
    """(mass, gradient_mass) ScaledValues over each physical (a, b) pair.

    The 1/k^2 area-element factor is applied to the mass only.
    """
    k = profile.context.k
    mass_fn, grad_fn = _mass_fns(profile, m)
    out = []
    inv_k2 = 1.0 / (k * k)
    for a, b in pairs:
        mass = integrate_log(mass_fn, k * a, k * b, rel_tol=rel_tol) * inv_k2
        grad = integrate_log(grad_fn, k * a, k * b, rel_tol=rel_tol)
        out.append((mass, grad))
    return out


def mode_mass(context: CurvatureContext, m: float, a: float, b: float, *,
              rel_tol: float = 1e-12, rtol: float = 1e-12) -> ModeMass:
    """Squared norms of mode m over physical radii [a, b].

    Integrates the profile out to k*b, then runs adaptive Gauss panels on
    the log-space integrands.
    """
    if not (0 <= a < b) or not math.isfinite(b):
        raise DomainError(f"need 0 <= a < b, got [{a}, {b}]")
    profile = integrate_radial(context, m, context.k * b, rtol=rtol)
    (mass, grad), = _masses_on(profile, m, [(a, b)], rel_tol=rel_tol)
    return ModeMass(m=int(m) if float(m).is_integer() else m, k=context.k,
                    interval=(a, b), mass=mass, gradient_mass=grad)


# ---------------------------------------------------------------------------
# batched sweep over all angular modes of one space


@dataclass(frozen=True)
class ReverseConstantReport:
    """Per-mode inner-ball/annulus mass ratios and their maximum.

    ``ratios[m]`` approximates mass(0, r) / mass(r, R1) for angular mode m;
    ``c_hat`` is the maximum, attained at ``argmax_mode``.  ``h1_ratios``
    repeats the computation with mass + gradient_mass on both sides.  The
    listing stops at ``m_max``, the first index whose trailing window
    satisfies the tail certificate; ``conclusive`` is False when no such
    window exists below the hard mode cap, in which case the full swept
    range is reported.
    """

    r: float
    R1: float
    k: float
    curvature: float
    ratios: np.ndarray
    h1_ratios: np.ndarray
    c_hat: float
    argmax_mode: int
    m_max: int
    conclusive: bool

    def certificate(self) -> dict:
        return {"window": TAIL_WINDOW, "peak_factor": PEAK_FACTOR,
                "m_max": self.m_max, "conclusive": self.conclusive}

    def to_json_dict(self) -> dict:
        return {
            "r": self.r, "R1": self.R1, "k": self.k,
            "kappa": self.curvature,
            "C_hat": self.c_hat, "argmax_mode": self.argmax_mode,
            "ratios": [float(v) for v in self.ratios],
            "certificate": self.certificate(),
        }


def _activation_points(kappa: float, modes: np.ndarray, x_inner: float,
                       series_start: float) -> np.ndarray:
    """Entry point per mode: 20 e-folds of evanescent decay before the
    inner radius (or the turning point, whichever comes first).

    Modes without that much barrier start on the origin series instead.
    """
    grid = np.geomspace(series_start, x_inner, 600)
    s = _sin_kappa_vec(kappa, grid)
    with np.errstate(divide="ignore", invalid="ignore"):
        lam2 = (modes[None, :] / s[:, None]) ** 2 - 1.0
    lam = np.sqrt(np.maximum(lam2, 0.0))
    seg = 0.5 * np.diff(grid)[:, None] * (lam[1:] + lam[:-1])
    # efolds[j] = integral of lam from grid[j] to x_inner
    efolds = np.concatenate([np.cumsum(seg[::-1], axis=0)[::-1],
                             np.zeros((1, len(modes)))])
    count = np.sum(efolds >= _EFOLDS, axis=0)
    starts = np.where(count > 0, grid[np.maximum(count - 1, 0)],
                      series_start)
    starts = np.where(starts > max(0.02, 2.0 * series_start),
                      starts, series_start)
    if modes[0] == 0:
        # the m=0 column is not stiff at the origin and its below-start
        # sliver shrinks only like s^2, so push it much lower
        starts[0] = min(1e-4, series_start)
    return np.maximum.accumulate(starts)


def _interval_log_masses(kappa, modes, xs, Y, YP, OFF, c1s, C0, lo, hi):
    """Log of the two window integrals per mode over [lo, hi].

    Each grid interval contributes a Gauss sum on its quintic interpolant,
    evaluated in the left node's normalization frame; contributions
    combine by log-sum-exp.  Returns (log_s2, log_grad) arrays where
    s2 = integral of L^2 sin_kappa dx (no 1/k^2).
    """
    n_int = len(xs) - 1
    h = np.diff(xs)
    active = ~np.isnan(Y[:-1]) & ~np.isnan(Y[1:])

    shift = OFF[1:] - OFF[:-1]
    with np.errstate(over="ignore", invalid="ignore"):
        fac = np.exp(shift)
    ypp = -c1s[:, None] * YP - C0 * Y
    y0, yp0, ypp0 = Y[:-1], YP[:-1], ypp[:-1]
    y1 = Y[1:] * fac
    yp1 = YP[1:] * fac
    ypp1 = ypp[1:] * fac
    hcol = h[:, None]
    u, v, w = quintic_coefficients(hcol, y0, yp0, ypp0, y1, yp1, ypp1)

    nodes, weights = gauss_nodes(_GL_ORDER)
    msq = modes.astype(float) ** 2

    def segment_sums(left, right):
        """Gauss sums over [left, right] subsets of each interval; left and
        right are arrays over intervals (left >= xs[:-1], right <= xs[1:])."""
        width = np.maximum(right - left, 0.0)
        s2 = np.zeros_like(y0)
        gg = np.zeros_like(y0)
        for g, wg in zip(nodes, weights):
            t_abs = left + 0.5 * (g + 1.0) * width
            t = (t_abs - xs[:-1])[:, None]
            P, Pp = quintic_eval(hcol, t, y0, yp0, ypp0, u, v, w)
            sin_t = _sin_kappa_vec(kappa, t_abs)[:, None]
            s2 = s2 + wg * P * P * sin_t
            gg = gg + wg * (Pp * Pp * sin_t + msq[None, :] * P * P / sin_t)
        half = 0.5 * width[:, None]
        return s2 * half, gg * half

    left = np.clip(xs[:-1], lo, hi)
    right = np.clip(xs[1:], lo, hi)
    s2, gg = segment_sums(left, right)

    with np.errstate(divide="ignore", invalid="ignore"):
        log_s2 = np.where(active & (s2 > 0),
                          np.log(np.maximum(s2, 1e-300)) + 2.0 * OFF[:-1],
                          -np.inf)
        log_gg = np.where(active & (gg > 0),
                          np.log(np.maximum(gg, 1e-300)) + 2.0 * OFF[:-1],
                          -np.inf)

    def reduce_log(mat):
        top = np.max(mat, axis=0)
        safe = np.where(np.isfinite(top), top, 0.0)
        with np.errstate(invalid="ignore"):
            acc = np.sum(np.exp(mat - safe[None, :]), axis=0)
        return np.where(np.isfinite(top), safe + np.log(acc), -np.inf)

    return reduce_log(log_s2), reduce_log(log_gg)


def _batched_mode_logs(context: CurvatureContext, r: float, R1: float,
                       m_cap: int, rtol: float):
    """Log inner/outer window integrals for modes 0..m_cap in one pass."""
    kappa = context.kappa
    k = context.k
    x_inner = k * r
    x_end = k * R1
    modes = np.arange(m_cap + 1)
    series_start = min(1e-2, 0.25 * x_inner)
    coeff = {}

    def c0_fn(x):
        s = sin_kappa(kappa, x)
        return 1.0 - (modes / s) ** 2

    def c1_fn(x):
        return cot_kappa(kappa, x)

    starts = _activation_points(kappa, modes, x_inner, series_start)

    def seed_fn(x, lo, hi):
        ms = modes[lo:hi]
        if x <= max(0.02, 2.0 * series_start):
            ys = np.empty(len(ms))
            yps = np.empty(len(ms))
            for j, mm in enumerate(ms):
                if mm not in coeff:
                    coeff[mm] = _series_coefficients(kappa, float(mm))
                a, b = coeff[mm]
                bracket = 1.0 + a * x * x + b * x ** 4
                ys[j] = bracket
                yps[j] = (mm / x) * bracket + 2.0 * a * x + 4.0 * b * x ** 3
            scale = np.maximum(np.abs(ys), np.abs(yps))
            return ys / scale, yps / scale
        s = sin_kappa(kappa, x)
        lam = np.sqrt(np.maximum((ms / s) ** 2 - 1.0, 0.0))
        return np.ones(len(ms)), lam

    runner = BatchedLinearIntegration(c0_fn, c1_fn, len(modes))
    xs, Y, YP, OFF = runner.run(starts, seed_fn, x_end, rtol=rtol)

    c1s = np.array([c1_fn(float(x)) for x in xs])
    C0 = np.vstack([c0_fn(float(x)) for x in xs])
    log_in = _interval_log_masses(kappa, modes, xs, Y, YP, OFF, c1s, C0,
                                  xs[0], x_inner)
    log_out = _interval_log_masses(kappa, modes, xs, Y, YP, OFF, c1s, C0,
                                   x_inner, x_end)
    return log_in, log_out


def _scalar_mode_logs(context: CurvatureContext, r: float, R1: float,
                      m_cap: int, rel_tol: float):
    """Reference path: one radial profile and adaptive quadrature per mode."""
    s2_in = np.empty(m_cap + 1)
    g_in = np.empty(m_cap + 1)
    s2_out = np.empty(m_cap + 1)
    g_out = np.empty(m_cap + 1)
    k = context.k
    for m in range(m_cap + 1):
        profile = integrate_radial(context, m, k * R1)
        (m_i, gr_i), (m_o, gr_o) = _masses_on(
            profile, m, [(0.0, r), (r, R1)], rel_tol=rel_tol)
        log_k2 = 2.0 * math.log(k)
        s2_in[m] = m_i.log_abs + log_k2 if not m_i.is_zero() else -np.inf
        s2_out[m] = m_o.log_abs + log_k2 if not m_o.is_zero() else -np.inf
        g_in[m] = gr_i.log_abs if not gr_i.is_zero() else -np.inf
        g_out[m] = gr_o.log_abs if not gr_o.is_zero() else -np.inf
    return (s2_in, g_in), (s2_out, g_out)


def _tail_cutoff(log_ratios: np.ndarray):
    """First index whose trailing window certifies decay; None if absent."""
    peak_idx = int(np.argmax(log_ratios))
    thresh = log_ratios[peak_idx] - math.log(PEAK_FACTOR)
    lo = max(peak_idx + 1, TAIL_WINDOW - 1)
    for c in range(lo, len(log_ratios)):
        win = log_ratios[c - TAIL_WINDOW + 1: c + 1]
        if np.all(np.diff(win) < 0) and np.all(win <= thresh):
            return c
    return None


def reverse_constant(context: CurvatureContext, r: float, R1: float, *,
                     method: str = "batched", rtol: float = 1e-8,
                     m_cap: int | None = None) -> ReverseConstantReport:
    """Measure C(r, R1) at this context's wave number.

    Sweeps angular modes, forming mass(0, r)/mass(r, R1) per mode; the
    maximum is the reported constant.  The sweep extends until the tail
    certificate fires (trailing window of decreasing ratios, a factor
    PEAK_FACTOR below the peak); hitting the hard cap first flags the
    report inconclusive rather than trimming it.
    """
    if not (0 < r < R1) or not math.isfinite(R1):
        raise DomainError(f"need 0 < r < R1, got r={r}, R1={R1}")
    K = context.K
    if K > 0 and not (2.0 * R1 < 0.5 * math.pi / math.sqrt(K)):
        raise PreconditionError(
            "admissible_radius",
            f"ball diameter 2*R1 = {2 * R1} must stay under "
            f"pi/(2 sqrt(K)) = {0.5 * math.pi / math.sqrt(K)}")
    if method not in ("batched", "scalar"):
        raise DomainError(f"unknown method {method!r}")
    cap = m_cap if m_cap is not None else int(
        math.ceil(1.6 * context.k * R1)) + 30

    if method == "batched":
        (s2_in, g_in), (s2_out, g_out) = _batched_mode_logs(
            context, r, R1, cap, rtol)
    else:
        (s2_in, g_in), (s2_out, g_out) = _scalar_mode_logs(
            context, r, R1, cap, rel_tol=1e-12)

    log_ratios = s2_in - s2_out
    log_k2 = 2.0 * math.log(context.k)
    h1_in = np.logaddexp(s2_in - log_k2, g_in)
    h1_out = np.logaddexp(s2_out - log_k2, g_out)
    log_h1 = h1_in - h1_out

    cut = _tail_cutoff(log_ratios)
    conclusive = cut is not None
    m_max = cut if conclusive else cap
    kept = slice(0, m_max + 1)
    peak_idx = int(np.argmax(log_ratios[kept]))
    return ReverseConstantReport(
        r=r, R1=R1, k=context.k, curvature=K,
        ratios=np.exp(log_ratios[kept]),
        h1_ratios=np.exp(log_h1[kept]),
        c_hat=float(np.exp(log_ratios[peak_idx])),
        argmax_mode=peak_idx, m_max=m_max, conclusive=conclusive)


# ---------------------------------------------------------------------------
# Caccioppoli inequality on one explicit mode


def caccioppoli_check(context: CurvatureContext, solution, r: float,
                      R: float, eps: float, *,
                      rel_tol: float = 1e-10) -> BoundReport:
    """Realized constants for both Caccioppoli inequalities on one mode.

    ``solution`` is the pair (m, k).  With S2(I) the L2 window integral and
    G the Dirichlet integral over the annulus [r, R], the smallest
    admissible constants are

        c_upper = max(0, G/S2(enlarged) - 1) * (k eps)^2
        c_lower = max(0, (S2(shrunk) - G) / S2) * (k eps)^2

    and the report passes when both are finite, with the double-precision
    overflow edge e^709 as the stated budget.
    """
    m, k = solution
    if not (k > 0 and math.isfinite(k)):
        raise DomainError(f"wave number must be positive, got {k}")
    if not (eps > 0 and math.isfinite(eps)):
        raise DomainError(f"collar width must be positive, got {eps}")
    if not (eps < r < R - 2.0 * eps):
        raise PreconditionError(
            "interval",
            f"need eps < r < R - 2*eps, got eps={eps}, r={r}, R={R}")
    ctx = CurvatureContext.from_physical(context.K, k)
    if ctx.kappa > 0 and k * (R + eps) >= ctx.domain_limit:
        raise PreconditionError(
            "admissible_radius",
            f"enlarged annulus edge k(R+eps) = {k * (R + eps)} reaches the "
            f"polar chart limit {ctx.domain_limit}")

    profile = integrate_radial(ctx, m, k * (R + eps))
    pairs = [(r, R), (r - eps, R + eps), (r + eps, R - eps)]
    (m_om, g_om), (m_plus, _), (m_minus, _) = _masses_on(
        profile, m, pairs, rel_tol=rel_tol)

    # S2 = k^2 * mass; ratios of same-profile values are well defined
    ratio_up = math.exp(g_om.log_ratio(m_plus) - 2.0 * math.log(k))
    g_scaled = g_om * (1.0 / (k * k))
    diff = m_minus - g_scaled
    if diff.sign > 0 and not m_om.is_zero():
        c_lower = math.exp(diff.log_ratio(m_om)) * (k * eps) ** 2
    else:
        c_lower = 0.0
    c_upper = max(0.0, ratio_up - 1.0) * (k * eps) ** 2

    worst = max(c_upper, c_lower)
    return BoundReport.from_leq(
        kind="caccioppoli",
        lhs=ScaledValue.from_float(worst),
        rhs=ScaledValue.from_log(1, 709.0),
        params={"m": m, "k": k, "r": r, "R": R, "eps": eps,
                "curvature": context.K,
                "c_upper": c_upper, "c_lower": c_lower})


# ---------------------------------------------------------------------------
# the equator family: reverse inequality failing past the hemisphere


@dataclass(frozen=True)
class EquatorReport:
    """Inner-ball/annulus ratios along the spherical-harmonic family.

    Mode n lives at the eigenvalue wave number k_n = sqrt(n(n+1) K); its
    profile concentrates on the equator, so with the annulus strictly in
    the far hemisphere the ratio grows geometrically in n.
    """

    curvature: float
    ball_radius: float
    annulus: tuple
    n_values: np.ndarray
    k_values: np.ndarray
    log_ratios: np.ndarray
    slope: float
    intercept: float
    r_squared: float

    def to_json_dict(self) -> dict:
        return {
            "curvature": self.curvature,
            "ball_radius": self.ball_radius,
            "annulus": list(self.annulus),
            "n": [int(n) for n in self.n_values],
            "log_ratio": [float(v) for v in self.log_ratios],
            "slope": self.slope, "intercept": self.intercept,
            "r_squared": self.r_squared,
        }


def equator_counterexample(n_list, *, ball_radius: float = 1.4,
                           annulus: tuple = (1.9, 2.4),
                           curvature: float = 1.0,
                           rel_tol: float = 1e-10) -> EquatorReport:
    """Mass ratios for the concentrating family on a sphere.

    The ball sits at the north pole, the annulus in the southern
    hemisphere; the family is the m=n mode at the degree-n eigenvalue.
    Growth of the ratio along n exhibits the failure of any uniform
    reverse constant once the regions may straddle the equator.
    """
    ns = [int(n) for n in n_list]
    if not ns or any(n < 1 for n in ns):
        raise DomainError(f"need positive integer degrees, got {n_list}")
    if not (curvature > 0 and math.isfinite(curvature)):
        raise DomainError(f"sphere curvature must be positive, "
                          f"got {curvature}")
    a, b = annulus
    equator = 0.5 * math.pi / math.sqrt(curvature)
    if not (a > equator):
        raise PreconditionError(
            "annulus_avoids_equator",
            f"annulus must start past the equator radius {equator}, "
            f"got a = {a}")
    if not (ball_radius < equator):
        raise PreconditionError(
            "admissible_radius",
            f"ball radius {ball_radius} must stay inside the equator "
            f"radius {equator}")
    if not (0 < ball_radius <= a < b):
        raise PreconditionError(
            "interval", f"need 0 < r <= a < b, got r={ball_radius}, "
            f"annulus={annulus}")
    if not (b < 2.0 * equator):
        raise DomainError(f"outer annulus edge {b} reaches the antipode "
                          f"{2.0 * equator}")

    ks, logs = [], []
    for n in ns:
        k_n = math.sqrt(n * (n + 1) * curvature)
        ctx = CurvatureContext.from_physical(curvature, k_n)
        profile = integrate_radial(ctx, n, k_n * b)
        (m_in, _), (m_ann, _) = _masses_on(
            profile, n, [(0.0, ball_radius), (a, b)], rel_tol=rel_tol)
        ks.append(k_n)
        logs.append(m_in.log_ratio(m_ann))

    ns_arr = np.array(ns, dtype=float)
    logs_arr = np.array(logs)
    if len(ns) >= 2:
        A = np.vstack([ns_arr, np.ones_like(ns_arr)]).T
        (slope, intercept), _, _, _ = np.linalg.lstsq(A, logs_arr, rcond=None)
        fit = A @ np.array([slope, intercept])
        ss_res = float(np.sum((logs_arr - fit) ** 2))
        ss_tot = float(np.sum((logs_arr - logs_arr.mean()) ** 2))
        r_squared = 1.0 if ss_tot == 0 else 1.0 - ss_res / ss_tot
    else:
        slope, intercept, r_squared = 0.0, float(logs_arr[0]), 1.0
    return EquatorReport(
        curvature=curvature, ball_radius=ball_radius, annulus=(a, b),
        n_values=np.array(ns), k_values=np.array(ks),
        log_ratios=logs_arr, slope=float(slope), intercept=float(intercept),
        r_squared=float(r_squared))
