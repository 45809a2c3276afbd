"""Bessel functions of the first kind, their first zeros, and running maxima.

Evaluation is a two-stage pipeline: the alternating power series where its
terms never grow (x below ~2 sqrt(m+1), where cancellation is provably
absent), and outward integration of the Bessel ODE from that handoff
elsewhere.  Values are ScaledValue: J_m(m gamma) underflows doubles already
for m of a few hundred.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, IntegrationError
from .ode import integrate_linear
from .scaling import ScaledValue

# A series range of max(12, m/2) measurably loses ~13 digits at m = 300
# (terms of size e^13 cancel); at 2 sqrt(m+1) the terms are monotonically
# decreasing from the start and the sum is exact to ~4e-16.
_SERIES_FLOOR = 9.0


def _series_limit(m: float) -> float:
    return max(_SERIES_FLOOR, 2.0 * math.sqrt(m + 1.0))


def _series_log(m: float, x: float):
    """(sign, log_abs) of J_m(x) by the power series; valid for
    x <= _series_limit(m).  Relative terms keep the prefactor in log space."""
    if x == 0.0:
        return (1, 0.0) if m == 0 else (0, -math.inf)
    u = -0.25 * x * x
    term = 1.0
    total = 1.0
    for j in range(1, 400):
        term *= u / (j * (m + j))
        total += term
        if abs(term) <= 1e-20 * max(1.0, abs(total)):
            break
    log_pref = m * math.log(0.5 * x) - math.lgamma(m + 1.0)
    if total == 0.0:
        return (0, -math.inf)
    sign = 1 if total > 0 else -1
    return sign, log_pref + math.log(abs(total))


def _series_value(m: float, x: float) -> ScaledValue:
    sign, log_abs = _series_log(m, x)
    if sign == 0:
        return ScaledValue.zero()
    return ScaledValue.from_log(sign, log_abs)


def _handoff_state(m: float, x: float):
    """(y, yp, offset) of J_m at x in renormalized units, from two series:
    J_m' = (m/x) J_m - J_{m+1}."""
    s0, l0 = _series_log(m, x)
    s1, l1 = _series_log(m + 1.0, x)
    base = max(l0, l1)
    y = s0 * math.exp(l0 - base)
    yp = (m / x) * y - s1 * math.exp(l1 - base)
    return y, yp, base


def _coefficients(m: float):
    m2 = m * m

    def c0(x):
        return 1.0 - m2 / (x * x)

    def c1(x):
        return 1.0 / x

    return c0, c1


def bessel_j(m: float, x: float) -> ScaledValue:
    """J_m(x) for real order m >= 0, x >= 0."""
    if m < 0:
        raise DomainError(f"order must be nonnegative, got {m}")
    if x < 0:
        raise DomainError(f"argument must be nonnegative, got {x}")
    limit = _series_limit(m)
    if x <= limit:
        return _series_value(m, x)
    c0, c1 = _coefficients(m)
    y, yp, off = _handoff_state(m, limit)
    sol = integrate_linear(c0, c1, limit, y, yp, x, offset0=off,
                           rtol=1e-12,
                           capture_zeros=False, capture_extrema=False)
    yv = float(sol.ys[-1])
    if yv == 0.0:
        return ScaledValue.zero()
    return ScaledValue.from_log(1 if yv > 0 else -1,
                                math.log(abs(yv)) + float(sol.offsets[-1]))


def bessel_j_grid(m: float, xs) -> list[ScaledValue]:
    """J_m at an arbitrary sequence of points, one ODE sweep total."""
    if m < 0:
        raise DomainError(f"order must be nonnegative, got {m}")
    xs = np.asarray(xs, dtype=float)
    if np.any(xs < 0):
        raise DomainError("arguments must be nonnegative")
    order = np.argsort(xs, kind="stable")
    limit = _series_limit(m)
    out: list = [None] * len(xs)
    tail = [i for i in order if xs[i] > limit]
    for i in order:
        if xs[i] <= limit:
            out[i] = _series_value(m, xs[i])
    if tail:
        c0, c1 = _coefficients(m)
        y, yp, off = _handoff_state(m, limit)
        x_top = float(xs[tail[-1]])
        sol = integrate_linear(c0, c1, limit, y, yp, x_top, offset0=off,
                           rtol=1e-12,
                               capture_zeros=False, capture_extrema=False)
        yv, _, offs = sol.evaluate_sorted([float(xs[i]) for i in tail])
        for i, yi, oi in zip(tail, yv, offs):
            if yi == 0.0:
                out[i] = ScaledValue.zero()
            else:
                out[i] = ScaledValue.from_log(1 if yi > 0 else -1,
                                              math.log(abs(yi)) + oi)
    return out


@dataclass(frozen=True, slots=True)
class ZeroBracket:
    """First-zero bracket (lo, hi], optionally with the refined root."""

    lo: float
    hi: float
    refined: float | None = None


def first_zero_bracket(l: float) -> ZeroBracket:
    """The a-priori bracket (l, l + (pi+1) l^(1/3)] for the first zero of
    J_l, l > 0; for l = 0 the fixed bracket (2, 3) pinned by the series."""
    if l < 0:
        raise DomainError(f"order must be nonnegative, got {l}")
    if l == 0:
        return ZeroBracket(2.0, 3.0)
    return ZeroBracket(float(l), l + (math.pi + 1.0) * l ** (1.0 / 3.0))


def _series_sign(m: float, x: float) -> int:
    return _series_log(m, x)[0]


def _bisect_series(m: float, lo: float, hi: float) -> float:
    s_lo = _series_sign(m, lo)
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        s_mid = _series_sign(m, mid)
        if s_mid == 0:
            return mid
        if s_mid == s_lo:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-12 * max(1.0, hi):
            break
    return 0.5 * (lo + hi)


def first_zero(l: float) -> float:
    """First positive zero j_l, refined to ~1e-10."""
    bracket = first_zero_bracket(l)
    lo, hi = bracket.lo, bracket.hi
    limit = _series_limit(l)
    scan_lo = max(lo, 0.05)
    scan_hi = min(hi, limit)
    # first zero may sit inside the series zone (small l); scan it first
    if scan_hi > scan_lo:
        xs = np.arange(scan_lo, scan_hi + 0.1, 0.1)
        xs[-1] = scan_hi
        prev_x, prev_s = scan_lo, _series_sign(l, scan_lo)
        for xv in xs[1:]:
            s = _series_sign(l, float(xv))
            if s != 0 and prev_s != 0 and s != prev_s:
                return _bisect_series(l, prev_x, float(xv))
            prev_x, prev_s = float(xv), s
    if hi <= limit:
        raise IntegrationError(
            f"no sign change of J_{l} found in bracket ({lo}, {hi}]")
    c0, c1 = _coefficients(l)
    y, yp, off = _handoff_state(l, limit)
    sol = integrate_linear(c0, c1, limit, y, yp, hi, offset0=off,
                           rtol=1e-12,
                           capture_extrema=False, stop_at_first_zero=True)
    if not sol.zeros:
        raise IntegrationError(
            f"no sign change of J_{l} found in bracket ({lo}, {hi}]")
    return float(sol.zeros[0])


def refined_bracket(l: float) -> ZeroBracket:
    b = first_zero_bracket(l)
    return ZeroBracket(b.lo, b.hi, first_zero(l))


def bessel_zeros(l: float, x_max: float) -> list[float]:
    """All zeros of J_l in (0, x_max], ascending."""
    if l < 0:
        raise DomainError(f"order must be nonnegative, got {l}")
    if x_max <= 0:
        return []
    limit = _series_limit(l)
    zeros: list[float] = []
    scan_hi = min(x_max, limit)
    xs = np.arange(0.05, scan_hi + 0.1, 0.1)
    if len(xs) and xs[-1] > scan_hi:
        xs[-1] = scan_hi
    prev_x, prev_s = None, 0
    for xv in xs:
        s = _series_sign(l, float(xv))
        if prev_s != 0 and s != 0 and s != prev_s:
            zeros.append(_bisect_series(l, prev_x, float(xv)))
        if s != 0:
            prev_x, prev_s = float(xv), s
    if x_max > limit:
        c0, c1 = _coefficients(l)
        y, yp, off = _handoff_state(l, limit)
        sol = integrate_linear(c0, c1, limit, y, yp, x_max, offset0=off,
                           rtol=1e-12,
                               capture_extrema=False)
        zeros.extend(float(z) for z in sol.zeros)
    return zeros


def _first_slope_change_in_series_zone(m: float, hi: float):
    """First zero of J_m' in (m, hi], by scan/bisection on the series form
    J_m'(x) = (m/x) J_m(x) - J_{m+1}(x); None if the slope keeps its sign."""

    def slope_sign(x: float) -> int:
        s0, l0 = _series_log(m, x)
        s1, l1 = _series_log(m + 1.0, x)
        base = max(l0, l1)
        v = (m / x) * s0 * math.exp(l0 - base) - s1 * math.exp(l1 - base)
        return 0 if v == 0 else (1 if v > 0 else -1)

    lo = max(m, 1e-3)
    if hi <= lo:
        return None
    xs = np.arange(lo, hi + 0.05, 0.05)
    xs[-1] = hi
    prev_x, prev_s = None, 0
    for xv in xs:
        s = slope_sign(float(xv))
        if prev_s != 0 and s != 0 and s != prev_s:
            a, b = prev_x, float(xv)
            for _ in range(80):
                mid = 0.5 * (a + b)
                sm = slope_sign(mid)
                if sm == 0:
                    return mid
                if sm == prev_s:
                    a = mid
                else:
                    b = mid
                if b - a < 1e-12 * max(1.0, b):
                    break
            return 0.5 * (a + b)
        if s != 0:
            prev_x, prev_s = float(xv), s
    return None


def bessel_max_function(m: float, rho: float) -> ScaledValue:
    """max of |J_m| over [0, rho].

    Equals J_m(rho) while rho is below the first maximum (J_m is positive and
    increasing through [0, m]) and plateaus at the first maximum afterwards,
    by the decreasing-extrema property.
    """
    if m < 0:
        raise DomainError(f"order must be nonnegative, got {m}")
    if rho < 0:
        raise DomainError(f"radius must be nonnegative, got {rho}")
    if m == 0:
        return ScaledValue.one()  # J_0(0) = 1 is the global maximum
    if rho == 0.0:
        return ScaledValue.zero()
    limit = _series_limit(m)
    if rho <= m:
        # monotone region
        return bessel_j(m, rho) if rho > limit else _series_value(m, rho)
    x_star = _first_slope_change_in_series_zone(m, min(rho, limit))
    if x_star is not None:
        return _series_value(m, x_star)
    if rho <= limit:
        return _series_value(m, rho)
    c0, c1 = _coefficients(m)
    y, yp, off = _handoff_state(m, limit)
    sol = integrate_linear(c0, c1, limit, y, yp, rho, offset0=off,
                           rtol=1e-12,
                           capture_zeros=False,
                           stop_after_extremum_past=0.0)
    if sol.extrema:
        ex, ey, eoff = sol.extrema[0]
        return ScaledValue.from_log(1 if ey > 0 else -1,
                                    math.log(abs(ey)) + eoff)
    yv = float(sol.ys[-1])
    return ScaledValue.from_log(1 if yv > 0 else -1,
                                math.log(abs(yv)) + float(sol.offsets[-1]))
