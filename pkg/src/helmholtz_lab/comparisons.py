"""Closed-form comparison solutions and executable comparison theorems.

The radial profiles all live in Sturm-Liouville form (p y')' + q y = 0 with
p = sin_kappa.  This module provides the solvable comparators (pure powers
of tan_kappa(rho/2), their flat Euler limit, oscillatory solutions of the
same family) and three checks that turn the classical theorems into
pass/fail instruments on concrete inputs: domination with matched initial
data, zero interlacing, and decreasing extrema under a (pq)' > 0 witness.
Every check reports a BoundReport; violated hypotheses raise
PreconditionError naming the failed hypothesis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .bessel import bessel_j_grid
from .errors import DomainError, PreconditionError
from .geometry import cos_kappa, log_tan_kappa_half, sin_kappa
from .scaling import ScaledValue

_COMPARE_SLACK = 1e-12  # verdict slack for <=-type reports

_KINDS = ("euler_power", "curved_power", "curved_oscillatory",
          "flat_oscillatory")


def _as_scaled(c) -> ScaledValue:
    return c if isinstance(c, ScaledValue) else ScaledValue.from_float(float(c))


def _saturating_ratio(num: ScaledValue, den: ScaledValue) -> float:
    """num/den as a float, saturating instead of overflowing."""
    if den.is_zero():
        return math.inf if not num.is_zero() else 0.0
    if num.is_zero():
        return 0.0
    t = num.log_abs - den.log_abs
    if t > 709.0:
        return math.inf * num.sign * den.sign
    return num.sign * den.sign * math.exp(t)


@dataclass
class BoundReport:
    """Outcome of a single inequality check, serializable to JSON."""

    kind: str
    lhs: ScaledValue
    rhs: ScaledValue
    margin: float
    params: dict
    verdict: bool

    @staticmethod
    def from_leq(kind: str, lhs: ScaledValue, rhs: ScaledValue,
                 params: dict) -> "BoundReport":
        verdict = lhs <= rhs * (1.0 + _COMPARE_SLACK)
        margin = _saturating_ratio(rhs, lhs) - 1.0
        return BoundReport(kind, lhs, rhs, margin, dict(params), verdict)

    def to_json_dict(self) -> dict:
        return {
            "kind": self.kind,
            "params": _plain(self.params),
            "lhs_log": _log_field(self.lhs),
            "rhs_log": _log_field(self.rhs),
            "margin": self.margin,
            "verdict": self.verdict,
        }


def _log_field(v: ScaledValue):
    if v.is_zero():
        return {"sign": 0, "log_abs": None}
    return {"sign": v.sign, "log_abs": v.log_abs}


def _plain(obj):
    if isinstance(obj, dict):
        return {k: _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, ScaledValue):
        return _log_field(obj)
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    return obj


@dataclass(frozen=True)
class ComparatorSpec:
    """Parameter bundle for one closed-form comparator on an interval."""

    kind: str
    params: dict
    interval: tuple

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise DomainError(f"unknown comparator kind {self.kind!r}")
        p = self.params
        if "beta" in p and "delta" in p:
            want = math.sqrt(max(0.0, 1.0 - p["delta"] ** 2))
            if abs(p["beta"] - want) > 1e-12:
                raise DomainError(
                    f"beta = {p['beta']} inconsistent with delta = "
                    f"{p['delta']} (expected sqrt(1 - delta^2) = {want})")
        if "gamma" in p and "xi" in p:
            m = p.get("m", 1.0)
            want = m * math.sqrt(p["xi"] ** 2 - 1.0)
            if abs(p["gamma"] - want) > 1e-12 * max(1.0, want):
                raise DomainError(
                    f"gamma = {p['gamma']} inconsistent with xi = {p['xi']}")
        a, b = self.interval
        if not b > a:
            raise DomainError(f"interval reversed: [{a}, {b}]")


def euler_solution(m: float, beta: float, c1, c2, x: float) -> ScaledValue:
    """c1 x^(m beta) + c2 x^(-m beta); solves (x y')' - (m beta)^2 y / x = 0."""
    if x <= 0:
        raise DomainError(f"need x > 0, got {x}")
    exponent = m * beta * math.log(x)
    return (_as_scaled(c1) * ScaledValue.from_log(1, exponent)
            + _as_scaled(c2) * ScaledValue.from_log(1, -exponent))


def curved_power_solution(kappa: float, m: float, beta: float, c1, c2,
                          rho: float) -> ScaledValue:
    """c1 t^(m beta) + c2 t^(-m beta) with t = tan_kappa(rho/2)."""
    if rho <= 0:
        raise DomainError(f"need rho > 0, got {rho}")
    tau = log_tan_kappa_half(kappa, rho)
    exponent = m * beta * tau
    return (_as_scaled(c1) * ScaledValue.from_log(1, exponent)
            + _as_scaled(c2) * ScaledValue.from_log(1, -exponent))


def oscillatory_solution(kappa: float, xi: float, C1: float, C2: float,
                         d: float, rho: float, m: float = 1.0) -> ScaledValue:
    """C1 cos(g tau - d) + C2 sin(g tau - d), tau = log tan_kappa(rho/2),
    g = m sqrt(xi^2 - 1); bounded by sqrt(C1^2 + C2^2)."""
    if xi <= 1.0:
        raise DomainError(f"need xi > 1, got {xi}")
    if rho <= 0:
        raise DomainError(f"need rho > 0, got {rho}")
    gamma = m * math.sqrt(xi * xi - 1.0)
    phase = gamma * log_tan_kappa_half(kappa, rho) - d
    return ScaledValue.from_float(C1 * math.cos(phase) + C2 * math.sin(phase))


def finite_difference_residual(y, p, q, rho: float, h: float = 1e-5) -> float:
    """Relative residual of (p y')' + q y at rho from plain float callables."""
    left = p(rho - h / 2) * (y(rho) - y(rho - h)) / h
    right = p(rho + h / 2) * (y(rho + h) - y(rho)) / h
    second = (right - left) / h
    source = q(rho) * y(rho)
    scale = abs(second) + abs(source) + 1e-300
    return abs(second + source) / scale


# --- sides for the domination check ------------------------------------
# A side exposes: kappa (None for the flat Euler weight p = x), p(rho),
# q(rho), value(rho) / derivative(rho) as ScaledValues, and values_on(xs)
# returning (signs, log_abs) arrays.


class _SideBase:
    kappa: float | None = None
    label = "side"

    def p(self, rho: float) -> float:
        if self.kappa is None:
            return rho
        return sin_kappa(self.kappa, rho)

    def values_on(self, xs):
        signs = np.zeros(len(xs), dtype=int)
        logs = np.full(len(xs), -np.inf)
        for i, x in enumerate(xs):
            v = self.value(float(x))
            if not v.is_zero():
                signs[i] = v.sign
                logs[i] = v.log_abs
        return signs, logs


class ProfileSide(_SideBase):
    """Radial profile as a domination-check side."""

    def __init__(self, profile):
        self.profile = profile
        self.kappa = profile.context.kappa
        self.m = profile.m
        self.label = f"profile(m={profile.m}, kappa={self.kappa})"

    def q(self, rho: float) -> float:
        s = sin_kappa(self.kappa, rho)
        return (s * s - self.m ** 2) / s

    def value(self, rho: float) -> ScaledValue:
        return self.profile.evaluate(rho)

    def derivative(self, rho: float) -> ScaledValue:
        return self.profile.evaluate_pair(rho)[1]

    def values_on(self, xs):
        signs, logs, _, _ = self.profile.log_eval_sorted(
            [float(x) for x in xs])
        return signs, logs


class PowerSide(_SideBase):
    """y = c1 t^(m beta) + c2 t^(-m beta), t = tan_kappa(rho/2)."""

    def __init__(self, kappa: float, m: float, beta: float, c1, c2):
        self.kappa = kappa
        self.m = m
        self.beta = beta
        self.c1 = _as_scaled(c1)
        self.c2 = _as_scaled(c2)
        self.label = f"curved_power(m={m}, beta={beta})"

    def q(self, rho: float) -> float:
        return -(self.beta * self.m) ** 2 / sin_kappa(self.kappa, rho)

    def _parts(self, rho: float):
        e = self.m * self.beta * log_tan_kappa_half(self.kappa, rho)
        return (self.c1 * ScaledValue.from_log(1, e),
                self.c2 * ScaledValue.from_log(1, -e))

    def value(self, rho: float) -> ScaledValue:
        u, v = self._parts(rho)
        return u + v

    def derivative(self, rho: float) -> ScaledValue:
        u, v = self._parts(rho)
        fac = self.m * self.beta / sin_kappa(self.kappa, rho)
        return (u - v) * fac


class EulerSide(_SideBase):
    """y = c1 x^(m beta) + c2 x^(-m beta) on the flat weight p = x."""

    kappa = None

    def __init__(self, m: float, beta: float, c1, c2):
        self.m = m
        self.beta = beta
        self.c1 = _as_scaled(c1)
        self.c2 = _as_scaled(c2)
        self.label = f"euler_power(m={m}, beta={beta})"

    def q(self, x: float) -> float:
        return -(self.beta * self.m) ** 2 / x

    def _parts(self, x: float):
        e = self.m * self.beta * math.log(x)
        return (self.c1 * ScaledValue.from_log(1, e),
                self.c2 * ScaledValue.from_log(1, -e))

    def value(self, x: float) -> ScaledValue:
        u, v = self._parts(x)
        return u + v

    def derivative(self, x: float) -> ScaledValue:
        u, v = self._parts(x)
        return (u - v) * (self.m * self.beta / x)


class BesselSide(_SideBase):
    """J_m on the flat weight p = x."""

    kappa = None

    def __init__(self, m: float):
        self.m = m
        self.label = f"bessel(m={m})"

    def q(self, x: float) -> float:
        return (x * x - self.m ** 2) / x

    def value(self, x: float) -> ScaledValue:
        return bessel_j_grid(self.m, [x])[0]

    def derivative(self, x: float) -> ScaledValue:
        jm, jm1 = bessel_j_grid(self.m, [x]), bessel_j_grid(self.m + 1, [x])
        return jm[0] * (self.m / x) - jm1[0]

    def values_on(self, xs):
        vals = bessel_j_grid(self.m, [float(x) for x in xs])
        signs = np.array([v.sign for v in vals], dtype=int)
        logs = np.array([v.log_abs for v in vals])
        return signs, logs


class OscillatorySide(_SideBase):
    """C1 cos(g tau - d) + C2 sin(g tau - d) on p = sin_kappa."""

    def __init__(self, kappa: float, xi: float, C1: float, C2: float,
                 d: float, m: float = 1.0):
        self.kappa = kappa
        self.xi = xi
        self.C1 = C1
        self.C2 = C2
        self.d = d
        self.m = m
        self.label = f"oscillatory(xi={xi}, m={m})"

    def q(self, rho: float) -> float:
        return self.m ** 2 * (self.xi ** 2 - 1.0) / sin_kappa(self.kappa, rho)

    def value(self, rho: float) -> ScaledValue:
        return oscillatory_solution(self.kappa, self.xi, self.C1, self.C2,
                                    self.d, rho, self.m)

    def derivative(self, rho: float) -> ScaledValue:
        gamma = self.m * math.sqrt(self.xi ** 2 - 1.0)
        phase = gamma * log_tan_kappa_half(self.kappa, rho) - self.d
        dy = (-self.C1 * math.sin(phase) + self.C2 * math.cos(phase))
        return ScaledValue.from_float(
            dy * gamma / sin_kappa(self.kappa, rho))


def matched_power_side(profile, rho1: float, beta: float) -> PowerSide:
    """Power comparator agreeing with the profile in value and slope at
    rho1."""
    val, slope = profile.evaluate_pair(rho1)
    B = beta * profile.m
    s1 = sin_kappa(profile.context.kappa, rho1)
    u = (val + slope * (s1 / B)) * 0.5
    v = (val - slope * (s1 / B)) * 0.5
    tau1 = log_tan_kappa_half(profile.context.kappa, rho1)
    c1 = u * ScaledValue.from_log(1, -B * tau1)
    c2 = v * ScaledValue.from_log(1, B * tau1)
    return PowerSide(profile.context.kappa, profile.m, beta, c1, c2)


def matched_euler_side(m: float, beta: float, value: ScaledValue,
                       derivative: ScaledValue, x1: float) -> EulerSide:
    """Euler comparator agreeing with (value, derivative) at x1."""
    B = beta * m
    u = (value + derivative * (x1 / B)) * 0.5
    v = (value - derivative * (x1 / B)) * 0.5
    c1 = u * ScaledValue.from_log(1, -B * math.log(x1))
    c2 = v * ScaledValue.from_log(1, B * math.log(x1))
    return EulerSide(m, beta, c1, c2)


def _check_shared_p(low, high, a: float, b: float) -> None:
    if (low.kappa is None) != (high.kappa is None):
        raise PreconditionError("shared_p",
                                f"{low.label} and {high.label} use different "
                                "weight families")
    for x in np.linspace(a, b, 33):
        pl, ph = low.p(float(x)), high.p(float(x))
        if abs(pl - ph) > 1e-9 * max(abs(pl), abs(ph), 1e-30):
            raise PreconditionError(
                "shared_p", f"p differs at rho = {x}: {pl} vs {ph}")


def _check_initial_match(low, high, a: float) -> None:
    vl, vh = low.value(a), high.value(a)
    dl, dh = low.derivative(a), high.derivative(a)
    for name, x, y in (("value", vl, vh), ("derivative", dl, dh)):
        if x.sign < 0 or y.sign < 0:
            raise PreconditionError(
                "initial_data", f"initial {name} negative at rho = {a}")
        diff = abs(x - y)
        scale = max(abs(x), abs(y))
        if not diff.is_zero():
            if scale.is_zero() or diff.log_abs > scale.log_abs + math.log(1e-8):
                raise PreconditionError(
                    "initial_data",
                    f"initial {name} mismatch at rho = {a}: {x} vs {y}")


def sturm_dominates(side_low, side_high, interval, *,
                    grid_points: int = 10_000,
                    slack: float = 1e-10) -> BoundReport:
    """Comparison-theorem check: with shared weight p, q_low >= q_high on
    the interval, and matched nonnegative initial data, the low side stays
    below the high side.  Verdict from a dense grid; hypothesis failures
    raise PreconditionError with the hypothesis name."""
    a, b = float(interval[0]), float(interval[1])
    if not b > a or a <= 0:
        raise PreconditionError("interval",
                                f"need 0 < a < b, got [{a}, {b}]")
    _check_shared_p(side_low, side_high, a, b)
    grid = np.linspace(a, b, grid_points)
    for x in grid[::7]:
        ql, qh = side_low.q(float(x)), side_high.q(float(x))
        if ql < qh - slack * max(abs(ql), abs(qh), 1.0):
            raise PreconditionError(
                "q_ordering",
                f"q_low < q_high at rho = {x}: {ql} < {qh}")
    _check_initial_match(side_low, side_high, a)

    s_lo, l_lo = side_low.values_on(grid)
    s_hi, l_hi = side_high.values_on(grid)
    worst = ScaledValue.zero()
    ok = True
    for i in range(len(grid)):
        if s_lo[i] <= 0:
            continue  # nonpositive low side can never exceed a bound from above
        if s_hi[i] <= 0:
            ok = False
            worst = ScaledValue.from_log(1, 709.0)
            continue
        r = ScaledValue.from_log(1, l_lo[i] - l_hi[i])
        if r > worst:
            worst = r
    rhs = ScaledValue.from_float(1.0 + slack)
    report = BoundReport.from_leq(
        "sturm_dominates", worst, rhs,
        {"low": side_low.label, "high": side_high.label,
         "interval": [a, b], "grid_points": grid_points, "slack": slack})
    report.verdict = report.verdict and ok
    return report


def picone_interlaces(zeros_coarse, zeros_fine, interval) -> BoundReport:
    """Every open gap between consecutive coarse zeros inside the interval
    must contain a fine zero."""
    coarse = [float(z) for z in zeros_coarse]
    fine = [float(z) for z in zeros_fine]
    for name, zs in (("coarse", coarse), ("fine", fine)):
        if any(zs[i] >= zs[i + 1] for i in range(len(zs) - 1)):
            raise PreconditionError(
                "sorted_zeros", f"{name} zero list not strictly increasing")
    a, b = float(interval[0]), float(interval[1])
    if not b > a:
        raise PreconditionError("interval", f"need a < b, got [{a}, {b}]")
    inside = [z for z in coarse if a <= z <= b]
    gaps = 0
    bad = 0
    fine_arr = np.asarray(fine)
    for z1, z2 in zip(inside, inside[1:]):
        gaps += 1
        lo = np.searchsorted(fine_arr, z1, side="right")
        if lo >= len(fine_arr) or fine_arr[lo] >= z2:
            bad += 1
    lhs = (ScaledValue.from_float(bad / gaps) if gaps
           else ScaledValue.zero())
    return BoundReport.from_leq(
        "picone_interlaces", lhs, ScaledValue.zero(),
        {"interval": [a, b], "gaps": gaps, "empty_gaps": bad,
         "coarse_count": len(inside), "fine_count": len(fine)})


def radial_pq_witness(kappa: float):
    """(pq)' for the radial family: 2 cos_kappa sin_kappa, independent of
    the order."""
    def witness(rho: float) -> float:
        return 2.0 * cos_kappa(kappa, rho) * sin_kappa(kappa, rho)
    return witness


def sonin_polya_holds(extrema, pq_increasing_witness, *,
                      grid_points: int = 10_000,
                      slack: float = 1e-10) -> BoundReport:
    """Decreasing-extrema check under a verified (pq)' > 0 witness."""
    ex = [(float(r), v if isinstance(v, ScaledValue)
           else ScaledValue.from_float(float(v))) for r, v in extrema]
    if len(ex) >= 2:
        lo, hi = ex[0][0], ex[-1][0]
        if lo > 0 or hi > 0:
            grid = np.linspace(max(lo, 1e-12), hi, grid_points)
            for x in grid:
                w = pq_increasing_witness(float(x))
                if w <= -slack:
                    raise PreconditionError(
                        "pq_monotonicity",
                        f"(pq)' = {w} not positive at rho = {x}")
    worst = ScaledValue.zero()
    for (_, v1), (_, v2) in zip(ex, ex[1:]):
        if v1.is_zero():
            worst = ScaledValue.from_log(1, 709.0)
            continue
        r = abs(v2) / abs(v1)
        if r > worst:
            worst = r
    rhs = ScaledValue.from_float(1.0 + slack)
    return BoundReport.from_leq(
        "sonin_polya", worst, rhs,
        {"extrema_count": len(ex), "slack": slack})
