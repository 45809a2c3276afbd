"""Radial profiles of separated Helmholtz solutions on constant-curvature
surfaces.

The profile L solves, in nondimensional radius x = k * rho_physical,

    (sin_kappa(x) L')' + ((sin_kappa(x)^2 - m^2) / sin_kappa(x)) L = 0,

normalized so L ~ (2^-m / Gamma(m+1)) x^m at the origin; at kappa = 0 this is
exactly J_m.  Integration starts from a Frobenius series at a small radius
(the indicial point x = 0 is regular-singular) and proceeds with the
renormalizing high-order stepper; zeros and extrema are event-located.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .geometry import CurvatureContext, cot_kappa, sin_kappa
from .ode import LinearSolution, integrate_linear
from .scaling import ScaledValue

_CSV_HEADER = "rho,sign,log_abs_L,log_abs_dL"


def _series_coefficients(kappa: float, m: float):
    """Coefficients of L = pref * x^m (1 + a x^2 + b x^4) obtained by
    substituting the ansatz into the Sturm-Liouville equation."""
    a = kappa * m / 12.0 - 1.0 / (4.0 * (m + 1.0))
    b = -(a * (1.0 - kappa * (m + 2.0) * (m + 3.0) / 3.0)
          + 2.0 * kappa ** 2 * m * (m + 2.0) / 45.0
          - kappa / 3.0) / (8.0 * (m + 2.0))
    return a, b


def _start_radius(m: float) -> float:
    # keeps the truncated-series relative error below ~1e-14
    return min(1e-2, 1e-2 / math.sqrt(1.0 + m))


def frobenius_start(kappa: float, m: float, rho0: float):
    """(L, L') at rho0 as ScaledValues, from the origin series."""
    if m < 0:
        raise DomainError(f"order must be nonnegative, got {m}")
    if rho0 <= 0:
        raise DomainError(f"start radius must be positive, got {rho0}")
    a, b = _series_coefficients(kappa, m)
    r2 = rho0 * rho0
    bracket = 1.0 + r2 * (a + r2 * b)
    dbracket = m + r2 * ((m + 2.0) * a + r2 * (m + 4.0) * b)
    log_pref = -m * math.log(2.0) - math.lgamma(m + 1.0) + m * math.log(rho0)
    val = ScaledValue.from_log(1 if bracket > 0 else -1,
                               log_pref + math.log(abs(bracket)))
    if dbracket == 0.0:
        slope = ScaledValue.zero()
    else:
        slope = ScaledValue.from_log(
            1 if dbracket > 0 else -1,
            log_pref - math.log(rho0) + math.log(abs(dbracket)))
    return val, slope


def _profile_coefficients(kappa: float, m: float):
    m2 = m * m

    def c0(x):
        s = sin_kappa(kappa, x)
        return 1.0 - m2 / (s * s)

    def c1(x):
        return cot_kappa(kappa, x)

    return c0, c1


def _to_scaled(y: float, offset: float) -> ScaledValue:
    if y == 0.0:
        return ScaledValue.zero()
    return ScaledValue.from_log(1 if y > 0 else -1, math.log(abs(y)) + offset)


@dataclass
class RadialProfile:
    """A sampled radial solution with derivative, renormalization ledger,
    extrema, and zeros.  Node values live in renormalized units inside
    ``solution``; the accessors return ScaledValues."""

    context: CurvatureContext
    m: float
    rho0: float
    series_a: float
    series_b: float
    log_pref0: float  # log of 2^-m / Gamma(m+1)
    solution: LinearSolution
    rho_max: float

    @property
    def grid(self) -> np.ndarray:
        return self.solution.xs

    @property
    def renorm_ledger(self) -> list:
        return self.solution.renorm_events

    @property
    def zeros(self) -> list[float]:
        return [z for z in self.solution.zeros]

    @property
    def extrema(self) -> list[tuple[float, ScaledValue]]:
        """(rho*, |L(rho*)|) per located interior extremum; for m = 0 the
        origin is a critical point (the global maximum) and leads the list."""
        out = []
        if self.m == 0:
            out.append((0.0, ScaledValue.one()))
        for x, y, off in self.solution.extrema:
            out.append((x, abs(_to_scaled(y, off))))
        return out

    def node(self, i: int) -> tuple[float, ScaledValue, ScaledValue]:
        """(rho, L, L') at grid node i."""
        s = self.solution
        return (float(s.xs[i]), _to_scaled(float(s.ys[i]), float(s.offsets[i])),
                _to_scaled(float(s.yps[i]), float(s.offsets[i])))

    def _series_pair(self, rho: float):
        a, b = self.series_a, self.series_b
        if rho == 0.0:
            if self.m == 0:
                return ScaledValue.one(), ScaledValue.zero()
            return ScaledValue.zero(), (
                ScaledValue.from_log(1, self.log_pref0) if self.m == 1
                else ScaledValue.zero())
        r2 = rho * rho
        bracket = 1.0 + r2 * (a + r2 * b)
        dbracket = self.m + r2 * ((self.m + 2.0) * a + r2 * (self.m + 4.0) * b)
        log_base = self.log_pref0 + self.m * math.log(rho)
        val = ScaledValue.from_log(1 if bracket > 0 else -1,
                                   log_base + math.log(abs(bracket)))
        if dbracket == 0.0:
            return val, ScaledValue.zero()
        slope = ScaledValue.from_log(
            1 if dbracket > 0 else -1,
            log_base - math.log(rho) + math.log(abs(dbracket)))
        return val, slope

    def evaluate_pair(self, rho: float) -> tuple[ScaledValue, ScaledValue]:
        """(L, L') anywhere in [0, rho_max]."""
        if rho < 0:
            raise DomainError(f"radius must be nonnegative, got {rho}")
        if rho < self.rho0:
            return self._series_pair(rho)
        y, yp, off = self.solution.evaluate(rho)
        return _to_scaled(y, off), _to_scaled(yp, off)

    def evaluate(self, rho: float) -> ScaledValue:
        return self.evaluate_pair(rho)[0]

    def log_eval_sorted(self, rhos):
        """(sign_L, log|L|, sign_dL, log|dL|) arrays at ascending radii
        >= rho0; the bulk evaluator behind quadrature."""
        ys, yps, offs = self.solution.evaluate_sorted(rhos)
        n = len(ys)
        sl = np.zeros(n, dtype=int)
        ll = np.full(n, -np.inf)
        sd = np.zeros(n, dtype=int)
        ld = np.full(n, -np.inf)
        for i in range(n):
            y, yp, off = ys[i], yps[i], offs[i]
            if y != 0.0:
                sl[i] = 1 if y > 0 else -1
                ll[i] = math.log(abs(y)) + off
            if yp != 0.0:
                sd[i] = 1 if yp > 0 else -1
                ld[i] = math.log(abs(yp)) + off
        return sl, ll, sd, ld

    def sl_residuals(self, stride: int = 1, substeps: int = 64) -> np.ndarray:
        """Per-interval defect of the stored profile against the equation.

        Each sampled grid interval is re-integrated with a classical
        fourth-order scheme at fine substeps (a different tableau than the
        production stepper, so the check is independent); the result is the
        relative mismatch at the right node.  The accepted steps already
        resolve the local scale, which keeps the checker's own truncation
        a few orders below the tolerance it certifies.
        """
        c0 = self.solution.c0
        c1 = self.solution.c1
        s = self.solution
        out = []

        def rhs(x, y, yp):
            return yp, -c1(x) * yp - c0(x) * y

        for i in range(0, len(s.xs) - 1, stride):
            x = float(s.xs[i])
            h = (float(s.xs[i + 1]) - x) / substeps
            y, yp = float(s.ys[i]), float(s.yps[i])
            for j in range(substeps):
                xj = x + j * h
                k1y, k1p = rhs(xj, y, yp)
                k2y, k2p = rhs(xj + h / 2, y + h / 2 * k1y, yp + h / 2 * k1p)
                k3y, k3p = rhs(xj + h / 2, y + h / 2 * k2y, yp + h / 2 * k2p)
                k4y, k4p = rhs(xj + h, y + h * k3y, yp + h * k3p)
                y += h / 6 * (k1y + 2 * k2y + 2 * k3y + k4y)
                yp += h / 6 * (k1p + 2 * k2p + 2 * k3p + k4p)
            shift = float(s.offsets[i + 1]) - float(s.offsets[i])
            fac = math.exp(-shift)
            scale = max(abs(float(s.ys[i + 1])), abs(float(s.yps[i + 1])))
            diff = max(abs(y * fac - float(s.ys[i + 1])),
                       abs(yp * fac - float(s.yps[i + 1])))
            out.append(diff / scale)
        return np.asarray(out)

    def to_csv(self, target) -> None:
        """Write the node table (columns rho, sign, log_abs_L, log_abs_dL,
        natural logs, 17 significant digits)."""
        close = False
        if isinstance(target, (str, bytes)):
            fh = open(target, "w")
            close = True
        else:
            fh = target
        try:
            fh.write(_CSV_HEADER + "\n")
            s = self.solution
            for i in range(len(s.xs)):
                L = _to_scaled(float(s.ys[i]), float(s.offsets[i]))
                dL = _to_scaled(float(s.yps[i]), float(s.offsets[i]))
                fh.write("%.17g,%d,%.17g,%.17g\n"
                         % (s.xs[i], L.sign, L.log_abs, dL.log_abs))
        finally:
            if close:
                fh.close()

    def to_csv_text(self) -> str:
        buf = io.StringIO()
        self.to_csv(buf)
        return buf.getvalue()


def integrate_radial(context: CurvatureContext, m: float, rho_max: float, *,
                     rtol: float = 1e-10, atol: float = 1e-300,
                     stop_after_extremum_past: float | None = None
                     ) -> RadialProfile:
    """Integrate the radial profile out to rho_max (nondimensional units).

    For kappa > 0 the chart ends at pi/sqrt(kappa); rho_max must stay inside.
    """
    if m < 0:
        raise DomainError(f"order must be nonnegative, got {m}")
    kappa = context.kappa
    if kappa > 0 and rho_max >= context.domain_limit:
        raise DomainError(
            f"rho_max = {rho_max} reaches the polar chart limit "
            f"{context.domain_limit} for kappa = {kappa}")
    rho0 = _start_radius(m)
    if rho_max <= rho0:
        raise DomainError(f"rho_max = {rho_max} must exceed the series "
                          f"start radius {rho0}")
    val, slope = frobenius_start(kappa, m, rho0)
    base = max(val.log_abs, slope.log_abs)
    y0 = val.sign * math.exp(val.log_abs - base)
    yp0 = slope.sign * math.exp(slope.log_abs - base) if slope.sign else 0.0
    c0, c1 = _profile_coefficients(kappa, m)
    sol = integrate_linear(c0, c1, rho0, y0, yp0, rho_max, rtol=rtol,
                           atol=atol, offset0=base,
                           stop_after_extremum_past=stop_after_extremum_past)
    a, b = _series_coefficients(kappa, m)
    log_pref0 = -m * math.log(2.0) - math.lgamma(m + 1.0)
    return RadialProfile(context, m, rho0, a, b, log_pref0, sol,
                         float(sol.xs[-1]))


def extrema_envelope(profile: RadialProfile):
    """(rho*, |L|) at each located extremum, in order."""
    return profile.extrema


@dataclass
class MaxFunction:
    """rho -> max over [0, rho] of |L|, built from located extrema plus the
    endpoint value (between extrema |L| is monotone, so these are the only
    candidates)."""

    profile: RadialProfile

    def __call__(self, rho: float) -> ScaledValue:
        best = ScaledValue.zero()
        for x, v in self.profile.extrema:
            if x > rho:
                break
            if v > best:
                best = v
        tail = abs(self.profile.evaluate(rho))
        return tail if tail > best else best


def max_function(profile: RadialProfile) -> MaxFunction:
    return MaxFunction(profile)
