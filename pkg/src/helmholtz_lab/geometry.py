"""Generalized trigonometry for constant curvature.

sin_kappa is the solution of y'' = -kappa * y with y(0) = 0, y'(0) = 1; it
interpolates sin, the identity, and sinh as the curvature crosses zero.  All
functions take the dimensionless curvature kappa = K / k**2 and a
nondimensional radius rho = k * rho_physical.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError

# Below this value of |kappa| * rho**2 a single closed-form branch loses
# digits to cancellation; a short Taylor series in u = kappa * rho**2 is
# exact to ~1e-16 there and keeps sin_kappa continuous across kappa = 0.
_SERIES_CUT = 1e-4
# sinh overflows doubles just past this argument.
_SINH_MAX = 709.0


def sin_kappa(kappa: float, rho: float) -> float:
    if rho < 0:
        raise DomainError(f"sin_kappa needs rho >= 0, got {rho}")
    u = kappa * rho * rho
    if abs(u) < _SERIES_CUT:
        return rho * (1.0 + u * (-1.0 / 6.0 + u * (1.0 / 120.0 - u / 5040.0)))
    if kappa > 0:
        s = math.sqrt(kappa)
        return math.sin(s * rho) / s
    s = math.sqrt(-kappa)
    if s * rho > _SINH_MAX:
        return math.inf
    return math.sinh(s * rho) / s


def cos_kappa(kappa: float, rho: float) -> float:
    """Derivative of sin_kappa."""
    if rho < 0:
        raise DomainError(f"cos_kappa needs rho >= 0, got {rho}")
    u = kappa * rho * rho
    if abs(u) < _SERIES_CUT:
        return 1.0 + u * (-0.5 + u * (1.0 / 24.0 - u / 720.0))
    if kappa > 0:
        return math.cos(math.sqrt(kappa) * rho)
    s = math.sqrt(-kappa)
    if s * rho > _SINH_MAX:
        return math.inf
    return math.cosh(s * rho)


def tan_kappa_half(kappa: float, rho: float) -> float:
    """tan_kappa evaluated at rho/2, the variable of the power comparators."""
    half = 0.5 * rho
    c = cos_kappa(kappa, half)
    if c == 0.0:
        raise DomainError(f"tan_kappa_half pole at rho = {rho}")
    return sin_kappa(kappa, half) / c


def log_tan_kappa_half(kappa: float, rho: float) -> float:
    """log of tan_kappa(rho/2); requires 0 < rho (< pi/sqrt(kappa) if curved
    positively) so the argument is positive.  Comparator solutions are powers
    tan_kappa(rho/2)**(beta*m) with beta*m in the hundreds, so they are
    assembled from this log rather than from the value."""
    if rho <= 0:
        raise DomainError(f"log_tan_kappa_half needs rho > 0, got {rho}")
    t = tan_kappa_half(kappa, rho)
    if t <= 0:
        raise DomainError(
            f"tan_kappa(rho/2) = {t} not positive at rho = {rho}; "
            "rho is past the polar chart")
    return math.log(t)


def cot_kappa(kappa: float, rho: float) -> float:
    s = sin_kappa(kappa, rho)
    if s == 0.0:
        raise DomainError(f"cot_kappa pole at rho = {rho}")
    return cos_kappa(kappa, rho) / s


def inv_sin_kappa(kappa: float, s: float) -> float:
    """The unique rho in [0, R_kappa] with sin_kappa(rho) = s."""
    if s < 0:
        raise DomainError(f"inv_sin_kappa needs s >= 0, got {s}")
    if kappa == 0:
        return s
    if kappa > 0:
        root = math.sqrt(kappa)
        x = s * root
        if x > 1.0:
            raise DomainError(
                f"s = {s} exceeds the range 1/sqrt(kappa) = {1.0 / root} "
                f"of sin_kappa at kappa = {kappa}")
        return math.asin(x) / root
    root = math.sqrt(-kappa)
    return math.asinh(s * root) / root


@dataclass(frozen=True, slots=True)
class CutoffRadii:
    """Nondimensional cutoff radii attached to a curvature.

    r_kappa bounds the region where sin_kappa is increasing (infinite for
    kappa <= 0); r_abs_kappa = pi / (2 sqrt(|kappa|)) is the radius the
    curved comparison estimates are stated on.  Infinite values are IEEE
    infinities, which compare and test correctly, not sentinels.
    """

    r_kappa: float
    r_abs_kappa: float


def cutoff_radii(kappa: float) -> CutoffRadii:
    r_kappa = math.inf if kappa <= 0 else math.pi / (2.0 * math.sqrt(kappa))
    r_abs = math.inf if kappa == 0 else math.pi / (2.0 * math.sqrt(abs(kappa)))
    return CutoffRadii(r_kappa, r_abs)


@dataclass(frozen=True, slots=True)
class CurvatureContext:
    """Sectional curvature K, wave number k, and kappa = K / k**2.

    Radial problems are posed in nondimensional variables: rho = k * (physical
    radius), curvature kappa.  k > 0 always; the three constructors keep
    kappa * k**2 == K consistent to 1e-14 relative.
    """

    K: float
    k: float
    kappa: float

    def __post_init__(self):
        if not (self.k > 0 and math.isfinite(self.k)):
            raise DomainError(f"wave number must be positive, got {self.k}")
        scale = max(abs(self.K), abs(self.kappa) * self.k ** 2, 1e-300)
        if abs(self.kappa * self.k ** 2 - self.K) > 1e-14 * scale:
            raise DomainError(
                f"inconsistent curvature triple: kappa*k^2 = "
                f"{self.kappa * self.k ** 2} but K = {self.K}")

    @staticmethod
    def from_physical(K: float, k: float) -> "CurvatureContext":
        if not (k > 0 and math.isfinite(k)):
            raise DomainError(f"wave number must be positive, got {k}")
        return CurvatureContext(K, k, K / k ** 2)

    @staticmethod
    def from_kappa(kappa: float, k: float = 1.0) -> "CurvatureContext":
        if not (k > 0 and math.isfinite(k)):
            raise DomainError(f"wave number must be positive, got {k}")
        return CurvatureContext(kappa * k ** 2, k, kappa)

    @property
    def space(self) -> str:
        if self.K > 0:
            return "spherical"
        if self.K < 0:
            return "hyperbolic"
        return "flat"

    @property
    def radii(self) -> CutoffRadii:
        return cutoff_radii(self.kappa)

    @property
    def domain_limit(self) -> float:
        """Upper end of the polar chart in nondimensional units:
        pi/sqrt(kappa) on the sphere, infinite otherwise."""
        if self.kappa > 0:
            return math.pi / math.sqrt(self.kappa)
        return math.inf
