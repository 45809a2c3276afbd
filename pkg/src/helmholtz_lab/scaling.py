"""Sign/mantissa/exponent triples for values spanning hundreds of orders of
magnitude.

A ``ScaledValue`` represents sign * mantissa * e**exponent with the mantissa
normalized to [1, e) (or exactly 0).  Radial profiles behave like
c * tan(rho/2)**(beta*m) and leave the double range long before the regions of
interest, so every quantity that crosses module boundaries travels in this
form; plain floats appear only inside a single renormalized integration
segment.

A pure log representation is deliberately not used: profiles change sign, and
the sign is load-bearing (zero locations feed the interlacing checks).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

_LOG_E = 1.0  # exponents are base-e by construction
# Terms this many e-folds below the larger addend are beyond double
# resolution (e^-80 ~ 1.8e-35 << 2^-53) and are dropped exactly.
_ADD_CUTOFF = 80.0


@dataclass(frozen=True, slots=True)
class ScaledValue:
    sign: int
    mantissa: float
    exponent: int

    # -- construction ------------------------------------------------------

    @staticmethod
    def zero() -> "ScaledValue":
        return ScaledValue(0, 0.0, 0)

    @staticmethod
    def one() -> "ScaledValue":
        return ScaledValue(1, 1.0, 0)

    @staticmethod
    def from_log(sign: int, log_abs: float) -> "ScaledValue":
        """Build sign * e**log_abs.  sign == 0 yields zero regardless of log_abs."""
        if sign == 0:
            return ScaledValue.zero()
        if not math.isfinite(log_abs):
            raise ValueError(f"log_abs must be finite, got {log_abs}")
        exponent = math.floor(log_abs)
        mantissa = math.exp(log_abs - exponent)
        if mantissa >= math.e:  # guard against exp rounding at the seam
            mantissa /= math.e
            exponent += 1
        return ScaledValue(1 if sign > 0 else -1, mantissa, exponent)

    @staticmethod
    def from_float(x: float, exponent_offset: int = 0) -> "ScaledValue":
        """Exact-double conversion; exponent_offset adds e**offset."""
        if x == 0.0:
            return ScaledValue.zero()
        if not math.isfinite(x):
            raise ValueError(f"cannot scale non-finite value {x}")
        m, p2 = math.frexp(abs(x))
        log_abs = math.log(m) + p2 * math.log(2.0)
        v = ScaledValue.from_log(1 if x > 0 else -1, log_abs)
        return ScaledValue(v.sign, v.mantissa, v.exponent + exponent_offset)

    def __post_init__(self):
        if self.sign not in (-1, 0, 1):
            raise ValueError(f"sign must be -1, 0, or 1, got {self.sign}")
        if self.sign == 0:
            if self.mantissa != 0.0:
                raise ValueError("zero sign requires zero mantissa")
        elif not (1.0 <= self.mantissa < math.e):
            raise ValueError(f"mantissa {self.mantissa} outside [1, e)")

    # -- observers ---------------------------------------------------------

    @property
    def log_abs(self) -> float:
        """Natural log of |value|; -inf for zero."""
        if self.sign == 0:
            return -math.inf
        return math.log(self.mantissa) + self.exponent

    def to_float(self) -> float:
        """Collapse to a double; overflows to +-inf, underflows to 0."""
        if self.sign == 0:
            return 0.0
        if self.exponent > 709:
            return math.inf * self.sign
        if self.exponent < -745:
            return 0.0
        return self.sign * self.mantissa * math.exp(float(self.exponent))

    def is_zero(self) -> bool:
        return self.sign == 0

    def log_ratio(self, other: "ScaledValue") -> float:
        """log(|self| / |other|); both must be nonzero."""
        if self.sign == 0 or other.sign == 0:
            raise ValueError("log_ratio undefined for zero")
        return self.log_abs - other.log_abs

    # -- arithmetic --------------------------------------------------------

    @staticmethod
    def _coerce(x) -> "ScaledValue":
        if isinstance(x, ScaledValue):
            return x
        if isinstance(x, (int, float)):
            return ScaledValue.from_float(float(x))
        return NotImplemented

    def __neg__(self) -> "ScaledValue":
        return ScaledValue(-self.sign, self.mantissa, self.exponent)

    def __abs__(self) -> "ScaledValue":
        return ScaledValue(abs(self.sign), self.mantissa, self.exponent)

    def __mul__(self, other) -> "ScaledValue":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        s = self.sign * other.sign
        if s == 0:
            return ScaledValue.zero()
        return ScaledValue.from_log(s, self.log_abs + other.log_abs)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "ScaledValue":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if other.sign == 0:
            raise ZeroDivisionError("ScaledValue division by zero")
        if self.sign == 0:
            return ScaledValue.zero()
        return ScaledValue.from_log(self.sign * other.sign,
                                    self.log_abs - other.log_abs)

    def __rtruediv__(self, other) -> "ScaledValue":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other / self

    def __add__(self, other) -> "ScaledValue":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self.sign == 0:
            return other
        if other.sign == 0:
            return self
        hi, lo = (self, other) if self.log_abs >= other.log_abs else (other, self)
        if hi.log_abs - lo.log_abs > _ADD_CUTOFF:
            return hi
        base = hi.exponent
        s = (hi.sign * hi.mantissa
             + lo.sign * math.exp(lo.log_abs - base))
        if s == 0.0:
            return ScaledValue.zero()
        return ScaledValue.from_float(s, exponent_offset=base)

    __radd__ = __add__

    def __sub__(self, other) -> "ScaledValue":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "ScaledValue":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __pow__(self, p: float) -> "ScaledValue":
        if self.sign == 0:
            if p > 0:
                return ScaledValue.zero()
            raise ZeroDivisionError("0 to a non-positive power")
        if self.sign < 0:
            if p != round(p):
                raise ValueError("negative base with non-integer exponent")
            s = -1 if int(round(p)) % 2 else 1
        else:
            s = 1
        return ScaledValue.from_log(s, self.log_abs * p)

    def sqrt(self) -> "ScaledValue":
        if self.sign < 0:
            raise ValueError("sqrt of a negative ScaledValue")
        return self ** 0.5

    # -- ordering ----------------------------------------------------------

    def _cmp(self, other) -> int:
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self.sign != other.sign:
            return -1 if self.sign < other.sign else 1
        if self.sign == 0:
            return 0
        if self.exponent == other.exponent and self.mantissa == other.mantissa:
            return 0
        bigger_abs = self.log_abs > other.log_abs
        if self.sign > 0:
            return 1 if bigger_abs else -1
        return -1 if bigger_abs else 1

    def __lt__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is NotImplemented else c < 0

    def __le__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is NotImplemented else c <= 0

    def __gt__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is NotImplemented else c > 0

    def __ge__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is NotImplemented else c >= 0

    def __repr__(self):
        if self.sign == 0:
            return "ScaledValue(0)"
        return (f"ScaledValue({'+' if self.sign > 0 else '-'}"
                f"{self.mantissa:.12g}e^{self.exponent})")
