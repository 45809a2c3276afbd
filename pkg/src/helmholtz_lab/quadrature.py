"""Gauss-Legendre quadrature in log scale.

Integrands arrive as callables returning (sign, log|f|) arrays so that
values spanning thousands of e-folds never touch raw doubles; panel sums
factor out the running maximum before exponentiating.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from .errors import IntegrationError
from .scaling import ScaledValue


@lru_cache(maxsize=64)
def gauss_nodes(n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    return x, w


def gauss_panel(fn, a: float, b: float, n: int = 24) -> ScaledValue:
    """One n-point panel of fn over [a, b]; fn(xs) -> (signs, log_abs)."""
    nodes, weights = gauss_nodes(n)
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    xs = mid + half * nodes
    signs, logs = fn(xs)
    signs = np.asarray(signs, dtype=float)
    logs = np.asarray(logs, dtype=float)
    live = np.isfinite(logs) & (signs != 0.0)
    if not np.any(live):
        return ScaledValue.zero()
    top = float(np.max(logs[live]))
    acc = float(np.sum(weights[live] * signs[live] * np.exp(logs[live] - top)))
    if acc == 0.0:
        return ScaledValue.zero()
    return ScaledValue.from_log(1 if acc > 0 else -1,
                                math.log(abs(acc)) + top + math.log(half))


def integrate_log(fn, a: float, b: float, *, rel_tol: float = 1e-10,
                  n: int = 24, max_depth: int = 48) -> ScaledValue:
    """Adaptive whole-versus-halves refinement down to rel_tol."""
    if b == a:
        return ScaledValue.zero()
    if b < a:
        raise ValueError(f"interval reversed: [{a}, {b}]")
    log_tol = math.log(rel_tol)

    def recurse(lo: float, hi: float, whole: ScaledValue,
                depth: int) -> ScaledValue:
        midp = 0.5 * (lo + hi)
        left = gauss_panel(fn, lo, midp, n)
        right = gauss_panel(fn, midp, hi, n)
        total = left + right
        err = abs(whole - total)
        if err.is_zero():
            return total
        if not total.is_zero() and err.log_abs <= log_tol + total.log_abs:
            return total
        if depth >= max_depth:
            raise IntegrationError(
                f"quadrature failed to converge on [{lo}, {hi}] "
                f"after {max_depth} refinement levels")
        return (recurse(lo, midp, left, depth + 1)
                + recurse(midp, hi, right, depth + 1))

    return recurse(a, b, gauss_panel(fn, a, b, n), 0)
