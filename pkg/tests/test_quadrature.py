"""Log-scale Gauss quadrature: exactness, huge dynamic range, failure modes."""

import math

import numpy as np
import pytest

from helmholtz_lab.errors import IntegrationError
from helmholtz_lab.quadrature import gauss_nodes, gauss_panel, integrate_log


def log_form(f):
    """Wrap a plain positive-or-signed callable into (sign, log|f|) arrays."""

    def fn(xs):
        vals = np.asarray([f(x) for x in xs], dtype=float)
        signs = np.sign(vals)
        with np.errstate(divide="ignore"):
            logs = np.where(vals == 0.0, -np.inf, np.log(np.abs(vals)))
        return signs, logs

    return fn


def test_nodes_cached_and_symmetric():
    x, w = gauss_nodes(24)
    assert len(x) == 24 and len(w) == 24
    assert np.allclose(x, -x[::-1])
    assert gauss_nodes(24) is gauss_nodes(24)  # lru cache returns same object
    assert w.sum() == pytest.approx(2.0, rel=1e-14)


def test_panel_exact_for_polynomials():
    # 24-point Gauss is exact through degree 47
    got = gauss_panel(log_form(lambda x: x ** 8 - 3 * x ** 2 + 1), 0.0, 2.0)
    want = 2.0 ** 9 / 9 - 2.0 ** 3 + 2.0
    assert got.to_float() == pytest.approx(want, rel=1e-13)


def test_integrates_sine():
    got = integrate_log(log_form(math.sin), 0.0, math.pi)
    assert got.to_float() == pytest.approx(2.0, rel=1e-11)


def test_huge_dynamic_range():
    # integral of e^(1000 x) on [0, 1] = (e^1000 - 1)/1000, ~e^993.1
    def fn(xs):
        return np.ones_like(xs), 1000.0 * np.asarray(xs)

    got = integrate_log(fn, 0.0, 1.0, rel_tol=1e-12)
    assert got.sign == 1
    assert got.log_abs == pytest.approx(1000.0 - math.log(1000.0), abs=1e-10)


def test_signed_integrand():
    got = integrate_log(log_form(math.cos), 0.0, 2.0)
    assert got.to_float() == pytest.approx(math.sin(2.0), rel=1e-11)
    got = integrate_log(log_form(math.cos), 2.0, 4.0)
    assert got.sign == -1
    assert got.to_float() == pytest.approx(math.sin(4.0) - math.sin(2.0), rel=1e-10)


def test_zero_width_interval():
    assert integrate_log(log_form(math.exp), 3.0, 3.0).is_zero()


def test_reversed_interval_rejected():
    with pytest.raises(ValueError):
        integrate_log(log_form(math.exp), 1.0, 0.0)


def test_identically_zero_integrand():
    def fn(xs):
        return np.zeros_like(xs), np.full_like(xs, -np.inf)

    assert integrate_log(fn, 0.0, 1.0).is_zero()


def test_nonintegrable_singularity_raises():
    with pytest.raises(IntegrationError):
        integrate_log(log_form(lambda x: 1.0 / x), 0.0, 1.0, max_depth=20)


def test_sharp_peak_resolved():
    # narrow Gaussian bump: integral over [-1, 1] is w sqrt(pi) up to e^-400
    w = 0.05

    def fn(xs):
        return np.ones_like(xs), -((np.asarray(xs) / w) ** 2)

    got = integrate_log(fn, -1.0, 1.0, rel_tol=1e-10)
    assert got.to_float() == pytest.approx(w * math.sqrt(math.pi), rel=1e-9)
