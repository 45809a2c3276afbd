"""Acceptance gate: the eleven headline checks.

Each test exercises one advertised guarantee end to end at its stated
tolerance and prints a single PASS/FAIL line with the measured margin.
Reference values come from the independent oracles in oracles.py and the
frozen grid under data/; nothing here shares code with the paths being
checked.
"""

import json
import math
import os
import time

import numpy as np
import pytest

import oracles
import helmholtz_lab.cli as cli
from helmholtz_lab.bessel import bessel_j, first_zero
from helmholtz_lab.comparisons import (
    ProfileSide,
    matched_power_side,
    picone_interlaces,
    radial_pq_witness,
    sonin_polya_holds,
    sturm_dominates,
)
from helmholtz_lab.errors import PreconditionError
from helmholtz_lab.geometry import CurvatureContext, cutoff_radii, inv_sin_kappa
from helmholtz_lab.radial import integrate_radial
from helmholtz_lab.reverse import (
    caccioppoli_check,
    equator_counterexample,
    reverse_constant,
)
from helmholtz_lab.three_ball import growth_fit, lemma_ratio_sweep, upper_ratio_family

GRID_PATH = os.path.join(os.path.dirname(__file__), "data", "bessel_grid.json")


def report(name: str, ok: bool, detail: str) -> None:
    print(f"{name}: {'PASS' if ok else 'FAIL'} ({detail})")
    assert ok, f"{name}: {detail}"


def test_acc_01_bessel_values_match_series_oracle():
    # J_m to 1e-10 relative against the frozen high-precision series
    # table: m in 0..50, abscissas spread over (0, 2m+20], 510 points.
    with open(GRID_PATH) as fh:
        points = json.load(fh)["points"]
    assert len(points) >= 500
    start = time.perf_counter()
    worst = 0.0
    for p in points:
        got = bessel_j(p["m"], p["x"])
        assert got.sign == p["sign"], (p["m"], p["x"])
        worst = max(worst, abs(math.expm1(got.log_abs - p["log_abs"])))
    elapsed = time.perf_counter() - start
    report("acc-01 bessel series agreement",
           worst <= 1e-10 and elapsed < 5.0,
           f"max rel dev {worst:.3e} over {len(points)} points, "
           f"tol 1e-10, {elapsed:.2f}s < 5s")


def test_acc_02_first_zero_brackets_and_interlacing():
    # j_l in (l, l + (pi+1) l^(1/3)] for every order 1..100, the l=1 zero
    # against an independent bisection, and interlacing against the
    # explicit comparison roots (pi/2 + k pi) / a_l for three orders.
    bad = []
    for l in range(1, 101):
        z = first_zero(l)
        if not (l < z <= l + (math.pi + 1.0) * l ** (1.0 / 3.0)):
            bad.append(l)
    j1_dev = abs(first_zero(1) - oracles.first_zero_bisection(1))
    picone_ok = all(cli._picone_instance(float(l), 30.0).verdict
                    for l in (8, 27, 64))
    report("acc-02 first-zero brackets",
           not bad and j1_dev <= 1e-9 and picone_ok,
           f"100 orders in bracket ({len(bad)} out), j_1 dev "
           f"{j1_dev:.2e} <= 1e-9, interlacing l=8,27,64 "
           f"{'ok' if picone_ok else 'failed'}")


def test_acc_03_flat_profiles_reduce_to_bessel():
    # kappa=0 profiles against J_m over [0, 4m+20] for m in 0..100,
    # amplitude-scaled deviation at ten abscissas per order.
    ctx = CurvatureContext.from_kappa(0.0, 1.0)
    worst = 0.0
    for m in range(0, 101):
        hi = 4.0 * m + 20.0
        profile = integrate_radial(ctx, m, hi, rtol=1e-12)
        xs = [j / 10.0 * hi for j in range(1, 11)]
        js = [bessel_j(m, x) for x in xs]
        amp = max(v.log_abs for v in js if v.sign != 0)
        for x, j in zip(xs, js):
            diff = profile.evaluate(x) - j
            if diff.sign != 0:
                worst = max(worst, math.exp(diff.log_abs - amp))
    report("acc-03 flat reduction",
           worst <= 1e-8,
           f"max scaled dev {worst:.3e} over m=0..100, tol 1e-8")


def test_acc_04_extrema_envelope_decreases():
    # Located extrema before R_kappa: magnitudes strictly decreasing up
    # to 1e-10 relative slack, and none before the turning radius
    # sin_kappa^-1(m) where that radius exists.
    slack = math.log1p(1e-10)
    n_pairs = 0
    n_first = 0
    envelope_ok = True
    first_ok = True
    for kappa in (-1.0, 0.0, 1.0):
        ctx = CurvatureContext.from_kappa(kappa, 1.0)
        r_kappa = cutoff_radii(kappa).r_kappa
        for m in range(1, 51):
            if kappa > 0:
                rho_max = 0.98 * math.pi / math.sqrt(kappa)
            elif kappa == 0:
                rho_max = 4.0 * m + 20.0
            else:
                rho_max = math.asinh(float(m)) + 20.0
            profile = integrate_radial(ctx, m, rho_max)
            ext = [(x, v) for x, v in profile.extrema if x < r_kappa]
            logs = [v.log_abs for _, v in ext]
            for a, b in zip(logs, logs[1:]):
                envelope_ok = envelope_ok and (b <= a + slack)
                n_pairs += 1
            if ext and (kappa <= 0 or math.sqrt(kappa) * m <= 1.0):
                turning = inv_sin_kappa(kappa, float(m))
                first_ok = first_ok and (ext[0][0] >= turning * (1 - 1e-12))
                n_first += 1
    report("acc-04 extrema envelope",
           envelope_ok and first_ok,
           f"{n_pairs} consecutive pairs decreasing (slack 1e-10), "
           f"{n_first} first extrema past the turning radius, "
           f"kappa in {{-1,0,+1}}, m in 1..50")


def test_acc_05_lemma_ratio_bounded():
    # C(m) = J_m(gamma m) (delta/gamma)^(beta m) / J_m(delta m) at
    # gamma=5/6, delta=11/12: finite, under one family cap for
    # m in 5..300, with no growth across the range (last decade at most
    # twice the first).
    gamma, delta = 5.0 / 6.0, 11.0 / 12.0
    reports, cap = lemma_ratio_sweep(range(5, 301), gamma, delta)
    beta_ok = reports[0].params["beta"] == pytest.approx(
        math.sqrt(23.0) / 12.0, rel=1e-14)
    values = {r.params["m"]: math.exp(r.params["c_real_log"]) for r in reports}
    first_max = max(v for m, v in values.items() if 5 <= m <= 50)
    last_max = max(v for m, v in values.items() if 30 <= m <= 300)
    all_ok = all(r.verdict for r in reports)
    report("acc-05 lemma ratio cap",
           all_ok and beta_ok and math.isfinite(cap)
           and last_max <= 2.0 * first_max,
           f"296 orders, cap {cap:.4f}, first-decade max {first_max:.4f}, "
           f"last-decade max {last_max:.4f} <= 2x")


def test_acc_06_growth_slope_floor():
    # Lower-bound growth over kr in 20..200 for each curvature sign:
    # slope >= 0.045 alpha with r^2 >= 0.99, under 60s per space.
    alpha = 1.0
    details = []
    ok = True
    for label, K in (("flat", 0.0), ("hyperbolic", -0.01),
                     ("spherical", 0.01)):
        start = time.perf_counter()
        fit = growth_fit(K, 1.0, alpha, range(20, 201, 20))
        elapsed = time.perf_counter() - start
        good = (fit.slope >= 0.045 * alpha and fit.r_squared >= 0.99
                and elapsed < 60.0)
        ok = ok and good
        details.append(f"{label} slope {fit.slope:.4f} "
                       f"r2 {fit.r_squared:.5f} {elapsed:.1f}s")
    report("acc-06 growth slope floor", ok,
           "; ".join(details) + "; floor 0.045, r2 >= 0.99, < 60s each")


def test_acc_07_upper_ratio_product_capped():
    # (ratio - 1)(xi - 1) m stays under one cap per space for
    # xi = 10/9 across m in 10..200.
    ok = True
    details = []
    for space in ("flat", "hyperbolic", "spherical"):
        reports, cap = upper_ratio_family(space, range(10, 201), 10.0 / 9.0)
        good = all(r.verdict for r in reports) and math.isfinite(cap)
        ok = ok and good
        details.append(f"{space} cap {cap:.3f} "
                       f"({sum(not r.verdict for r in reports)} over)")
    report("acc-07 upper ratio product", ok,
           "191 orders per space; " + "; ".join(details))


def test_acc_08_reverse_constant_stays_tame():
    # C(r=1, R1=2) swept over k = 1..60: max within 10x of the median and
    # no monotone climb across the top ten wave numbers; repeated on the
    # curved rescalings K = +-0.04; all under 120s.
    start = time.perf_counter()
    ok = True
    details = []
    for K in (0.0, 0.04, -0.04):
        chats = []
        for k in range(1, 61):
            ctx = CurvatureContext.from_physical(K, float(k))
            chats.append(reverse_constant(ctx, 1.0, 2.0).c_hat)
        chats = np.array(chats)
        spread = float(chats.max() / np.median(chats))
        diverging = bool(np.all(np.diff(chats[-10:]) > 0))
        ok = ok and spread <= 10.0 and not diverging
        details.append(f"K={K:+.2f} max/med {spread:.3f}"
                       f"{' DIVERGING' if diverging else ''}")
    elapsed = time.perf_counter() - start
    ok = ok and elapsed < 120.0
    report("acc-08 reverse constant sweep", ok,
           "; ".join(details) + f"; cap 10x, {elapsed:.1f}s < 120s")


def test_acc_09_caccioppoli_collar_scaling():
    # Twenty explicit modes, both annulus inequalities realized with
    # finite constants, and halving the collar grows neither constant by
    # more than 5x.
    ctx = CurvatureContext.from_physical(0.0, 1.0)
    samples = [
        # oscillatory across the annulus
        (0, 2.0), (1, 3.0), (2, 8.0), (3, 6.0), (4, 7.0),
        (5, 8.0), (6, 10.0), (7, 11.0), (8, 12.0), (9, 14.0),
        # evanescent or low-frequency
        (15, 2.0), (0, 0.5), (21, 5.0), (25, 5.0), (30, 6.0),
        (35, 8.0), (40, 9.0), (38, 9.0), (28, 6.0), (33, 7.0),
    ]
    assert len(samples) == 20
    ok = True
    worst = 0.0
    for m, k in samples:
        rep = caccioppoli_check(ctx, (m, k), 1.0, 3.0, 0.25)
        half = caccioppoli_check(ctx, (m, k), 1.0, 3.0, 0.125)
        ok = ok and rep.verdict and half.verdict
        for key in ("c_upper", "c_lower"):
            c, ch = rep.params[key], half.params[key]
            ok = ok and math.isfinite(c) and math.isfinite(ch)
            ok = ok and ch <= 5.0 * c + 1e-12
            if c > 0:
                worst = max(worst, ch / c)
    report("acc-09 caccioppoli collar", ok,
           f"20 modes, both constants finite, worst halving ratio "
           f"{worst:.2f} <= 5")


def test_acc_10_equator_ratio_growth():
    # The concentrating spherical family: monotone mass ratios for
    # n = 2..30 and a log-linear trend with r^2 >= 0.98.
    rep = equator_counterexample(range(2, 31))
    monotone = bool(np.all(np.diff(rep.log_ratios) > 0))
    report("acc-10 equator family",
           monotone and rep.r_squared >= 0.98,
           f"n=2..30 monotone={monotone}, slope {rep.slope:.4f}, "
           f"r2 {rep.r_squared:.5f} >= 0.98")


def test_acc_11_randomized_comparison_instances():
    # One hundred admissible random instances per comparison check, all
    # passing, and deliberately broken hypotheses rejected by name.
    rng = np.random.default_rng(0)
    fails = {"sturm": 0, "picone": 0, "sonin": 0}
    for _ in range(100):
        m = float(rng.integers(6, 40))
        delta = float(rng.uniform(0.6, 0.95))
        kappa = float(rng.choice([-1.0, 0.0, 1.0])) * \
            float(rng.uniform(0.1, 0.9)) * (0.8 / (delta * m)) ** 2
        if not cli._sturm_instance(kappa, m, delta,
                                   float(rng.uniform(0.3, 0.7))).verdict:
            fails["sturm"] += 1
        l = float(rng.integers(5, 60))
        if not cli._picone_instance(l, float(rng.uniform(10, 40))).verdict:
            fails["picone"] += 1
        mk = float(rng.integers(2, 20))
        ks = float(rng.choice([-1.0, 0.0, 1.0]))
        kappa_s = ks * float(rng.uniform(0.5, 1.5)) * (0.5 / mk) ** 2
        if not cli._sonin_instance(kappa_s, mk).verdict:
            fails["sonin"] += 1

    # injected violations must be rejected with the hypothesis name
    beta = math.sqrt(1.0 - 0.81)
    rho2 = inv_sin_kappa(-1.0, 10.8)
    rho1 = inv_sin_kappa(-1.0, 5.4)
    profile = integrate_radial(CurvatureContext.from_kappa(-1.0, 1.0),
                               12.0, rho2)
    low = matched_power_side(profile, rho1, beta)
    high = ProfileSide(profile)
    with pytest.raises(PreconditionError) as exc:
        sturm_dominates(high, low, (rho1, rho2))
    named = [exc.value.hypothesis]
    with pytest.raises(PreconditionError) as exc:
        picone_interlaces([3.0, 1.0], [2.0], (0.0, 4.0))
    named.append(exc.value.hypothesis)
    with pytest.raises(PreconditionError) as exc:
        sonin_polya_holds([(1.0, 0.5), (2.0, 0.4)], lambda rho: -1.0)
    named.append(exc.value.hypothesis)

    rejects_ok = named == ["q_ordering", "sorted_zeros", "pq_monotonicity"]
    report("acc-11 randomized instances",
           not any(fails.values()) and rejects_ok,
           f"300 instances ({fails['sturm']}/{fails['picone']}/"
           f"{fails['sonin']} failed), rejections {named}")
