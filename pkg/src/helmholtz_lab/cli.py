"""Command-line front end.

Every subcommand writes its artifacts (CSV/JSON, plus an SVG where a plot
helps) into --out together with a manifest.json echoing the full parsed
configuration and the library version, so a run can be reproduced from the
manifest alone (see the replay subcommand).  Exit status: 0 when every
verdict passed, 1 when any failed, 2 on invalid usage or a violated
precondition, which is printed verbatim.

Floats in CSV and stdout are printed with 17 significant digits; JSON uses
the shortest lossless round-trip encoding.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import __version__
from .bessel import bessel_zeros, first_zero, first_zero_bracket
from .comparisons import (ProfileSide, picone_interlaces, radial_pq_witness,
                          sonin_polya_holds, sturm_dominates,
                          matched_power_side)
from .errors import DataError, DomainError, PreconditionError
from .geometry import CurvatureContext, inv_sin_kappa
from .radial import integrate_radial
from .reverse import caccioppoli_check, equator_counterexample, \
    reverse_constant
from .three_ball import growth_fit, select_mode
from .parallel import parallel_map

PLOT_HASHSALT = "helmholtz-lab"


def _fmt(x) -> str:
    return format(float(x), ".17g")


def _float_list(value) -> list:
    """Accepts 'a:b:step' (inclusive), comma lists, or one number."""
    if isinstance(value, (list, tuple)):
        return [float(v) for v in value]
    text = str(value)
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise DataError(f"range must be start:stop:step, got {text!r}")
        start, stop, step = (float(p) for p in parts)
        if step <= 0 or stop < start:
            raise DataError(f"bad range {text!r}")
        n = int(math.floor((stop - start) / step + 1e-9)) + 1
        return [start + i * step for i in range(n)]
    if "," in text:
        return [float(p) for p in text.split(",") if p]
    return [float(text)]


def _int_list(value) -> list:
    """Accepts 'a..b' (inclusive), comma lists, or one integer."""
    if isinstance(value, (list, tuple)):
        return [int(v) for v in value]
    text = str(value)
    if ".." in text:
        lo, hi = text.split("..")
        lo, hi = int(lo), int(hi)
        if hi < lo:
            raise DataError(f"bad range {text!r}")
        return list(range(lo, hi + 1))
    if "," in text:
        return [int(p) for p in text.split(",") if p]
    return [int(text)]


def _write(path: str, text: str) -> None:
    with open(path, "w") as fh:
        fh.write(text)


def _write_json(path: str, obj) -> None:
    _write(path, json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _manifest(out_dir: str, subcommand: str, config: dict) -> None:
    _write_json(os.path.join(out_dir, "manifest.json"),
                {"version": __version__, "subcommand": subcommand,
                 "config": config})


def _plot(path: str, series, xlabel: str, ylabel: str) -> None:
    """series: list of (xs, ys, label, style).  Deterministic SVG output."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    plt.rcParams["svg.hashsalt"] = PLOT_HASHSALT
    plt.rcParams["svg.fonttype"] = "path"
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for xs, ys, label, style in series:
        ax.plot(xs, ys, style, label=label)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if any(s[2] for s in series):
        ax.legend()
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


# ---------------------------------------------------------------------------
# subcommands


def cmd_radial(args) -> int:
    kappa, m = args.kappa, args.m
    rho_max = args.rho_max
    if rho_max is None:
        rho_max = 4.0 * m + 20.0
        if kappa > 0:
            rho_max = min(rho_max, 0.98 * math.pi / math.sqrt(kappa))
    ctx = CurvatureContext.from_kappa(kappa, 1.0)
    profile = integrate_radial(ctx, m, rho_max, rtol=args.rtol)
    csv_path = os.path.join(args.out, "radial.csv")
    _write(csv_path, profile.to_csv_text())
    sign, log_l, _, _ = profile.log_eval_sorted(profile.grid)
    _plot(os.path.join(args.out, "radial.svg"),
          [(profile.grid, np.maximum(log_l, -745.0) / math.log(10.0),
            f"m={m}", "-")],
          "rho", "log10 |L|")
    print(f"radial: kappa={_fmt(kappa)} m={_fmt(m)} "
          f"nodes={len(profile.grid)} -> {csv_path}")
    return 0


def cmd_bessel_zero(args) -> int:
    orders = _int_list(args.l)
    rows = []
    failures = 0
    for l in orders:
        bracket = first_zero_bracket(l)
        zero = first_zero(l)
        inside = bracket.lo < zero <= bracket.hi
        failures += 0 if inside else 1
        rows.append((l, bracket.lo, bracket.hi, zero, inside))
    lines = ["l,bracket_lo,bracket_hi,first_zero,inside"]
    lines += [f"{l},{_fmt(lo)},{_fmt(hi)},{_fmt(z)},{int(ok)}"
              for l, lo, hi, z, ok in rows]
    path = os.path.join(args.out, "bessel_zero.csv")
    _write(path, "\n".join(lines) + "\n")
    print(f"bessel-zero: {len(rows)} orders, {failures} outside bracket "
          f"-> {path}")
    return 0 if failures == 0 else 1


def cmd_three_ball(args) -> int:
    krs = _float_list(args.kr)
    ks = [kr / args.r for kr in krs]
    fit = growth_fit(args.kappa, args.r, args.alpha, ks)
    lines = ["kr,m_selected,log_bound,policy,kappa,alpha"]
    for kr, log_bound in fit.samples:
        k = kr / args.r
        kappa_row = args.kappa / (k * k)
        m_sel = select_mode(kappa_row, kr)
        lines.append(f"{_fmt(kr)},{m_sel},{_fmt(log_bound)},paper_rule,"
                     f"{_fmt(kappa_row)},{_fmt(args.alpha)}")
    path = os.path.join(args.out, "three_ball.csv")
    _write(path, "\n".join(lines) + "\n")

    xs = [s[0] for s in fit.samples]
    ys = [s[1] for s in fit.samples]
    fit_ys = [fit.slope * x + fit.intercept for x in xs]
    _plot(os.path.join(args.out, "three_ball.svg"),
          [(xs, ys, "log lower bound", "o"),
           (xs, fit_ys, f"slope {fit.slope:.4f}", "-")],
          "kr", "log bound")

    floor = 0.045 * args.alpha
    ok = fit.slope >= floor and fit.r_squared >= 0.99
    print(f"three-ball: slope={_fmt(fit.slope)} "
          f"intercept={_fmt(fit.intercept)} r_squared={_fmt(fit.r_squared)}")
    print(f"three-ball: growth floor {_fmt(floor)} -> "
          f"{'PASS' if ok else 'FAIL'}")
    return 0 if ok else 1


def _reverse_one(job) -> dict:
    curvature, r, R1, k = job
    ctx = CurvatureContext.from_physical(curvature, k)
    rep = reverse_constant(ctx, r, R1)
    return {"k": k, "C_hat": rep.c_hat, "argmax_mode": rep.argmax_mode,
            "m_max": rep.m_max, "conclusive": rep.conclusive}


def cmd_reverse(args) -> int:
    ks = _float_list(args.k)
    rows = parallel_map(_reverse_one,
                        [(args.kappa, args.r, args.R1, k) for k in ks])
    all_ok = all(row["conclusive"] for row in rows)
    payload = {
        "r": args.r, "R1": args.R1, "kappa": args.kappa,
        "k_values": [row["k"] for row in rows],
        "C_hat": [row["C_hat"] for row in rows],
        "argmax_mode": [row["argmax_mode"] for row in rows],
        "certificate": {"window": 5, "peak_factor": 1.0e3,
                        "m_max": [row["m_max"] for row in rows],
                        "conclusive": all_ok},
    }
    path = os.path.join(args.out, "reverse.json")
    _write_json(path, payload)
    _plot(os.path.join(args.out, "reverse.svg"),
          [([row["k"] for row in rows], [row["C_hat"] for row in rows],
            "C(k)", "o-")],
          "k", "C_hat")
    c = payload["C_hat"]
    print(f"reverse: {len(ks)} wave numbers, C_hat in "
          f"[{_fmt(min(c))}, {_fmt(max(c))}] -> {path}")
    if not all_ok:
        print("reverse: tail certificate inconclusive for at least one k")
    return 0 if all_ok else 1


def cmd_caccioppoli(args) -> int:
    ctx = CurvatureContext.from_physical(args.kappa, args.k)
    report = caccioppoli_check(ctx, (args.m, args.k), args.r, args.R,
                               args.eps)
    path = os.path.join(args.out, "caccioppoli.json")
    _write_json(path, report.to_json_dict())
    print(f"caccioppoli: c_upper={_fmt(report.params['c_upper'])} "
          f"c_lower={_fmt(report.params['c_lower'])} "
          f"verdict={'PASS' if report.verdict else 'FAIL'} -> {path}")
    return 0 if report.verdict else 1


def cmd_equator(args) -> int:
    ns = _int_list(args.n)
    report = equator_counterexample(ns, ball_radius=args.r,
                                    annulus=(args.a, args.b),
                                    curvature=args.curvature)
    lines = ["n,k,log_ratio"]
    lines += [f"{int(n)},{_fmt(k)},{_fmt(lr)}"
              for n, k, lr in zip(report.n_values, report.k_values,
                                  report.log_ratios)]
    path = os.path.join(args.out, "equator.csv")
    _write(path, "\n".join(lines) + "\n")
    _plot(os.path.join(args.out, "equator.svg"),
          [(list(report.n_values), list(report.log_ratios),
            "log mass ratio", "o"),
           (list(report.n_values),
            [report.slope * n + report.intercept for n in report.n_values],
            f"slope {report.slope:.4f}", "-")],
          "n", "log ratio")
    monotone = bool(np.all(np.diff(report.log_ratios) > 0))
    ok = monotone and report.r_squared >= 0.98
    print(f"equator: slope={_fmt(report.slope)} "
          f"r_squared={_fmt(report.r_squared)} monotone={monotone} -> "
          f"{'PASS' if ok else 'FAIL'}")
    return 0 if ok else 1


# -- oracle instances -------------------------------------------------------


def _sturm_instance(kappa: float, m: float, delta: float, lo_frac: float):
    beta = math.sqrt(1.0 - delta * delta)
    rho2 = inv_sin_kappa(kappa, delta * m)
    rho1 = inv_sin_kappa(kappa, lo_frac * delta * m)
    ctx = CurvatureContext.from_kappa(kappa, 1.0)
    profile = integrate_radial(ctx, m, rho2)
    low = matched_power_side(profile, rho1, beta)
    high = ProfileSide(profile)
    return sturm_dominates(low, high, (rho1, rho2))


def _picone_instance(l: float, span: float):
    a_l = l ** (-1.0 / 3.0)
    x_lo = l + l ** (1.0 / 3.0)
    x_hi = l + span * l ** (1.0 / 3.0)
    coarse = []
    j = 0
    while True:
        root = (0.5 * math.pi + j * math.pi) / a_l
        if root > x_hi:
            break
        if root > x_lo:
            coarse.append(root)
        j += 1
    fine = [z for z in bessel_zeros(l, x_hi) if z > x_lo]
    return picone_interlaces(coarse, fine, (x_lo, x_hi))


def _sonin_instance(kappa: float, m: float):
    if kappa > 0:
        rho_max = 0.95 * 0.5 * math.pi / math.sqrt(kappa)
    else:
        rho_max = 4.0 * m + 20.0
    ctx = CurvatureContext.from_kappa(kappa, 1.0)
    profile = integrate_radial(ctx, m, rho_max)
    return sonin_polya_holds(profile.extrema, radial_pq_witness(kappa))


def cmd_oracle(args) -> int:
    reports = [
        ("sturm", _sturm_instance(-1.0, 12.0, 0.9, 0.5)),
        ("picone", _picone_instance(8.0, 30.0)),
        ("sonin", _sonin_instance(0.0, 3.0)),
    ]
    rng = np.random.default_rng(args.seed)
    for _ in range(args.count):
        m = float(rng.integers(6, 40))
        delta = float(rng.uniform(0.6, 0.95))
        kappa = float(rng.choice([-1.0, 0.0, 1.0])) * \
            float(rng.uniform(0.1, 0.9)) * (0.8 / (delta * m)) ** 2
        reports.append(
            ("sturm", _sturm_instance(kappa, m, delta,
                                      float(rng.uniform(0.3, 0.7)))))
        l = float(rng.integers(5, 60))
        reports.append(("picone", _picone_instance(l,
                                                   float(rng.uniform(10, 40)))))
        mk = float(rng.integers(2, 20))
        ks = float(rng.choice([-1.0, 0.0, 1.0]))
        kappa_s = ks * float(rng.uniform(0.5, 1.5)) * (0.5 / mk) ** 2
        reports.append(("sonin", _sonin_instance(kappa_s, mk)))

    payload = []
    failures = 0
    for kind, rep in reports:
        payload.append(rep.to_json_dict())
        if not rep.verdict:
            failures += 1
        print(f"oracle[{kind}]: {'PASS' if rep.verdict else 'FAIL'} "
              f"(margin {_fmt(rep.margin)})")
    path = os.path.join(args.out, "oracle.json")
    _write_json(path, payload)
    print(f"oracle: {len(reports)} instances, {failures} failed -> {path}")
    return 0 if failures == 0 else 1


def cmd_replay(args) -> int:
    with open(args.manifest) as fh:
        data = json.load(fh)
    sub = data["subcommand"]
    if sub not in _HANDLERS or sub == "replay":
        raise DataError(f"manifest names unknown subcommand {sub!r}")
    config = dict(data["config"])
    config["out"] = args.out
    os.makedirs(args.out, exist_ok=True)
    _manifest(args.out, sub, {k: v for k, v in config.items()
                              if k != "out"})
    return _HANDLERS[sub](argparse.Namespace(**config))


_HANDLERS = {
    "radial": cmd_radial,
    "bessel-zero": cmd_bessel_zero,
    "three-ball": cmd_three_ball,
    "reverse": cmd_reverse,
    "caccioppoli": cmd_caccioppoli,
    "equator": cmd_equator,
    "oracle": cmd_oracle,
    "replay": cmd_replay,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="helmholtz-lab",
        description="Radial Helmholtz experiments on constant-curvature "
                    "surfaces.")
    parser.add_argument("--version", action="version", version=__version__)
    subs = parser.add_subparsers(dest="subcommand", required=True)

    def common(p):
        p.add_argument("--out", default=".", help="output directory")

    p = subs.add_parser("radial", help="radial profile CSV + SVG")
    p.add_argument("--kappa", type=float, required=True,
                   help="nondimensional curvature K/k^2 of the profile")
    p.add_argument("--m", type=float, required=True, help="angular order")
    p.add_argument("--rho-max", dest="rho_max", type=float, default=None)
    p.add_argument("--rtol", type=float, default=1e-10)
    common(p)

    p = subs.add_parser("bessel-zero", help="first-zero bracket table")
    p.add_argument("--l", required=True,
                   help="orders, e.g. 1..100 or 3,7,12")
    common(p)

    p = subs.add_parser("three-ball", help="growth sweep CSV + slope")
    p.add_argument("--kappa", type=float, required=True,
                   help="physical curvature K of the space")
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--kr", default="20:200:20",
                   help="kr values, e.g. 20:200:20")
    p.add_argument("--r", type=float, default=1.0,
                   help="physical inner ball radius")
    common(p)

    p = subs.add_parser("reverse", help="reverse-constant k sweep JSON")
    p.add_argument("--kappa", type=float, default=0.0,
                   help="physical curvature K")
    p.add_argument("--r", type=float, default=1.0)
    p.add_argument("--R1", type=float, default=2.0)
    p.add_argument("--k", default="1:60:1", help="wave numbers")
    common(p)

    p = subs.add_parser("caccioppoli", help="annulus energy bound report")
    p.add_argument("--kappa", type=float, default=0.0,
                   help="physical curvature K")
    p.add_argument("--m", type=float, required=True)
    p.add_argument("--k", type=float, required=True)
    p.add_argument("--r", type=float, required=True)
    p.add_argument("--R", type=float, required=True)
    p.add_argument("--eps", type=float, required=True)
    common(p)

    p = subs.add_parser("equator", help="counterexample family table")
    p.add_argument("--n", default="2..30", help="degrees, e.g. 2..30")
    p.add_argument("--r", type=float, default=1.4,
                   help="polar ball radius")
    p.add_argument("--a", type=float, default=1.9,
                   help="annulus inner radius")
    p.add_argument("--b", type=float, default=2.4,
                   help="annulus outer radius")
    p.add_argument("--curvature", type=float, default=1.0)
    common(p)

    p = subs.add_parser("oracle", help="comparison-theorem instance checks")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=0,
                   help="randomized instances per theorem on top of the "
                        "canonical trio")
    common(p)

    p = subs.add_parser("replay", help="re-run from a manifest")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", default=".", help="output directory")

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handler = _HANDLERS[args.subcommand]
    try:
        if args.subcommand != "replay":
            os.makedirs(args.out, exist_ok=True)
            config = {k: v for k, v in vars(args).items()
                      if k not in ("subcommand", "out")}
            _manifest(args.out, args.subcommand, config)
        return handler(args)
    except PreconditionError as exc:
        print(f"precondition violated: {exc}", file=sys.stderr)
        return 2
    except (DataError, DomainError) as exc:
        print(f"invalid parameters: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
