"""Command-line front end: sweeps, landmark reports, oracle regression, figures.

Exit codes: 0 success, 1 check failure, 2 invalid configuration.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import __version__
from .channel import (
    ChannelParams,
    EstimationBudget,
    VanishingPostselectionError,
    cramer_rao_uncertainty,
    postselection_probability,
    qfi_breakdown,
)
from .landmarks import compute_landmarks
from .meter import MeterSpec, expect_O, pancharatnam_visibility
from .oracle import evolve_joint, qfi_finite_difference
from .sweep import (
    FIGURE_IDS,
    ConfigError,
    GridSpec,
    SweepConfig,
    run_figure,
    write_sweep,
)
from .wigner import DomainError, HalfInt

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_BAD_CONFIG = 2


def _parse_j(text: str) -> HalfInt:
    """Spin argument: a plain integer is the doubled value, '3/2' a fraction."""
    text = text.strip()
    if "/" in text or "." in text:
        return HalfInt.parse(text)
    return HalfInt(int(text))


def _meter_spec(args) -> MeterSpec:
    if args.law == "fractional":
        if args.eps is None:
            raise ConfigError("--law fractional requires --eps")
        return MeterSpec.fractional(args.d, args.n, eps=args.eps)
    if args.law == "explicit":
        if not args.u_list:
            raise ConfigError("--law explicit requires --u-list")
        u = tuple(float(x) for x in args.u_list.split(","))
        if len(u) != args.d:
            raise ConfigError(f"--u-list must carry exactly d={args.d} values")
        return MeterSpec.explicit(u, args.n)
    return MeterSpec(d=args.d, n=args.n, law=args.law)


def _add_meter_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--d", type=int, default=2, help="meter dimension (>= 2)")
    p.add_argument("--n", type=int, default=1, help="meter copy count (>= 1)")
    p.add_argument(
        "--law",
        choices=("pancharatnam", "symmetric", "fractional", "explicit"),
        default="pancharatnam",
        help="meter eigenvalue law",
    )
    p.add_argument("--eps", type=float, default=None, help="fractional-law exponent")
    p.add_argument("--u-list", default=None, help="comma-separated eigenvalues (explicit law)")


def _add_channel_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--j", type=_parse_j, default=HalfInt(1),
                   help="spin: twice-integer (e.g. 3 means 3/2) or a fraction string '3/2'")
    p.add_argument("--lambda", dest="lam", type=float, default=1e-3, help="coupling strength")
    p.add_argument("--theta", type=float, default=0.0, help="postselection phase")


def cmd_sweep(args) -> int:
    config = SweepConfig(
        j_list=tuple(args.j_list),
        d=args.d,
        n=args.n,
        law=args.law,
        lambda_grid=GridSpec(args.lambda_min, args.lambda_max, args.lambda_count, args.lambda_scale),
        theta_grid=GridSpec(args.theta_min, args.theta_max, args.theta_count),
        outputs=tuple(args.outputs.split(",")),
        trials=args.trials,
        eps=args.eps,
        u_list=tuple(float(x) for x in args.u_list.split(",")) if args.u_list else None,
    )
    manifest = write_sweep([config], args.out)
    print(f"wrote {args.out} and {manifest}")
    return EXIT_OK


def cmd_landmarks(args) -> int:
    spec = _meter_spec(args)
    params = ChannelParams(lam=args.lam, theta=0.0, j=args.j)
    lm = compute_landmarks(params, spec, partial=True)

    def t_at(theta: float | None) -> float | None:
        if theta is None:
            return None
        try:
            return qfi_breakdown(params.with_theta(theta), spec).t_per_trial
        except VanishingPostselectionError:
            return None

    baseline = float(params.j.twice) ** 2
    t_par = t_at(lm.theta_par)
    report = {
        "theta_t": lm.theta_t,
        "theta_perp": lm.theta_perp,
        "theta_par": lm.theta_par,
        "pancharatnam_phase": lm.pancharatnam,
        "method": lm.method,
        "degenerate": lm.degenerate,
        "t_per_trial": {
            "at_theta_t": t_at(lm.theta_t),
            "at_theta_perp": t_at(lm.theta_perp),
            "at_theta_par": t_par,
        },
        "baseline": baseline,
        "quantum_advantage": bool(t_par is not None and t_par > baseline),
        "trials": args.trials,
    }
    if t_par is not None and not lm.degenerate and lm.theta_par is not None:
        budget = EstimationBudget(trials=args.trials)
        report["dlambda_at_theta_par"] = cramer_rao_uncertainty(
            params.with_theta(lm.theta_par), spec, budget
        )
    print(json.dumps(report, indent=2, sort_keys=True))
    return EXIT_OK


def cmd_phase(args) -> int:
    spec = _meter_spec(args)
    e = expect_O(spec, args.lam)
    report = {
        "value": [e.value.real, e.value.imag],
        "modulus": e.modulus,
        "phase": e.phase,
        "phase_defined": e.phase_defined,
    }
    if spec.law == "pancharatnam":
        report["visibility_closed_form"] = pancharatnam_visibility(spec.d, spec.n, args.lam)
    print(json.dumps(report, indent=2, sort_keys=True))
    return EXIT_OK


def cmd_figure(args) -> int:
    for figure_id in args.figures:
        if figure_id not in FIGURE_IDS:
            raise ConfigError(f"figure id must be in 1..6, got {figure_id}")
    for figure_id in args.figures:
        csv_path, manifest_path = run_figure(figure_id, args.out)
        print(f"wrote {csv_path} and {manifest_path}")
    return EXIT_OK


def _sample_point(rng, max_j_twice: int, max_d: int, index: int):
    """One deterministic oracle test point with a healthy postselection rate.

    Points with analytic probability below 1e-10 are re-drawn: there the
    projected amplitudes are cancellation-dominated and the dense oracle
    loses the digits the comparison needs.
    """
    laws = ("pancharatnam", "symmetric", "fractional", "explicit")
    while True:
        tj = int(rng.integers(1, max_j_twice + 1))
        d = int(rng.integers(2, max_d + 1))
        n = int(rng.integers(1, 4))
        law = laws[index % len(laws)]
        if law == "fractional":
            spec = MeterSpec.fractional(d, n, eps=float(rng.uniform(0.05, 1.0)))
        elif law == "explicit":
            spec = MeterSpec.explicit(tuple(np.round(rng.uniform(-2.0, 2.0, d), 6)), n)
        else:
            spec = MeterSpec(d=d, n=n, law=law)
        lam = float(10.0 ** rng.uniform(-3.0, 0.0))
        theta = float(rng.uniform(0.0, 2.0 * np.pi))
        params = ChannelParams(lam=lam, theta=theta, j=HalfInt(tj))
        if postselection_probability(params, spec) > 1e-10:
            return params, spec


def cmd_oracle_check(args) -> int:
    rng = np.random.default_rng(args.seed)
    worst_p = 0.0
    worst_q = 0.0
    worst_tuple = None
    failures = 0
    for index in range(args.points):
        params, spec = _sample_point(rng, args.max_j_twice, args.max_d, index)
        p_analytic = postselection_probability(params, spec)
        phi = evolve_joint(params, spec)
        p_oracle = float(np.sum(np.abs(phi) ** 2))
        p_err = abs(p_oracle - p_analytic)
        worst_p = max(worst_p, p_err)

        bd = qfi_breakdown(params, spec)
        analytic = bd.i_perp
        if args.debug_wrong_prefactor:
            analytic = 4.0 * (4.0 * bd.q_total * bd.p - 4.0 * bd.q_parallel) / bd.p**2
        fd = qfi_finite_difference(params, spec)
        q_err = abs(fd - analytic)
        tol = max(1e-6 * abs(analytic), 1e-8)
        rel = q_err / max(abs(analytic), 1e-300)
        worst_q = max(worst_q, rel)
        if p_err > 1e-10 or q_err > tol:
            failures += 1
            if worst_tuple is None:
                worst_tuple = {
                    "j_twice": params.j.twice,
                    "d": spec.d,
                    "n": spec.n,
                    "law": spec.law,
                    "lambda": params.lam,
                    "theta": params.theta,
                    "p_analytic": p_analytic,
                    "p_oracle": p_oracle,
                    "qfi_analytic": analytic,
                    "qfi_oracle": fd,
                }
    print(f"points checked:          {args.points}")
    print(f"worst |P_oracle - P|:     {worst_p:.3e}  (tolerance 1e-10)")
    print(f"worst QFI relative error: {worst_q:.3e}  (tolerance max(1e-6 rel, 1e-8 abs))")
    if failures:
        print(f"FAIL: {failures} point(s) breached tolerance; first offender:")
        print(json.dumps(worst_tuple, indent=2, sort_keys=True))
        return EXIT_CHECK_FAILED
    print("PASS")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pqfi",
        description="QFI of postselected compression channels with qudit meters",
    )
    parser.add_argument("--version", action="version", version=f"pqfi {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep", help="grid sweep to CSV + manifest")
    p.add_argument("--j", dest="j_list", type=_parse_j, action="append", required=True,
                   help="spin (repeatable): twice-integer or fraction string '3/2'")
    _add_meter_flags(p)
    p.add_argument("--lambda-min", type=float, required=True)
    p.add_argument("--lambda-max", type=float, required=True)
    p.add_argument("--lambda-count", type=int, required=True)
    p.add_argument("--lambda-scale", choices=("linear", "log"), default="linear")
    p.add_argument("--theta-min", type=float, default=0.0)
    p.add_argument("--theta-max", type=float, default=float(2.0 * np.pi))
    p.add_argument("--theta-count", type=int, required=True)
    p.add_argument("--outputs", default="P,QT,Qpar,IT,Ipar,Iperp,T,SNR,dlambda")
    p.add_argument("--trials", type=int, default=1, help="trial count M for dlambda")
    p.add_argument("--out", required=True, help="output CSV path")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("landmarks", help="characteristic postselection phases")
    _add_channel_flags(p)
    _add_meter_flags(p)
    p.add_argument("--trials", type=int, default=1)
    p.set_defaults(func=cmd_landmarks)

    p = sub.add_parser("phase", help="meter expectation: visibility and phase")
    _add_channel_flags(p)
    _add_meter_flags(p)
    p.set_defaults(func=cmd_phase)

    p = sub.add_parser("figure", help="run canned figure grids (1..6)")
    p.add_argument("figures", type=int, nargs="+", help="figure ids in 1..6")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_figure)

    p = sub.add_parser("oracle-check", help="analytic-vs-oracle regression matrix")
    p.add_argument("--max-j-twice", type=int, default=4)
    p.add_argument("--max-d", type=int, default=8)
    p.add_argument("--points", type=int, default=200)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--debug-wrong-prefactor", action="store_true",
                   help="negative control: compare against a deliberately wrong convention")
    p.set_defaults(func=cmd_oracle_check)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, DomainError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_CONFIG
    except VanishingPostselectionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CHECK_FAILED


if __name__ == "__main__":
    sys.exit(main())
