"""Command-line front door.  Every subcommand is a thin adapter over the API.

Exit codes: 0 success, 1 computational failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import __version__
from .appendix import claim_ledger
from .bounds import (
    BracketOptions,
    alpha0_nonexistence,
    bracket_alpha_star,
    g_function_test,
)
from .errors import BracketNotFoundError, InvalidParameterError, MTLabError
from .functional import (
    MTParams,
    constraint_value,
    j_truncated,
    mt_integral,
    mt_integral_series,
)
from .maximize import GNOptions, MaximizeOptions, maximize_d, maximize_gn, project_to_constraint
from .radial import (
    build_grid,
    critical_exponent,
    grad_norm_pow,
    lp_norm_pow,
    profile_from_csv,
    profile_to_csv,
    sample_profile,
)
from .sweeps import AxisSpec, SweepPlan, phase_map, plan_to_json, run_sweep, sweep_to_csv

DISCLAIMER = (
    "note: reported values are certified lower bounds from feasible profiles; "
    "numerics never certify non-attainment."
)


def _default_threads() -> int:
    env = os.environ.get("MT_LAB_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return os.cpu_count() or 1


def _add_param_args(sp, with_ab: bool = True):
    sp.add_argument("--N", type=int, required=True, help="dimension, integer >= 2")
    sp.add_argument("--alpha", type=float, required=True, help="growth parameter in (0, alpha_N]")
    if with_ab:
        sp.add_argument("--a", type=float, required=True, help="gradient-norm power")
        sp.add_argument("--b", type=float, required=True, help="norm power")


def _add_grid_args(sp):
    sp.add_argument("--r-max", type=float, default=40.0, help="truncation radius (default 40)")
    sp.add_argument("--n-nodes", type=int, default=512, help="quadrature nodes (default 512)")
    sp.add_argument(
        "--grid-scheme",
        choices=["composite-gauss", "graded"],
        default="composite-gauss",
        help="node layout (default composite-gauss)",
    )


def _add_common_args(sp):
    sp.add_argument("--seed", type=int, default=1, help="RNG seed (default 1)")
    sp.add_argument("--restarts", type=int, default=12, help="multi-start count (default 12)")
    sp.add_argument("--threads", type=int, default=None, help="worker threads (default: all cores)")
    sp.add_argument("--format", choices=["json", "csv", "human"], default="json")
    sp.add_argument("--out", type=str, default=None, help="write the report here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mt",
        description="Numerical laboratory for the constrained exponential-growth maximization problem.",
    )
    parser.add_argument("--version", action="version", version=f"mtlab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("eval", help="evaluate the functional at a profile")
    _add_param_args(sp)
    _add_grid_args(sp)
    sp.add_argument("--profile", type=str, default=None, help="CSV file with header r,u")
    sp.add_argument(
        "--family",
        choices=["gaussian", "exp", "sech", "cubic"],
        default="gaussian",
        help="built-in profile family when no CSV is given",
    )
    sp.add_argument("--width", type=float, default=1.0, help="family width parameter")
    sp.add_argument("--normalize", action="store_true", help="project onto the constraint first")
    _add_common_args(sp)

    sp = sub.add_parser("maximize", help="maximize the functional over the constraint surface")
    _add_param_args(sp)
    _add_grid_args(sp)
    sp.add_argument("--profile-out", type=str, default=None, help="write the best profile CSV here")
    sp.add_argument(
        "--allow-infinite-regime",
        action="store_true",
        help="evaluate even at alpha = alpha_N with b >= N (infinite supremum)",
    )
    _add_common_args(sp)

    sp = sub.add_parser("bgn", help="lower-bound the Gagliardo-Nirenberg best constant")
    sp.add_argument("--N", type=int, required=True)
    sp.add_argument("--profile-out", type=str, default=None, help="write the maximizer CSV here")
    _add_common_args(sp)

    sp = sub.add_parser("g-test", help="sufficient attainment test from the GN family")
    _add_param_args(sp)
    sp.add_argument("--bgn", type=float, default=None, help="certified GN lower bound (default: compute)")
    _add_common_args(sp)

    sp = sub.add_parser("alpha0", help="explicit non-attainment bound for small alpha (a <= N')")
    sp.add_argument("--N", type=int, required=True)
    sp.add_argument("--a", type=float, required=True)
    sp.add_argument("--b", type=float, required=True)
    sp.add_argument("--gn-c", type=float, default=None, help="interpolation constant C (default: derived)")
    _add_common_args(sp)

    sp = sub.add_parser("alpha-star", help="bracket the attainment threshold, one-sided")
    sp.add_argument("--N", type=int, required=True)
    sp.add_argument("--a", type=float, required=True)
    sp.add_argument("--b", type=float, required=True)
    sp.add_argument("--alpha-min", type=float, default=None)
    sp.add_argument("--alpha-max", type=float, default=None)
    sp.add_argument("--count", type=int, default=12)
    sp.add_argument("--bisect", type=int, default=0, help="bisection refinements after the scan")
    _add_grid_args(sp)
    _add_common_args(sp)

    sp = sub.add_parser("sweep", help="1D parameter sweep with the remaining parameters fixed")
    sp.add_argument("--N", type=int, required=True)
    sp.add_argument("--axis", choices=["alpha", "a", "b"], required=True)
    sp.add_argument("--min", type=float, required=True)
    sp.add_argument("--max", type=float, required=True)
    sp.add_argument("--count", type=int, required=True)
    sp.add_argument("--spacing", choices=["linear", "log"], default="linear")
    sp.add_argument("--alpha", type=float, default=None)
    sp.add_argument("--a", type=float, default=None)
    sp.add_argument("--b", type=float, default=None)
    _add_grid_args(sp)
    _add_common_args(sp)

    sp = sub.add_parser("phase-map", help="attainment map over (a, b) at fixed alpha")
    sp.add_argument("--N", type=int, required=True)
    sp.add_argument("--alpha", type=float, required=True)
    sp.add_argument("--a-min", type=float, required=True)
    sp.add_argument("--a-max", type=float, required=True)
    sp.add_argument("--a-count", type=int, required=True)
    sp.add_argument("--b-min", type=float, required=True)
    sp.add_argument("--b-max", type=float, required=True)
    sp.add_argument("--b-count", type=int, required=True)
    _add_grid_args(sp)
    _add_common_args(sp)

    sp = sub.add_parser("verify-appendix", help="exact verification of the closed-form computations")
    sp.add_argument("--n-max", type=int, default=1000, help="verify claims for 3 <= N <= n-max")
    _add_common_args(sp)
    sp.set_defaults(format="human")  # ledger CSV plus the final claims line

    return parser


def _validate_params(args) -> MTParams:
    try:
        return MTParams(N=args.N, alpha=args.alpha, a=args.a, b=args.b)
    except InvalidParameterError as exc:
        raise UsageError(str(exc)) from exc


class UsageError(Exception):
    pass


def _emit(text: str, out: str | None):
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")


def _report_text(payload: dict, fmt: str, human_lines=None) -> str:
    if fmt == "human" and human_lines is not None:
        return "\n".join(human_lines) + "\n"
    return json.dumps(payload, indent=2, sort_keys=True)


def _make_options(args, allow_infinite: bool = False) -> MaximizeOptions:
    return MaximizeOptions(
        r_max=args.r_max,
        n_nodes=args.n_nodes,
        scheme=args.grid_scheme,
        restarts=args.restarts,
        seed=args.seed,
        threads=args.threads or _default_threads(),
        allow_infinite_regime=allow_infinite,
    )


def _cmd_eval(args) -> int:
    p = _validate_params(args)
    if args.profile:
        with open(args.profile, "r", encoding="utf-8") as fh:
            u = profile_from_csv(fh.read(), N=args.N)
    else:
        grid = build_grid(args.N, args.r_max, args.n_nodes, args.grid_scheme)
        r_scale = max(args.width, 1e-6)
        families = {
            "gaussian": lambda r: np.exp(-((r / r_scale) ** 2)),
            "exp": lambda r: np.exp(-r / r_scale),
            "sech": lambda r: 1.0 / np.cosh(r / r_scale),
            "cubic": lambda r: np.maximum(0.0, 1.0 - r / r_scale) ** 3,
        }
        u = sample_profile(grid, families[args.family])
    if args.normalize:
        u = project_to_constraint(u, p)
    payload = {
        "params": p.as_dict(),
        "grid": {"r_max": float(u.grid.r_max), "n_nodes": u.grid.n_nodes, "scheme": u.grid.scheme},
        "mt_integral": mt_integral(u, p),
        "mt_integral_series": mt_integral_series(u, p),
        "constraint_value": constraint_value(u, p),
        "j_truncated": j_truncated(u, p),
        "grad_norm": grad_norm_pow(u) ** (1.0 / p.N),
        "norm": lp_norm_pow(u, p.N) ** (1.0 / p.N),
        "finite_supremum_regime": p.finite_supremum,
        "seed": args.seed,
    }
    human = [f"{k}: {v}" for k, v in payload.items()]
    _emit(_report_text(payload, args.format, human), args.out)
    return 0


def _cmd_maximize(args) -> int:
    p = _validate_params(args)
    opts = _make_options(args, allow_infinite=args.allow_infinite_regime)
    report = maximize_d(p, opts)
    payload = report.to_json_dict()
    if args.profile_out:
        with open(args.profile_out, "w", encoding="utf-8") as fh:
            fh.write(profile_to_csv(report.best_profile))
        payload["profile_out"] = args.profile_out
    human = [
        f"best_value (certified lower bound): {report.best_value:.12g}",
        f"universal lower bound: {report.lower_bound:.12g}",
        f"margin: {report.margin:.3e}",
        f"exceeds lower bound: {report.exceeds_lower_bound}",
        f"norm split (grad, norm): ({report.norm_split[0]:.6g}, {report.norm_split[1]:.6g})",
        f"mode: {report.mode_diagnostic}",
        f"iterations: {report.iterations}, restarts: {report.restarts}, seed: {report.seed}",
        DISCLAIMER,
    ]
    _emit(_report_text(payload, args.format, human), args.out)
    return 0


def _cmd_bgn(args) -> int:
    report = maximize_gn(args.N, GNOptions(seed=args.seed))
    payload = report.to_json_dict()
    if args.profile_out:
        with open(args.profile_out, "w", encoding="utf-8") as fh:
            fh.write(profile_to_csv(report.maximizer_profile))
        payload["profile_out"] = args.profile_out
    human = [
        f"bgn_estimate (certified lower bound): {report.bgn_estimate:.12g}",
        f"residual: {report.residual:.3e}",
        f"low_accuracy: {report.low_accuracy}",
        DISCLAIMER,
    ]
    _emit(_report_text(payload, args.format, human), args.out)
    return 0


def _cmd_g_test(args) -> int:
    p = _validate_params(args)
    bgn = args.bgn if args.bgn is not None else maximize_gn(args.N, GNOptions(seed=args.seed)).bgn_estimate
    report = g_function_test(p.alpha, p.a, p.b, p.N, bgn)
    payload = report.to_json_dict()
    human = [
        f"max g: {report.values['max_g']:.12g} at t = {report.values['argmax_t']:.6g}",
        f"g'(1) at a = N': {report.values['gprime_at_1_for_a_conjugate']:.6g}",
        f"verdict: {report.verdict}",
    ]
    _emit(_report_text(payload, args.format, human), args.out)
    return 0


def _cmd_alpha0(args) -> int:
    if args.N < 2:
        raise UsageError(f"N must be >= 2, got {args.N}")
    gn_c = args.gn_c
    if gn_c is None:
        # A valid interpolation constant derived from the computed GN bound;
        # any valid C yields a valid alpha0, smaller C a sharper one.
        gn_c = max(1.0, 1.0 / maximize_gn(args.N, GNOptions(seed=args.seed)).bgn_estimate)
    try:
        report = alpha0_nonexistence(args.a, args.b, args.N, gn_c)
    except InvalidParameterError as exc:
        raise UsageError(str(exc)) from exc
    payload = report.to_json_dict()
    payload["gn_c"] = gn_c
    human = [
        f"alpha0: {report.values['alpha0']:.12g}",
        f"series constant C~: {report.values['c_tilde']:.12g}",
        "below alpha0 the supremum is not attained (closed-form regime)",
    ]
    _emit(_report_text(payload, args.format, human), args.out)
    return 0


def _cmd_alpha_star(args) -> int:
    if args.N < 2:
        raise UsageError(f"N must be >= 2, got {args.N}")
    a_N = critical_exponent(args.N)
    for name in ("alpha_min", "alpha_max"):
        val = getattr(args, name)
        if val is not None and not (0 < val <= a_N):
            raise UsageError(f"--{name.replace('_', '-')} must lie in (0, alpha_N = {a_N:.6g}]")
    opts = BracketOptions(
        alpha_min=args.alpha_min,
        alpha_max=args.alpha_max,
        count=args.count,
        bisect_iters=args.bisect,
        maximize_opts=_make_options(args),
    )
    try:
        report = bracket_alpha_star(args.a, args.b, args.N, opts)
    except BracketNotFoundError as exc:
        _emit(json.dumps({"error": str(exc), "grid": list(exc.grid or ())}, indent=2), args.out)
        return 1
    payload = report.to_json_dict()
    human = [
        f"alpha_high (threshold is certified <= this): {report.alpha_high:.12g}",
        f"alpha_low (largest uncertified grid point, heuristic): {report.alpha_low:.12g}",
        f"alpha_N: {a_N:.12g}",
        DISCLAIMER,
    ]
    _emit(_report_text(payload, args.format, human), args.out)
    return 0


def _sweep_output(result, args) -> int:
    if args.format == "csv":
        text = sweep_to_csv(result)
    elif args.format == "human":
        lines = [sweep_to_csv(result).rstrip("\n"), DISCLAIMER]
        text = "\n".join(lines) + "\n"
    else:
        payload = {
            "plan": result.plan.to_json_dict(),
            "rows": [
                {
                    "params": row.params,
                    "best_value": row.best_value,
                    "lower_bound": row.lower_bound,
                    "margin": row.margin,
                    "verdict": row.verdict,
                    "mode": row.mode,
                    "iterations": row.iterations,
                    "seed": row.seed,
                }
                for row in result.rows
            ],
        }
        text = json.dumps(payload, indent=2, sort_keys=True)
    _emit(text, args.out)
    if args.out and args.format == "csv":
        with open(args.out + ".plan.json", "w", encoding="utf-8") as fh:
            fh.write(plan_to_json(result.plan))
    return 0


def _cmd_sweep(args) -> int:
    fixed = {}
    for name in ("alpha", "a", "b"):
        val = getattr(args, name)
        if name == args.axis:
            if val is not None:
                raise UsageError(f"--{name} is the sweep axis; do not also fix it")
            continue
        if val is None:
            raise UsageError(f"--{name} must be fixed when sweeping --axis {args.axis}")
        fixed[name] = val
    try:
        plan = SweepPlan(
            N=args.N,
            axes=(AxisSpec(args.axis, args.min, args.max, args.count, args.spacing),),
            fixed=fixed,
            seed=args.seed,
            threads=args.threads or _default_threads(),
            options=_make_options(args),
        )
    except InvalidParameterError as exc:
        raise UsageError(str(exc)) from exc
    return _sweep_output(run_sweep(plan), args)


def _cmd_phase_map(args) -> int:
    try:
        result = phase_map(
            AxisSpec("a", args.a_min, args.a_max, args.a_count),
            AxisSpec("b", args.b_min, args.b_max, args.b_count),
            alpha=args.alpha,
            N=args.N,
            seed=args.seed,
            threads=args.threads or _default_threads(),
            options=_make_options(args),
        )
    except InvalidParameterError as exc:
        raise UsageError(str(exc)) from exc
    return _sweep_output(result, args)


def _cmd_verify_appendix(args) -> int:
    if args.n_max < 3:
        raise UsageError(f"--n-max must be >= 3, got {args.n_max}")
    ledger = claim_ledger(args.n_max)
    csv_text = ledger.to_csv()
    ok = ledger.all_claims_hold
    if args.format == "json":
        payload = {
            "n_max": args.n_max,
            "all_claims_hold": ok,
            "exp5": {k: (str(v) if not isinstance(v, (bool, float, int)) else v) for k, v in ledger.exp5.items()},
            "decomposition_max_error": ledger.decomposition_max_error,
            "csv": csv_text,
        }
        text = json.dumps(payload, indent=2, sort_keys=True)
    else:
        tail = "all claims hold" if ok else "CLAIM FAILURE"
        text = csv_text + tail + "\n"
    _emit(text, args.out)
    if args.out:
        # keep the console confirmation even when the ledger goes to a file
        print("all claims hold" if ok else "CLAIM FAILURE")
    return 0 if ok else 1


COMMANDS = {
    "eval": _cmd_eval,
    "maximize": _cmd_maximize,
    "bgn": _cmd_bgn,
    "g-test": _cmd_g_test,
    "alpha0": _cmd_alpha0,
    "alpha-star": _cmd_alpha_star,
    "sweep": _cmd_sweep,
    "phase-map": _cmd_phase_map,
    "verify-appendix": _cmd_verify_appendix,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except BracketNotFoundError as exc:
        print(f"computation failed: {exc}", file=sys.stderr)
        return 1
    except MTLabError as exc:
        print(f"computation failed: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
