"""Command-line front end.

Subcommands: eval (single point), scan (dense grid), minimize (bounded
search), validate (self-check suite), sample (finite-shot runs), figure
(canned datasets fig1 and fig2).  Exit codes: 0 success, 1 failed
validation checks, 2 invalid arguments, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from contextlib import contextmanager

import numpy as np

from ._version import __version__
from .bell import (
    AngleGeometry,
    MinimizeOptions,
    evaluate,
    evaluate_mutual_info,
    minimize,
    scan,
    scan_zero_delta,
)
from .coarse_grain import (
    DEFAULT_TAIL_EPSILON,
    GridTooLarge,
    QuadratureBudgetExceeded,
    binned_joint,
)
from .entropy import InvalidDistribution
from .experiment_sim import DEFAULT_BOOTSTRAP, empirical_d_qm, sample_pairs
from .gaussian_core import TmsvParams, TruncationNotConverged
from .validation import run_checks

_NUMERIC_ERRORS = (GridTooLarge, QuadratureBudgetExceeded, TruncationNotConverged,
                   InvalidDistribution)

_FIG1_DELTAS = (1.5, 3.5, 6.0)


def _workers() -> int | None:
    raw = os.environ.get("ENTROBELL_THREADS")
    if raw is None or raw == "":
        return None
    try:
        n = int(raw)
    except ValueError:
        raise SystemExit(f"entrobell: ENTROBELL_THREADS must be an integer, got {raw!r}")
    return n if n > 1 else None


@contextmanager
def _sink(path: str | None):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8") as fh:
            yield fh


def _emit_json(payload: dict, args) -> None:
    with _sink(args.output) as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _resolve_delta(args, parser) -> float:
    if args.delta is not None and args.delta_pi is not None:
        parser.error("give either --delta or --delta-pi, not both")
    if args.delta is not None:
        return float(args.delta)
    if args.delta_pi is not None:
        return float(args.delta_pi) * math.pi
    parser.error("one of --delta or --delta-pi is required")
    raise AssertionError("unreachable")


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--tail-epsilon", type=float, default=DEFAULT_TAIL_EPSILON,
                        help="guaranteed uncaptured probability (default 1e-12)")
    parser.add_argument("--format", choices=("text", "json", "csv"), default="text",
                        help="output format (default: pretty text)")
    parser.add_argument("--output", default=None,
                        help="write the payload here instead of standard output")
    parser.add_argument("--config", default=None,
                        help="JSON file whose keys mirror the long flags")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="entrobell",
        description="Entropic Bell inequality for coarse-grained homodyne "
                    "measurements on a two-mode squeezed vacuum.",
    )
    parser.add_argument("--version", action="version", version=f"entrobell {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_eval = sub.add_parser("eval", help="evaluate d_qm at one parameter point")
    p_eval.add_argument("--r", type=float, default=None, help="squeezing parameter")
    p_eval.add_argument("--delta", type=float, default=None, help="angle offset, radians")
    p_eval.add_argument("--delta-pi", type=float, default=None,
                        help="angle offset in units of pi")
    p_eval.add_argument("--Delta", type=float, default=None, dest="delta_bin",
                        help="bin width")
    p_eval.add_argument("--theta", type=float, default=0.0,
                        help="free base angle (result is invariant)")
    p_eval.add_argument("--mutual-info", action="store_true",
                        help="also report the mutual-information margin")
    p_eval.add_argument("--dump-dist", default=None, metavar="PREFIX",
                        help="dump the four binned joints to PREFIX.<pair>.csv")
    _add_common(p_eval)

    p_scan = sub.add_parser("scan", help="dense d_qm grid at fixed bin width")
    p_scan.add_argument("--Delta", type=float, default=None, dest="delta_bin")
    p_scan.add_argument("--r-range", type=float, nargs=2, default=(0.0, 2.0),
                        metavar=("LO", "HI"))
    p_scan.add_argument("--r-points", type=int, default=41)
    p_scan.add_argument("--delta-range", type=float, nargs=2, default=(0.0, math.pi),
                        metavar=("LO", "HI"))
    p_scan.add_argument("--delta-points", type=int, default=65)
    _add_common(p_scan)

    p_min = sub.add_parser("minimize", help="search the (r, delta) box for the minimum")
    p_min.add_argument("--Delta", type=float, default=None, dest="delta_bin")
    p_min.add_argument("--r-range", type=float, nargs=2, default=(0.0, 2.0),
                       metavar=("LO", "HI"))
    p_min.add_argument("--delta-range", type=float, nargs=2, default=(0.0, math.pi),
                       metavar=("LO", "HI"))
    p_min.add_argument("--coarse-points", type=int, default=48,
                       help="coarse grid points per axis")
    p_min.add_argument("--refine-starts", type=int, default=8)
    _add_common(p_min)

    p_val = sub.add_parser("validate", help="run the self-check suite")
    p_val.add_argument("--quick", action="store_true",
                       help="trimmed suite, finishes in seconds")
    p_val.add_argument("--perturb-norm", type=float, default=0.0,
                       help="fault-injection offset for the normalization check")
    _add_common(p_val)

    p_sam = sub.add_parser("sample", help="finite-shot simulation")
    p_sam.add_argument("--r", type=float, default=None)
    p_sam.add_argument("--n", type=int, default=None, help="shots per setting")
    p_sam.add_argument("--seed", type=int, default=0)
    p_sam.add_argument("--phi-sum", type=float, default=None,
                       help="dump raw (a, b) shots for this phase sum instead "
                            "of estimating d_qm")
    p_sam.add_argument("--delta", type=float, default=None)
    p_sam.add_argument("--delta-pi", type=float, default=None)
    p_sam.add_argument("--Delta", type=float, default=None, dest="delta_bin")
    p_sam.add_argument("--no-miller-madow", action="store_true",
                       help="disable the entropy bias correction")
    p_sam.add_argument("--bootstrap", type=int, default=DEFAULT_BOOTSTRAP,
                       help="bootstrap resamples for the error bar")
    _add_common(p_sam)

    p_fig = sub.add_parser("figure", help="emit a canned dataset")
    p_fig.add_argument("name", choices=("fig1", "fig2"))
    p_fig.add_argument("--Delta", type=float, nargs="*", default=None, dest="delta_bins",
                       help="bin widths for fig1 (default: 1.5 3.5 6)")
    p_fig.add_argument("--r-range", type=float, nargs=2, default=None,
                       metavar=("LO", "HI"))
    p_fig.add_argument("--r-points", type=int, default=None)
    p_fig.add_argument("--delta-points", type=int, default=65,
                       help="fig1 angle-offset points over [0, pi]")
    p_fig.add_argument("--Delta-range", type=float, nargs=2, default=(0.5, 30.0),
                       dest="delta_bin_range", metavar=("LO", "HI"),
                       help="fig2 bin-width axis")
    p_fig.add_argument("--Delta-points", type=int, default=30, dest="delta_bin_points")
    _add_common(p_fig)

    # Subcommands parse into a fresh namespace, so defaults injected by
    # --config must be set on the subparser, not just the root parser.
    parser.subparser_map = {
        "eval": p_eval, "scan": p_scan, "minimize": p_min,
        "validate": p_val, "sample": p_sam, "figure": p_fig,
    }
    return parser


def _apply_config(parser, argv):
    """Two-phase parse: values from --config become defaults, flags win."""
    probe = argparse.ArgumentParser(add_help=False)
    probe.add_argument("--config", default=None)
    known, _ = probe.parse_known_args(argv)
    args = parser.parse_args(argv)
    if known.config is None:
        return args
    with open(known.config, encoding="utf-8") as fh:
        cfg = json.load(fh)
    if not isinstance(cfg, dict):
        parser.error(f"config {known.config} must hold a JSON object")
    unknown = [k for k in cfg if not hasattr(args, k)]
    if unknown:
        parser.error(f"config keys not recognised: {', '.join(sorted(unknown))}")
    parser.set_defaults(**cfg)
    parser.subparser_map[args.command].set_defaults(**cfg)
    return parser.parse_args(argv)


_PAIR_TAGS = ("ab_prime", "aprime_bprime", "aprime_b", "ab")


_FLAG_OF = {"delta_bin": "--Delta"}


def _require(parser, args, *names) -> None:
    missing = [_FLAG_OF.get(n, f"--{n.replace('_', '-')}")
               for n in names if getattr(args, n) is None]
    if missing:
        parser.error("missing required arguments: " + ", ".join(missing))


def _cmd_eval(args, parser) -> int:
    _require(parser, args, "r", "delta_bin")
    delta = _resolve_delta(args, parser)
    state = TmsvParams(args.r)
    geometry = AngleGeometry(delta=delta, theta=args.theta)
    ev = evaluate(state, geometry, args.delta_bin, args.tail_epsilon)
    payload = ev.to_dict()
    if args.mutual_info:
        payload["mutual_info_margin"] = evaluate_mutual_info(
            state, geometry, args.delta_bin, args.tail_epsilon)
    if args.dump_dist is not None:
        for tag, phs in zip(_PAIR_TAGS, geometry.pair_sums()):
            dist = binned_joint(state, phs, args.delta_bin, args.tail_epsilon)
            with open(f"{args.dump_dist}.{tag}.csv", "w", encoding="utf-8") as fh:
                dist.to_csv(fh)

    if args.format == "json":
        _emit_json(payload, args)
    elif args.format == "csv":
        with _sink(args.output) as fh:
            fh.write("r,delta,Delta,d_qm\n")
            fh.write(f"{ev.r:.12g},{delta:.12g},{ev.delta_bin:.12g},{ev.d_qm:.12g}\n")
    else:
        with _sink(args.output) as fh:
            verdict = "violation" if ev.d_qm < 0 else "no violation"
            fh.write(f"r          = {ev.r:g}\n")
            fh.write(f"delta      = {delta:.10g}  ({delta / math.pi:.6g} pi)\n")
            fh.write(f"Delta      = {ev.delta_bin:g}\n")
            fh.write(f"theta      = {ev.theta:g}\n")
            fh.write(f"d_qm       = {ev.d_qm:.10f}  ({verdict})\n")
            fh.write(f"S(A|B')    = {ev.term_a_given_bprime:.10f}\n")
            fh.write(f"S(B'|A')   = {ev.term_bprime_given_aprime:.10f}\n")
            fh.write(f"S(A'|B)    = {ev.term_aprime_given_b:.10f}\n")
            fh.write(f"S(A|B)     = {ev.term_a_given_b:.10f}\n")
            if args.mutual_info:
                fh.write(f"MI margin  = {payload['mutual_info_margin']:.10f}\n")
            n_bins = 2 * ev.grid_l_max + 1
            fh.write(f"grid       = L {ev.grid_l_max} ({n_bins}x{n_bins} bins), "
                     f"tail epsilon {ev.tail_epsilon:g}\n")
    return 0


def _cmd_scan(args, parser) -> int:
    _require(parser, args, "delta_bin")
    r_lo, r_hi = args.r_range
    d_lo, d_hi = args.delta_range
    if args.r_points < 1 or args.delta_points < 1 or r_hi < r_lo or d_hi < d_lo:
        parser.error("scan ranges must be ordered and point counts positive")
    res = scan(
        np.linspace(r_lo, r_hi, args.r_points),
        np.linspace(d_lo, d_hi, args.delta_points),
        args.delta_bin, args.tail_epsilon, workers=_workers(),
    )
    if args.format == "json":
        _emit_json(res.to_dict(), args)
    elif args.format == "csv":
        with _sink(args.output) as fh:
            res.to_csv(fh)
    else:
        d_min, r_at, d_at = res.min_entry()
        with _sink(args.output) as fh:
            fh.write(f"scan: {args.r_points} r values x {args.delta_points} "
                     f"delta values at Delta = {args.delta_bin:g}\n")
            fh.write(f"grid minimum d_qm = {d_min:.10f} at r = {r_at:.6g}, "
                     f"delta = {d_at:.6g} ({d_at / math.pi:.6g} pi)\n")
            fh.write("use --format csv or json for the full matrix\n")
    return 0


def _cmd_minimize(args, parser) -> int:
    _require(parser, args, "delta_bin")
    r_lo, r_hi = args.r_range
    d_lo, d_hi = args.delta_range
    if r_hi < r_lo or d_hi < d_lo or r_lo < 0:
        parser.error("minimize bounds must be ordered with r >= 0")
    opts = MinimizeOptions(
        r_points=args.coarse_points, delta_points=args.coarse_points,
        refine_starts=args.refine_starts, workers=_workers(),
    )
    res = minimize((r_lo, r_hi), (d_lo, d_hi), args.delta_bin,
                   args.tail_epsilon, options=opts)
    if args.format in ("json", "csv"):
        _emit_json(res.to_dict(), args)
    else:
        with _sink(args.output) as fh:
            fh.write(f"d_min      = {res.d_min:.10f}\n")
            fh.write(f"r*         = {res.r_star:.6f}\n")
            fh.write(f"delta*     = {res.delta_star:.6f}  "
                     f"({res.delta_star / math.pi:.6g} pi)\n")
            fh.write(f"Delta      = {res.delta_bin:g}\n")
            fh.write(f"converged  = {res.converged}  "
                     f"({res.n_evaluations} evaluations)\n")
    return 0


def _cmd_validate(args, parser) -> int:
    results = run_checks(quick=args.quick, perturb_norm=args.perturb_norm)
    failed = [res.name for res in results if not res.passed]
    with _sink(args.output) as fh:
        if args.format == "json":
            json.dump({
                "version": __version__,
                "quick": args.quick,
                "checks": [res.__dict__ for res in results],
                "failed": failed,
            }, fh, indent=2, sort_keys=True)
            fh.write("\n")
        else:
            for res in results:
                mark = "PASS" if res.passed else "FAIL"
                fh.write(f"[{mark}] {res.name} ({res.seconds:.2f} s): {res.detail}\n")
            fh.write(f"{len(results) - len(failed)}/{len(results)} checks passed\n")
    if failed:
        print("failed checks: " + ", ".join(failed), file=sys.stderr)
        return 1
    return 0


def _cmd_sample(args, parser) -> int:
    _require(parser, args, "r", "n")
    if args.n < 1:
        parser.error("--n must be positive")
    state = TmsvParams(args.r)
    if args.phi_sum is not None:
        batch = sample_pairs(state, args.phi_sum, args.n, args.seed)
        with _sink(args.output) as fh:
            batch.to_csv(fh)
        return 0
    if args.delta_bin is None:
        parser.error("--Delta is required when estimating d_qm from shots")
    delta = _resolve_delta(args, parser)
    estimate, err = empirical_d_qm(
        state, AngleGeometry(delta=delta), args.delta_bin, args.n, args.seed,
        miller_madow=not args.no_miller_madow, n_bootstrap=args.bootstrap,
    )
    payload = {
        "version": __version__,
        "kind": "sample",
        "r": args.r,
        "delta": delta,
        "Delta": args.delta_bin,
        "n_per_setting": args.n,
        "seed": args.seed,
        "miller_madow": not args.no_miller_madow,
        "bootstrap": args.bootstrap,
        "d_qm_estimate": estimate,
        "std_error": err,
    }
    if args.format == "json":
        _emit_json(payload, args)
    else:
        with _sink(args.output) as fh:
            fh.write(f"d_qm estimate = {estimate:.6f} +/- {err:.6f} "
                     f"({args.n} shots per setting, seed {args.seed})\n")
    return 0


def _cmd_figure(args, parser) -> int:
    if args.name == "fig1":
        delta_bins = args.delta_bins if args.delta_bins else list(_FIG1_DELTAS)
        r_lo, r_hi = args.r_range if args.r_range else (0.0, 2.0)
        r_points = args.r_points if args.r_points else 41
        r_values = np.linspace(r_lo, r_hi, r_points)
        d_values = np.linspace(0.0, math.pi, args.delta_points)
        results = [scan(r_values, d_values, db, args.tail_epsilon, workers=_workers())
                   for db in delta_bins]
        if args.format == "json":
            _emit_json({
                "version": __version__,
                "kind": "fig1",
                "panels": [res.to_dict() for res in results],
            }, args)
        else:
            with _sink(args.output) as fh:
                fh.write("r,delta,Delta,d_qm\n")
                for res in results:
                    for i, r in enumerate(res.r_values):
                        for j, d in enumerate(res.delta_values):
                            fh.write(f"{r:.12g},{d:.12g},{res.delta_bin:.12g},"
                                     f"{res.d_qm[i, j]:.12g}\n")
        return 0

    r_lo, r_hi = args.r_range if args.r_range else (0.0, 3.0)
    r_points = args.r_points if args.r_points else 31
    db_lo, db_hi = args.delta_bin_range
    res = scan_zero_delta(
        np.linspace(r_lo, r_hi, r_points),
        np.linspace(db_lo, db_hi, args.delta_bin_points),
        args.tail_epsilon, workers=_workers(),
    )
    if args.format == "json":
        _emit_json(res.to_dict(), args)
    else:
        with _sink(args.output) as fh:
            res.to_csv(fh)
    return 0


_DISPATCH = {
    "eval": _cmd_eval,
    "scan": _cmd_scan,
    "minimize": _cmd_minimize,
    "validate": _cmd_validate,
    "sample": _cmd_sample,
    "figure": _cmd_figure,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = _apply_config(parser, sys.argv[1:] if argv is None else argv)
    try:
        return _DISPATCH[args.command](args, parser)
    except _NUMERIC_ERRORS as exc:
        print(f"entrobell: numeric failure: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"entrobell: invalid arguments: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
