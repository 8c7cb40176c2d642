#!/usr/bin/env python3
"""Finite-shot convergence of the entropy estimator at one parameter point.

Sweeps the shots-per-setting ladder and prints estimate, bootstrap error
bar, and the true quadrature value so the 1/sqrt(n) approach is visible.
"""

import argparse
import math

from entrobell import AngleGeometry, TmsvParams, d_qm_value, empirical_d_qm


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--r", type=float, default=1.817)
    parser.add_argument("--delta-pi", type=float, default=0.213,
                        help="angle offset in units of pi")
    parser.add_argument("--Delta", type=float, default=6.0, dest="delta_bin")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--ladder", type=int, nargs="*",
                        default=(1000, 3162, 10000, 31623, 100000, 316228, 1000000))
    parser.add_argument("--no-miller-madow", action="store_true")
    args = parser.parse_args(argv)

    state = TmsvParams(args.r)
    delta = args.delta_pi * math.pi
    geometry = AngleGeometry(delta=delta)
    truth = d_qm_value(state, delta, args.delta_bin)
    print(f"# r={args.r:g} delta={args.delta_pi:g}*pi Delta={args.delta_bin:g} "
          f"seed={args.seed} analytic={truth:.10f}")
    print("n_per_setting,estimate,std_error,error_vs_analytic")
    for n in args.ladder:
        est, err = empirical_d_qm(state, geometry, args.delta_bin, n, args.seed,
                                  miller_madow=not args.no_miller_madow)
        print(f"{n},{est:.8f},{err:.8f},{est - truth:+.8f}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
