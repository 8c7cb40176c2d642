#!/usr/bin/env python3
"""Regenerate the two canned survey datasets as CSV files.

fig1: d_qm over the (r, delta) plane, one file per bin width.
fig2: the zero-offset boundary 2*S(0) over the (r, Delta) plane.

Thin wrapper over the CLI so the files carry exactly the schema the
`entrobell figure` subcommand emits.
"""

import argparse
import pathlib

from entrobell.cli import main as cli_main


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-dir", default="data",
                        help="directory for the CSV files (default: data/)")
    parser.add_argument("--Delta", type=float, nargs="*",
                        default=(1.5, 3.5, 6.0), dest="delta_bins",
                        help="fig1 bin widths, one file each")
    parser.add_argument("--delta-points", type=int, default=65)
    parser.add_argument("--r-points", type=int, default=41)
    args = parser.parse_args(argv)

    out = pathlib.Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for delta_bin in args.delta_bins:
        path = out / f"fig1_Delta_{delta_bin:g}.csv"
        code = cli_main(["figure", "fig1", "--Delta", f"{delta_bin:g}",
                         "--r-points", str(args.r_points),
                         "--delta-points", str(args.delta_points),
                         "--output", str(path)])
        if code != 0:
            return code
        print(f"wrote {path}")
    path = out / "fig2_zero_offset.csv"
    code = cli_main(["figure", "fig2", "--output", str(path)])
    if code == 0:
        print(f"wrote {path}")
    return code


if __name__ == "__main__":
    raise SystemExit(main())
