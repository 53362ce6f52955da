#!/usr/bin/env python3
"""Full stability sweep over the parameter grid (log-spaced 4x4x4x4 by
default), writing one verdict row per tuple.

Equivalent to `nschannel sweep` but kept as a script entry point for
reproducing the headline sweep in one command.
"""
import argparse
import sys

from nschannel.cli import run


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="sweep.csv")
    ap.add_argument("--jobs", type=int, default=4)
    ap.add_argument("--steps", type=int, default=4,
                    help="grid points per parameter axis")
    args = ap.parse_args()
    k = args.steps
    sys.exit(run([
        "sweep", "--M", "10",
        "--nu-range", f"0.1:10:{k}",
        "--rho0-range", f"1:10:{k}",
        "--u0-range", f"1:10:{k}",
        "--u1-range", f"1:10:{k}",
        "--jobs", str(args.jobs),
        "--out", args.out,
    ]))


if __name__ == "__main__":
    main()
