#!/usr/bin/env python3
"""Reproduce the two R^3 ball-constraint benchmark tables.

Table A: fixed iteration counts from x0 = (1, 2, 7) over 1000 unit
balls; prints the iterate at each checkpoint.
Table B: tolerance-driven run from x0 = (-3, -5, -9) where the feasible
set is {0}; prints the iteration at which each tolerance is reached.

Usage: python3 scripts/run_example1.py [--out DIR]
"""
import argparse

from parproj import builtin_config, run_experiment


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default=None, help="directory for trace CSVs")
    args = ap.parse_args()

    print("Table A: x0 = (1, 2, 7), fixed iteration counts")
    print(f"{'n_max':>6}  {'x_n':>34}  {'time (s)':>8}")
    for n_max in (250, 500, 1000, 2000, 5000):
        cfg = builtin_config("example1a", max_iters=n_max, out=args.out)
        rep = run_experiment(cfg)
        x = ", ".join(f"{v:7.4f}" for v in rep.final.a)
        print(f"{n_max:>6}  ({x})  {rep.elapsed_s:8.2f}")

    print()
    print("Table B: x0 = (-3, -5, -9), run to tolerance")
    print(f"{'TOL':>8}  {'n':>6}  {'x_n':>34}  {'time (s)':>8}")
    for tol in (0.025, 0.0075, 0.005, 0.0015):
        cfg = builtin_config("example1b", tol=tol, out=args.out)
        rep = run_experiment(cfg)
        x = ", ".join(f"{v:7.4f}" for v in rep.final.a)
        print(f"{tol:>8}  {len(rep.trace):>6}  ({x})  {rep.elapsed_s:8.2f}")


if __name__ == "__main__":
    main()
