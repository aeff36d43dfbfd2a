#!/usr/bin/env python3
"""Time sequential vs parallel runs and verify trace determinism.

Runs the chosen experiment once with 1 worker and once with --workers
threads, checks that the two traces are bit-identical, and reports the
speedup S_p = T_seq / T_par and efficiency S_p / workers.

Usage: python3 scripts/time_parallel.py [--experiment ID] [--workers N]
"""
import argparse
import os

from parproj import BUILTIN_IDS, builtin_config, time_modes


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--experiment", choices=BUILTIN_IDS, default="example2a")
    ap.add_argument("--workers", type=int, default=2)
    ap.add_argument("--max-iters", type=int, default=None)
    args = ap.parse_args()

    cores = os.cpu_count() or 1
    if cores < args.workers:
        print(f"note: {args.workers} workers on {cores} CPU core(s); "
              "no speedup is expected, but determinism is still checked")

    cfg = builtin_config(args.experiment, workers=args.workers,
                         max_iters=args.max_iters)
    rep = time_modes(cfg)  # raises DeterminismError on any trace mismatch
    print(f"traces bit-identical across 1 and {args.workers} workers")
    print(f"T_seq = {rep.t_seq:.3f}s  T_par = {rep.t_par:.3f}s  "
          f"S_p = {rep.speedup:.2f}  E_p = {rep.efficiency:.2f}")


if __name__ == "__main__":
    main()
