"""Command-line entry point.

    parproj run --experiment example1a --max-iters 250 --out results/
    parproj run --config my_experiment.cfg --workers 2 --time-modes

Exit codes: 0 success, 2 config error, 3 solver error, 4 determinism
failure.
"""
from __future__ import annotations

import argparse
import json
import sys

from .bench import (
    BUILTIN_IDS,
    ConfigError,
    DeterminismError,
    builtin_config,
    parse_config,
    run_experiment,
    time_modes,
)
from .sets import InfeasibleError
from .solver import SolverError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SOLVER = 3
EXIT_DETERMINISM = 4


def _build_parser():
    p = argparse.ArgumentParser(
        prog="parproj",
        description="Parallel hybrid projection solver benchmarks",
    )
    sub = p.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run one experiment")
    src = run.add_mutually_exclusive_group(required=True)
    src.add_argument("--config", help="path to a key = value config file")
    src.add_argument(
        "--experiment", choices=BUILTIN_IDS, help="built-in experiment id"
    )
    run.add_argument("--workers", type=int, default=None)
    run.add_argument("--max-iters", type=int, default=None)
    run.add_argument("--tol", type=float, default=None,
                     help="distance-to-target stopping tolerance")
    run.add_argument("--out", default=None, help="output directory for CSVs")
    run.add_argument("--time-modes", action="store_true",
                     help="time sequential vs parallel and report the speedup")
    return p


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.config is not None:
            cfg = parse_config(args.config)
            for key, val in (
                ("workers", args.workers),
                ("max_iters", args.max_iters),
                ("tol", args.tol),
                ("out", args.out),
            ):
                if val is not None:
                    setattr(cfg, key, val)
        else:
            cfg = builtin_config(
                args.experiment,
                workers=args.workers,
                max_iters=args.max_iters,
                tol=args.tol,
                out=args.out,
            )
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        report = time_modes(cfg) if args.time_modes else run_experiment(cfg)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except DeterminismError as e:
        print(f"determinism failure: {e}", file=sys.stderr)
        return EXIT_DETERMINISM
    except (SolverError, InfeasibleError, ValueError) as e:
        print(f"solver error: {e}", file=sys.stderr)
        return EXIT_SOLVER

    print(json.dumps(report.summary(), indent=2))
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
