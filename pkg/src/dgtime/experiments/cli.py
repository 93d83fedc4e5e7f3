"""Command-line entry point: one subcommand per experiment.

Each run merges the experiment's defaults with an optional flat key=value
config file, writes ``<out>/<experiment>.csv``, prints one CONFIRMED/FAILED
summary line, and exits nonzero when any criterion fails.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

from dgtime.experiments.config import DEFAULTS, EXPERIMENT_IDS, load_config
from dgtime.experiments.runners import run_experiment


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dgtime",
        description="Stability and convergence experiments for the DG time stepper",
    )
    sub = parser.add_subparsers(dest="experiment", required=True)
    for name in EXPERIMENT_IDS:
        keys = ", ".join(sorted(DEFAULTS[name]))
        cmd = sub.add_parser(name, help=f"config keys: {keys}")
        cmd.add_argument("--config", type=Path, default=None, help="flat key=value file")
        cmd.add_argument("--out", type=Path, default=Path("."), help="output directory")
        cmd.add_argument("--seed", type=int, default=None, help="override the config seed")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = str(args.seed)
    cfg = load_config(args.experiment, args.config, overrides)
    started = time.perf_counter()
    result = run_experiment(cfg)
    elapsed = time.perf_counter() - started
    args.out.mkdir(parents=True, exist_ok=True)
    csv_path = args.out / f"{args.experiment}.csv"
    result.write_csv(csv_path)
    for note in result.notes:
        print(f"note: {note}")
    print(f"wrote {csv_path} ({elapsed:.1f}s)")
    print(result.summary())
    return 0 if result.passed else 1


if __name__ == "__main__":
    sys.exit(main())
