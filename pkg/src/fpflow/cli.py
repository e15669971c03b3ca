"""Command-line entry point.

Subcommands map one-to-one onto the experiments; --config points at a JSON
file mirroring ExperimentConfig, and --seed/--out/--agent override it.
Failures exit nonzero after printing a single machine-readable JSON error
line to stderr.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys

from .experiments import (EXPERIMENTS, ExperimentConfig, config_from_dict,
                          load_config, run_experiment)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fpflow",
        description="Stationary-density estimation and exploration benchmarks")
    sub = parser.add_subparsers(dest="experiment", required=True)
    for name in EXPERIMENTS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON config file")
        p.add_argument("--seed", help="comma-separated seed list")
        p.add_argument("--out", help="output directory")
        p.add_argument("--agent", help="comma-separated agent names")
    return parser


def config_from_args(args) -> ExperimentConfig:
    cfg = load_config(args.config) if args.config else config_from_dict({})
    overrides = {"experiment": args.experiment}
    if args.seed:
        overrides["seeds"] = tuple(int(s) for s in args.seed.split(","))
    if args.out:
        overrides["out_dir"] = args.out
    if args.agent:
        overrides["agents"] = tuple(args.agent.split(","))
    return dataclasses.replace(cfg, **overrides)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
        run_experiment(cfg)
    except Exception as exc:  # noqa: BLE001 - single reporting point
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}),
              file=sys.stderr)
        return 1
    print(f"{args.experiment}: wrote results to {cfg.out_dir}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
