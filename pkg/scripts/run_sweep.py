#!/usr/bin/env python3
"""Sweep the per-object budget factor for one user and write the curve CSV.

Equivalent to `attnalloc sweep`. The improvement of the attention-aware
allocation over the uniform baseline is reported at each budget factor.
"""

import argparse
import dataclasses

from attnalloc import ExperimentConfig, run_sweep
from attnalloc.config import load_config
from attnalloc.experiment import sweep_to_csv


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--config", default=None, help="experiment config file")
    parser.add_argument("--seed", type=int, default=None, help="master seed override")
    parser.add_argument("--user", type=int, default=None,
                        help="user id (default: the configured sweep user)")
    parser.add_argument("--out", default="sweep.csv", help="output CSV path")
    args = parser.parse_args()

    config = load_config(args.config) if args.config else ExperimentConfig()
    if args.seed is not None:
        config = dataclasses.replace(config, master_seed=args.seed)

    report = run_sweep(config, args.user)
    sweep_to_csv(report, args.out)
    print(f"user {report.user_id}")
    for factor, improvement in report.points:
        print(f"  budget factor {factor:5.1f} K -> improvement {improvement:6.2f}%")
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
