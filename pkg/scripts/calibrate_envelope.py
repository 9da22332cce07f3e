#!/usr/bin/env python3
"""Measure the default experiment's mean improvement across master seeds and
record the resulting envelope.

The per-seed means establish the statistical envelope that the acceptance
suite checks the pipeline against; the result is written to
calibration/envelope.json with a margin around the observed range.
"""

import argparse
import dataclasses
import json
import pathlib

from attnalloc import ExperimentConfig, run_all


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seeds", type=int, default=10, help="number of master seeds")
    parser.add_argument("--out", default=None,
                        help="output JSON (default: calibration/envelope.json "
                             "next to this script's repository root)")
    args = parser.parse_args()

    means = {}
    for seed in range(args.seeds):
        config = dataclasses.replace(ExperimentConfig(), master_seed=seed)
        _, agg = run_all(config)
        means[seed] = agg.mean_improvement_pct
        print(f"seed {seed}: mean improvement {agg.mean_improvement_pct:.3f}%")

    lo, hi = min(means.values()), max(means.values())
    # generous margin so the envelope is a stable acceptance bound rather
    # than a restatement of this particular run
    envelope = [round(lo - 1.5, 1), round(hi + 2.5, 1)]
    print(f"observed range [{lo:.3f}, {hi:.3f}] -> envelope {envelope}")

    if args.out:
        out = pathlib.Path(args.out)
    else:
        out = pathlib.Path(__file__).resolve().parent.parent / "calibration" / "envelope.json"
    out.parent.mkdir(parents=True, exist_ok=True)
    doc = {
        "seeds": list(means),
        "mean_improvement_pct": {str(k): v for k, v in means.items()},
        "observed_range": [lo, hi],
        "envelope": envelope,
    }
    with open(out, "w", newline="\n") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
