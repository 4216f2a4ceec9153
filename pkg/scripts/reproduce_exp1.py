#!/usr/bin/env python3
"""Relative sample counts of all five algorithms on the three K=5, N=3 instances."""

import argparse

from fbai.harness import ExperimentSpec, run_experiment
from fbai.report import relative_table, report


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="results/exp1")
    ap.add_argument("--reps", type=int, default=10)
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--delta", type=float, default=0.1)
    args = ap.parse_args()
    spec = ExperimentSpec(
        instances=["exp1a", "exp1b", "exp1c"],
        deltas=[args.delta],
        reps=args.reps,
        base_seed=args.seed,
        out_dir=args.out,
    )
    res = run_experiment(spec)
    report(res.out_dir)
    print(relative_table(res.aggregate))


if __name__ == "__main__":
    main()
