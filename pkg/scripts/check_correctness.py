#!/usr/bin/env python3
"""Error counts of the main algorithm over many seeded runs, next to the lower bound."""

import argparse

from fbai.complexity import classify, lower_bound
from fbai.harness import ExperimentSpec, run_experiment
from fbai.instance import preset


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--presets", default="exp1a,exp1b,exp1c,drug")
    ap.add_argument("--reps", type=int, default=100)
    ap.add_argument("--delta", type=float, default=0.1)
    ap.add_argument("--seed", type=int, default=42)
    args = ap.parse_args()
    for name in args.presets.split(","):
        res = run_experiment(ExperimentSpec([name], algos=["ours"], deltas=[args.delta],
                                            reps=args.reps, base_seed=args.seed))
        a = res.aggregate[0]
        lb = lower_bound(classify(preset(name)), args.delta)
        print(f"{name}: errors {a.error_count}/{a.reps}, capped {a.capped_count}, "
              f"mean samples {a.mean_samples:.0f} (lower bound {lb:.1f})")


if __name__ == "__main__":
    main()
