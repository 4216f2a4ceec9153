#!/usr/bin/env python3
"""Sweeps over N, K and delta; writes one run directory and plot per sweep."""

import argparse
from pathlib import Path

from fbai.harness import DEFAULT_SWEEPS, ExperimentSpec, run_experiment
from fbai.report import report

ALGOS = ["ours", "f-first", "p-first", "tf-lucb-c", "naive"]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="results/sweeps")
    ap.add_argument("--reps", type=int, default=10)
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--sweeps", default="exp2_vary_n,exp2_vary_k,exp2_delta")
    ap.add_argument("--algos", default=",".join(ALGOS))
    args = ap.parse_args()
    algos = args.algos.split(",")
    for name in args.sweeps.split(","):
        param, grid = DEFAULT_SWEEPS[name]
        out = Path(args.out) / name
        if param == "delta":
            spec = ExperimentSpec([name], algos=algos, deltas=list(grid), reps=args.reps,
                                  base_seed=args.seed, out_dir=str(out))
        else:
            spec = ExperimentSpec([name], algos=algos, reps=args.reps, base_seed=args.seed,
                                  sweep_param=param, sweep_values=list(grid), out_dir=str(out))
        run_experiment(spec)
        files = report(out)
        print(name, "->", files.get("plot", files["markdown"]))


if __name__ == "__main__":
    main()
