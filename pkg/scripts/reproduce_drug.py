#!/usr/bin/env python3
"""Drug dosage instance: mean samples of each algorithm over seeded repetitions.

P-first is off by default; on this instance it must separate two
performance means 0.004 apart and runs into the epoch cap.
"""

import argparse

from fbai.harness import ExperimentSpec, run_experiment
from fbai.report import report, samples_table


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="results/drug")
    ap.add_argument("--reps", type=int, default=10)
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--algos", default="ours,f-first,tf-lucb-c,naive")
    ap.add_argument("--shift", action="store_true", help="use the shifted encoding with equal thresholds")
    args = ap.parse_args()
    if args.shift:
        from fbai.instance import preset

        path = f"{args.out}_instance.json"
        preset("drug", shift=True).save(path)
        source = path
    else:
        source = "drug"
    spec = ExperimentSpec([source], algos=args.algos.split(","), reps=args.reps,
                          base_seed=args.seed, out_dir=args.out)
    res = run_experiment(spec)
    report(res.out_dir)
    print(samples_table(res.aggregate))


if __name__ == "__main__":
    main()
