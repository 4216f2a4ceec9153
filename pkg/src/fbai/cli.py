"""Command line entry point ``fbai``."""

from __future__ import annotations

import argparse
import json
import sys

from .algorithms import ALGORITHMS, DEFAULT_EPOCH_CAP
from .complexity import analyze
from .harness import DEFAULT_SWEEPS, ExperimentSpec, SchemaError, SpecError, load_instance, run_experiment
from .instance import PRESETS, InvalidInstanceError
from .report import report, samples_table


def _csv_list(text: str) -> list[str]:
    return [t.strip() for t in text.split(",") if t.strip()]


def _floats(text: str) -> list[float]:
    return [float(t) for t in _csv_list(text)]


def _ints(text: str) -> list[int]:
    return [int(t) for t in _csv_list(text)]


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--algos", type=_csv_list, default=list(ALGORITHMS),
                   help=f"comma-separated subset of {','.join(ALGORITHMS)}")
    p.add_argument("--reps", type=int, default=10)
    p.add_argument("--seed", type=int, default=0, help="base seed (64-bit)")
    p.add_argument("--epoch-cap", type=int, default=DEFAULT_EPOCH_CAP)
    p.add_argument("--workers", type=int, default=None, help="worker processes (default: FBAI_THREADS or cpu count)")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--no-report", action="store_true", help="skip writing report.md and plots")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fbai", description="Feasible best-arm identification benchmarks.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="repeat runs on one or more instances")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--preset", type=_csv_list, help=f"comma-separated presets from {','.join(PRESETS)}")
    src.add_argument("--instance", nargs="+", help="instance JSON file(s)")
    p.add_argument("--delta", type=_floats, default=[0.1], help="confidence level(s), comma-separated")
    _common(p)

    p = sub.add_parser("sweep", help="sweep N, K or delta on a sweep preset")
    p.add_argument("--preset", required=True, choices=sorted(DEFAULT_SWEEPS))
    p.add_argument("--values", default=None,
                   help="comma-separated sweep values overriding the preset's default grid")
    p.add_argument("--delta", type=float, default=0.1, help="confidence level for N and K sweeps")
    _common(p)

    p = sub.add_parser("analyze", help="print complexity terms and bounds as JSON")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--preset", choices=PRESETS)
    src.add_argument("--instance", help="instance JSON file")
    p.add_argument("--delta", type=float, default=0.1)

    p = sub.add_parser("report", help="summarize a run directory")
    p.add_argument("run_dir")
    return ap


def _spec_from_args(args) -> ExperimentSpec:
    common = dict(algos=args.algos, reps=args.reps, base_seed=args.seed,
                  epoch_cap=args.epoch_cap, out_dir=args.out)
    if args.command == "run":
        return ExperimentSpec(instances=args.preset or args.instance, deltas=args.delta, **common)
    param, grid = DEFAULT_SWEEPS[args.preset]
    if param == "delta":
        deltas = _floats(args.values) if args.values else list(grid)
        return ExperimentSpec(instances=[args.preset], deltas=deltas, **common)
    values = _ints(args.values) if args.values else list(grid)
    return ExperimentSpec(instances=[args.preset], deltas=[args.delta],
                          sweep_param=param, sweep_values=values, **common)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command in ("run", "sweep"):
            result = run_experiment(_spec_from_args(args), workers=args.workers)
            print(samples_table(result.aggregate))
            if not args.no_report:
                report(result.out_dir)
            print(f"wrote {result.out_dir}")
        elif args.command == "analyze":
            inst = load_instance(args.preset or args.instance)
            print(json.dumps(analyze(inst, args.delta), indent=2))
        else:
            files = report(args.run_dir)
            for path in files.values():
                print(path)
    except (SpecError, SchemaError, InvalidInstanceError, ValueError, KeyError, OSError) as exc:
        print(f"fbai: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
