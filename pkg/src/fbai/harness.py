"""Experiment orchestration: seeded repetitions, parallel runs, CSV logs.

An experiment spec expands into sweep points (instance, delta).  Every run gets its own
Philox stream seeded from ``(base_seed, crc32(algo), point index, rep)``, so
a run's outcome depends only on those four values and not on scheduling.
All files are written by the coordinating process after results are
collected, in spec order.
"""

from __future__ import annotations

import csv
import json
import math
import os
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from .algorithms import ALGORITHMS, DEFAULT_EPOCH_CAP, Termination, run_algorithm
from .instance import PRESETS, BanditInstance, ground_truth, preset

RUN_COLUMNS = (
    "run_id", "instance", "algo", "delta", "seed", "k", "n", "output_arm",
    "true_istar", "correct", "terminated_by", "epochs", "total_samples",
    "total_samples_excl_init", "perf_samples", "feas_samples",
)
AGG_COLUMNS = (
    "instance", "algo", "delta", "reps", "mean_samples", "std_samples",
    "mean_epochs", "std_epochs", "correct_count", "capped_count", "relative_to_ours",
)
_RUN_TYPES = {
    "run_id": int, "instance": str, "algo": str, "delta": float, "seed": int,
    "k": int, "n": int, "output_arm": int, "true_istar": int, "correct": int,
    "terminated_by": str, "epochs": int, "total_samples": int,
    "total_samples_excl_init": int, "perf_samples": int, "feas_samples": int,
}
_AGG_TYPES = {
    "instance": str, "algo": str, "delta": float, "reps": int,
    "mean_samples": float, "std_samples": float, "mean_epochs": float,
    "std_epochs": float, "correct_count": int, "capped_count": int,
    "relative_to_ours": float,
}

DELTA_GRID = tuple(10.0 ** -e for e in range(1, 10))
# sweep parameter and grid used by `fbai sweep` for each sweep preset
DEFAULT_SWEEPS: dict[str, tuple[str, tuple]] = {
    "exp2_vary_n": ("n", (2, 4, 8, 16, 32, 64)),
    "exp2_vary_k": ("k", (4, 8, 16, 32, 64)),
    "exp2_delta": ("delta", DELTA_GRID),
}


class SpecError(ValueError):
    pass


class SchemaError(ValueError):
    """A CSV file is missing or does not have the expected columns."""


@dataclass
class ExperimentSpec:
    """What to run.

    ``instances`` holds preset names or paths to instance JSON files.
    ``sweep_param`` names a preset parameter (``n`` or ``k``) swept over
    ``sweep_values``; every sweep value is combined with every delta.
    """

    instances: Sequence[str]
    algos: Sequence[str] = tuple(ALGORITHMS)
    deltas: Sequence[float] = (0.1,)
    reps: int = 10
    base_seed: int = 0
    epoch_cap: int = DEFAULT_EPOCH_CAP
    out_dir: str | None = None
    sweep_param: str | None = None
    sweep_values: Sequence[int] = ()

    def validate(self) -> None:
        if self.reps < 1:
            raise SpecError(f"reps must be >= 1, got {self.reps}")
        if not self.instances:
            raise SpecError("no instances given")
        if not self.algos:
            raise SpecError("no algorithms given")
        bad = [a for a in self.algos if a not in ALGORITHMS]
        if bad:
            raise SpecError(f"unknown algorithms {bad}; choose from {', '.join(ALGORITHMS)}")
        if len(set(self.algos)) != len(self.algos):
            raise SpecError("duplicate algorithm names")
        if not self.deltas:
            raise SpecError("delta list is empty")
        for d in self.deltas:
            if not 0.0 < d < 1.0:
                raise SpecError(f"delta must lie in (0, 1), got {d}")
        if self.sweep_param is not None and not self.sweep_values:
            raise SpecError(f"sweep over {self.sweep_param} has no values")
        if self.epoch_cap < 1:
            raise SpecError("epoch_cap must be >= 1")
        if not 0 <= self.base_seed < 2**64:
            raise SpecError("base_seed must be a 64-bit unsigned integer")

    def to_dict(self) -> dict[str, Any]:
        d = asdict(self)
        for key in ("instances", "algos", "deltas", "sweep_values"):
            d[key] = list(d[key])
        return d


@dataclass(frozen=True)
class SweepPoint:
    instance: BanditInstance
    delta: float
    x: float | None = None  # value of the swept parameter, if any


def load_instance(source: str, **params) -> BanditInstance:
    if source in PRESETS:
        return preset(source, **params)
    path = Path(source)
    if not path.exists():
        raise SpecError(f"{source!r} is neither a preset ({', '.join(PRESETS)}) nor an existing file")
    if params:
        raise SpecError(f"cannot apply preset parameters to instance file {source}")
    return BanditInstance.load(path)


def sweep_points(spec: ExperimentSpec) -> list[SweepPoint]:
    pts = []
    vary_delta = len(spec.deltas) > 1
    for src in spec.instances:
        if spec.sweep_param is None:
            inst = load_instance(src)
            for d in spec.deltas:
                pts.append(SweepPoint(inst, float(d), float(d) if vary_delta else None))
            continue
        for v in spec.sweep_values:
            inst = load_instance(src, **{spec.sweep_param: v})
            for d in spec.deltas:
                pts.append(SweepPoint(inst, float(d), float(v)))
    return pts


def run_seed(base_seed: int, algo: str, point: int, rep: int) -> int:
    """64-bit seed of one run.  Changing any argument changes the seed."""
    ss = np.random.SeedSequence([base_seed, zlib.crc32(algo.encode()), point, rep])
    return int(ss.generate_state(1, np.uint64)[0])


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(seed))


def _one_run(task) -> dict[str, Any]:
    run_id, inst, algo, delta, seed, cap = task
    res = run_algorithm(algo, inst, delta, make_rng(seed), epoch_cap=cap)
    gt = ground_truth(inst)
    return {
        "run_id": run_id,
        "instance": inst.label,
        "algo": algo,
        "delta": delta,
        "seed": seed,
        "k": inst.k,
        "n": inst.n,
        "output_arm": res.output,
        "true_istar": gt.i_star,
        "correct": int(res.correct),
        "terminated_by": res.terminated_by.value,
        "epochs": res.epochs,
        "total_samples": res.total_samples,
        "total_samples_excl_init": res.total_samples_excl_init,
        "perf_samples": res.perf_samples,
        "feas_samples": res.feas_samples,
    }


def worker_count() -> int:
    env = os.environ.get("FBAI_THREADS")
    if env:
        n = int(env)
        if n < 1:
            raise SpecError(f"FBAI_THREADS must be >= 1, got {env}")
        return n
    return os.cpu_count() or 1


def _tasks(spec: ExperimentSpec, points: list[SweepPoint]):
    run_id = 0
    for p_idx, pt in enumerate(points):
        for algo in spec.algos:
            for rep in range(spec.reps):
                seed = run_seed(spec.base_seed, algo, p_idx, rep)
                yield (run_id, pt.instance, algo, pt.delta, seed, spec.epoch_cap)
                run_id += 1


def execute_runs(spec: ExperimentSpec, points: list[SweepPoint], workers: int | None = None) -> list[dict]:
    tasks = list(_tasks(spec, points))
    workers = workers or worker_count()
    if workers == 1 or len(tasks) == 1:
        return [_one_run(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=min(workers, len(tasks))) as pool:
        # map keeps submission order
        return list(pool.map(_one_run, tasks, chunksize=max(1, len(tasks) // (8 * workers))))


# -- aggregation -----------------------------------------------------------

@dataclass
class AggregateRow:
    instance: str
    algo: str
    delta: float
    reps: int
    mean_samples: float
    std_samples: float
    mean_epochs: float
    std_epochs: float
    correct_count: int
    capped_count: int
    relative_to_ours: float = math.nan

    @property
    def error_count(self) -> int:
        return self.reps - self.correct_count - self.capped_count


def _mean_std(xs: list[float]) -> tuple[float, float]:
    if not xs:
        return math.nan, math.nan
    a = np.asarray(xs, dtype=float)
    std = float(a.std(ddof=1)) if a.size > 1 else 0.0
    return float(a.mean()), std


def aggregate(rows: list[dict]) -> list[AggregateRow]:
    """One row per (instance, delta, algo), in first-appearance order.

    Budget-capped runs are counted in ``capped_count`` and left out of the
    means, standard deviations and correctness count.
    """
    groups: dict[tuple, list[dict]] = {}
    for r in rows:
        groups.setdefault((r["instance"], r["delta"], r["algo"]), []).append(r)
    out = []
    for (inst, delta, algo), rs in groups.items():
        done = [r for r in rs if r["terminated_by"] != Termination.BUDGET_CAP.value]
        ms, ss = _mean_std([r["total_samples"] for r in done])
        me, se = _mean_std([r["epochs"] for r in done])
        out.append(AggregateRow(
            instance=inst, algo=algo, delta=delta, reps=len(rs),
            mean_samples=ms, std_samples=ss, mean_epochs=me, std_epochs=se,
            correct_count=sum(r["correct"] for r in done),
            capped_count=len(rs) - len(done),
        ))
    ours = {(a.instance, a.delta): a.mean_samples for a in out if a.algo == "ours"}
    for a in out:
        base = ours.get((a.instance, a.delta))
        if a.algo == "ours":
            a.relative_to_ours = 1.0
        elif base is not None and base > 0 and not math.isnan(a.mean_samples):
            a.relative_to_ours = a.mean_samples / base
    return out


# -- CSV -------------------------------------------------------------------

def _fmt(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_csv(path, columns: Sequence[str], rows: list[dict]) -> None:
    path = Path(path)
    try:
        with path.open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(columns)
            for r in rows:
                w.writerow([_fmt(r[c]) for c in columns])
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc


def read_csv(path, columns: Sequence[str], types: dict[str, type]) -> list[dict]:
    path = Path(path)
    if not path.exists():
        raise SchemaError(f"{path} does not exist")
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(header) != tuple(columns):
            raise SchemaError(f"{path}: expected columns {list(columns)}, got {header}")
        rows = []
        for lineno, rec in enumerate(reader, start=2):
            if len(rec) != len(columns):
                raise SchemaError(f"{path}:{lineno}: expected {len(columns)} fields, got {len(rec)}")
            try:
                rows.append({c: types[c](v) for c, v in zip(columns, rec)})
            except ValueError as exc:
                raise SchemaError(f"{path}:{lineno}: {exc}") from None
    return rows


def write_runs(path, rows: list[dict]) -> None:
    write_csv(path, RUN_COLUMNS, rows)


def read_runs(path) -> list[dict]:
    return read_csv(path, RUN_COLUMNS, _RUN_TYPES)


def write_aggregate(path, rows: list[AggregateRow]) -> None:
    write_csv(path, AGG_COLUMNS, [asdict(r) for r in rows])


def read_aggregate(path) -> list[AggregateRow]:
    return [AggregateRow(**r) for r in read_csv(path, AGG_COLUMNS, _AGG_TYPES)]


# -- driver ----------------------------------------------------------------

@dataclass
class ExperimentResult:
    spec: ExperimentSpec
    points: list[SweepPoint]
    runs: list[dict]
    aggregate: list[AggregateRow]
    out_dir: Path | None = None
    files: list[Path] = field(default_factory=list)


def run_experiment(spec: ExperimentSpec, workers: int | None = None) -> ExperimentResult:
    spec.validate()
    points = sweep_points(spec)
    runs = execute_runs(spec, points, workers)
    agg = aggregate(runs)
    result = ExperimentResult(spec, points, runs, agg)
    if spec.out_dir is not None:
        out = Path(spec.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        write_runs(out / "runs.csv", runs)
        write_aggregate(out / "aggregate.csv", agg)
        meta = {
            "spec": spec.to_dict(),
            "sweep": "delta" if spec.sweep_param is None and len(spec.deltas) > 1 else spec.sweep_param,
            "points": [
                {"instance": p.instance.label, "delta": p.delta, "x": p.x, "k": p.instance.k, "n": p.instance.n}
                for p in points
            ],
        }
        (out / "experiment.json").write_text(json.dumps(meta, indent=2) + "\n")
        result.out_dir = out
        result.files = [out / "runs.csv", out / "aggregate.csv", out / "experiment.json"]
    return result
