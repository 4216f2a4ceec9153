"""Sequential strategies for feasible best-arm identification."""

from .base import (
    DEFAULT_EPOCH_CAP,
    AlgState,
    RunResult,
    Strategy,
    Termination,
    execute,
    sample_for_safety,
)
from .baselines import (
    FeasibilityFirst,
    NaiveRacing,
    PerformanceFirst,
    TFLUCBC,
    run_f_first,
    run_naive,
    run_p_first,
    run_tf_lucb_c,
)
from .ours import FeasibleLUCB, run_ours

ALGORITHMS: dict[str, type[Strategy]] = {
    "ours": FeasibleLUCB,
    "f-first": FeasibilityFirst,
    "p-first": PerformanceFirst,
    "tf-lucb-c": TFLUCBC,
    "naive": NaiveRacing,
}


def run_algorithm(name, instance, delta, rng, epoch_cap=DEFAULT_EPOCH_CAP, observer=None) -> RunResult:
    try:
        cls = ALGORITHMS[name]
    except KeyError:
        raise KeyError(f"unknown algorithm {name!r}; choose from {', '.join(ALGORITHMS)}") from None
    return execute(cls(instance, delta, rng, observer), epoch_cap)


__all__ = [
    "ALGORITHMS",
    "AlgState",
    "DEFAULT_EPOCH_CAP",
    "FeasibilityFirst",
    "FeasibleLUCB",
    "NaiveRacing",
    "PerformanceFirst",
    "RunResult",
    "Strategy",
    "TFLUCBC",
    "Termination",
    "execute",
    "run_algorithm",
    "run_f_first",
    "run_naive",
    "run_ours",
    "run_p_first",
    "run_tf_lucb_c",
    "sample_for_safety",
]
