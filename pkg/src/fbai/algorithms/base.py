"""Shared machinery for the sequential strategies.

Every strategy follows the same contract: ``initialize()`` takes the warm-up
samples, ``step()`` runs one epoch, ``done`` reports termination and
``recommend()`` returns the chosen arm (``k`` for "no feasible arm").
:func:`execute` drives a strategy to completion and packages a
:class:`RunResult`.

All argmax selections break ties towards the lowest arm or constraint index.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Iterable

import numpy as np

from ..instance import BanditInstance, Sampler, ground_truth, require_valid
from ..stats import ObservationTracker

DEFAULT_EPOCH_CAP = 10_000_000


class Termination(str, Enum):
    RECOMMENDATION = "recommendation"
    NO_FEASIBLE = "no_feasible"
    BUDGET_CAP = "budget_cap"


@dataclass
class AlgState:
    """Mutable arm sets of a run.

    ``s_set`` survivors, ``p_set`` focus set, ``f_set``/``i_set`` arms
    verified feasible/infeasible, ``h_sets[i]`` the undetermined
    constraints (1-based stream indices) of arm ``i``.
    """

    s_set: set[int]
    p_set: set[int]
    f_set: set[int]
    i_set: set[int]
    h_sets: list[set[int]]
    safety_invocations: list[int]
    epoch: int = 0
    a_t: int | None = None
    b_t: int | None = None
    last_constraint: list[int | None] = field(default_factory=list)

    @classmethod
    def fresh(cls, k: int, n: int) -> "AlgState":
        h = [set(range(1, n + 1)) for _ in range(k)]
        # with no constraints every arm is trivially feasible
        f = {i for i in range(k) if not h[i]}
        return cls(
            s_set=set(range(k)),
            p_set=set(range(k)),
            f_set=f,
            i_set=set(),
            h_sets=h,
            safety_invocations=[0] * k,
            last_constraint=[None] * k,
        )


@dataclass
class RunResult:
    algo: str
    output: int
    correct: bool
    total_samples: int
    init_samples: int
    epochs: int
    per_pair_counts: np.ndarray
    terminated_by: Termination
    wall_time: float = 0.0

    @property
    def perf_samples(self) -> int:
        return int(self.per_pair_counts[:, 0].sum())

    @property
    def feas_samples(self) -> int:
        return int(self.per_pair_counts[:, 1:].sum())

    @property
    def total_samples_excl_init(self) -> int:
        return self.total_samples - self.init_samples


def sample_for_safety(state: AlgState, tracker: ObservationTracker, instance: BanditInstance, arm: int, sampler: Sampler) -> int:
    """Test one undetermined constraint of ``arm`` and update I, H and F.

    The constraint with the largest mu-tilde index is sampled.  Returns the
    sampled stream index.
    """
    assert arm not in state.f_set and arm not in state.i_set, f"arm {arm} already determined"
    h = state.h_sets[arm]
    assert h, f"arm {arm} has no undetermined constraints"
    counts = tracker.counts[arm]
    sums = tracker.sums[arm]
    if len(h) == 1:
        (best_l,) = h
    else:
        sigma = tracker.sigma
        log_m2 = 2.0 * math.log(tracker.feas_totals[arm])
        best_l, best_v = -1, -math.inf
        for l in sorted(h):
            c = counts[l]
            v = sums[l] / c + sigma * math.sqrt(log_m2 / c)
            if v > best_v:
                best_l, best_v = l, v
    # hot path: same effect as tracker.record(arm, best_l, x)
    x = sampler.draw(arm, best_l)
    c = counts[best_l] + 1
    counts[best_l] = c
    sums[best_l] += x
    tracker.feas_totals[arm] += 1
    state.safety_invocations[arm] += 1
    state.last_constraint[arm] = best_l
    mean = sums[best_l] / c
    table = tracker._rad
    r = table[c] if c < len(table) else tracker.rad(c)
    xi = instance.threshold_list[best_l - 1]
    if mean - r > xi:
        state.i_set.add(arm)
    elif mean + r < xi:
        h.discard(best_l)
        if not h:
            state.f_set.add(arm)
    return best_l


def argmax(items: Iterable[int], key: Callable[[int], float]) -> int:
    """Lowest-index argmax."""
    best, best_v = -1, -math.inf
    for i in sorted(items):
        v = key(i)
        if v > best_v:
            best, best_v = i, v
    return best


class Strategy:
    """Base class holding the run's instance, tracker, sampler and state."""

    name = "base"

    def __init__(self, instance: BanditInstance, delta: float, rng: np.random.Generator, observer=None):
        require_valid(instance)
        if not 0.0 < delta < 1.0:
            raise ValueError(f"delta must lie in (0, 1), got {delta}")
        self.instance = instance
        self.delta = delta
        self.k, self.n = instance.k, instance.n
        self.xi = instance.thresholds.tolist()
        self.tracker = ObservationTracker(self.k, self.n, delta, instance.noise_sigma)
        self.sampler = Sampler(instance, rng)
        self.state = AlgState.fresh(self.k, self.n)
        self.observer = observer
        self.init_samples = 0
        self.epochs = 0
        self.done = False
        self.output: int | None = None
        self.terminated_by: Termination | None = None

    # -- helpers -------------------------------------------------------

    def pull(self, arm: int, stream: int) -> None:
        self.tracker.record(arm, stream, self.sampler.draw(arm, stream))

    def pull_all(self, arm: int) -> None:
        self.tracker.record_row(arm, self.sampler.draw_row(arm))

    def finish(self, output: int) -> None:
        self.done = True
        self.output = output
        self.terminated_by = (
            Termination.NO_FEASIBLE if output == self.k else Termination.RECOMMENDATION
        )

    def safety(self, arm: int) -> int:
        return sample_for_safety(self.state, self.tracker, self.instance, arm, self.sampler)

    def best_guess(self, candidates: Iterable[int]) -> int:
        cand = set(candidates)
        pool = cand & self.state.f_set or cand or set(range(self.k))
        return argmax(pool, lambda i: self.tracker.mean(i, 0) if self.tracker.counts[i][0] else -math.inf)

    # -- contract ------------------------------------------------------

    def initialize(self) -> None:
        raise NotImplementedError

    def step(self) -> None:
        raise NotImplementedError

    def recommend(self) -> int:
        if self.output is None:
            raise RuntimeError("strategy has not terminated")
        return self.output

    def cap(self) -> None:
        self.done = True
        self.output = self.best_guess(self.state.p_set)
        self.terminated_by = Termination.BUDGET_CAP


def execute(
    strategy: Strategy, epoch_cap: int = DEFAULT_EPOCH_CAP
) -> RunResult:
    if epoch_cap < 1:
        raise ValueError("epoch_cap must be >= 1")
    t0 = time.perf_counter()
    strategy.initialize()
    strategy.init_samples += strategy.tracker.total
    obs = strategy.observer
    if obs is not None:
        obs(strategy)
    step = strategy.step
    while not strategy.done:
        if strategy.epochs >= epoch_cap:
            strategy.cap()
            break
        step()
        if obs is not None and not strategy.done:
            obs(strategy)
    gt = ground_truth(strategy.instance)
    counts = strategy.tracker.counts_array()
    return RunResult(
        algo=strategy.name,
        output=strategy.output,
        correct=strategy.output == gt.i_star,
        total_samples=int(counts.sum()),
        init_samples=strategy.init_samples,
        epochs=strategy.epochs,
        per_pair_counts=counts,
        terminated_by=strategy.terminated_by,
        wall_time=time.perf_counter() - t0,
    )
