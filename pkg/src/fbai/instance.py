"""Bandit instances: ground truth means, validation, presets and sampling.

Arms are indexed from 0.  The "no feasible arm" recommendation is the
integer ``k`` (one past the last arm), which corresponds to ``K+1`` when
arms are numbered from 1.  Stream 0 of an arm is its performance
distribution; streams ``1..n`` are its feasibility constraints.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Any

import numpy as np


class InvalidInstanceError(ValueError):
    """Raised when an operation needs a valid instance and gets one that is not."""


@dataclass(frozen=True, eq=False)
class BanditInstance:
    """Hidden environment of a feasible best-arm identification problem.

    ``means[i][0]`` is the performance mean of arm ``i`` and ``means[i][l]``
    for ``l >= 1`` the mean of its ``l``-th feasibility constraint.  An arm
    is feasible when every constraint mean is strictly below its threshold.
    """

    means: np.ndarray
    thresholds: np.ndarray
    noise_sigma: float = 1.0
    label: str = ""

    def __post_init__(self):
        means = np.array(self.means, dtype=float)
        if means.ndim != 2 or means.shape[0] < 1 or means.shape[1] < 1:
            raise InvalidInstanceError(
                f"means must be a non-empty K x (N+1) matrix, got shape {means.shape}"
            )
        thresholds = np.array(self.thresholds, dtype=float).reshape(-1)
        means.setflags(write=False)
        thresholds.setflags(write=False)
        object.__setattr__(self, "means", means)
        object.__setattr__(self, "thresholds", thresholds)
        object.__setattr__(self, "noise_sigma", float(self.noise_sigma))

    @property
    def k(self) -> int:
        return self.means.shape[0]

    @property
    def n(self) -> int:
        return self.means.shape[1] - 1

    @cached_property
    def threshold_list(self) -> list[float]:
        return self.thresholds.tolist()

    @property
    def no_feasible(self) -> int:
        """Sentinel recommendation meaning "no arm is feasible"."""
        return self.k

    def __eq__(self, other):
        if not isinstance(other, BanditInstance):
            return NotImplemented
        return (
            self.label == other.label
            and self.noise_sigma == other.noise_sigma
            and np.array_equal(self.means, other.means)
            and np.array_equal(self.thresholds, other.thresholds)
        )

    def __hash__(self):
        return hash((self.label, self.noise_sigma, self.means.tobytes(), self.thresholds.tobytes()))

    def shifted(self, offset: float) -> "BanditInstance":
        """Return a copy with ``offset`` added to every performance mean."""
        means = self.means.copy()
        means[:, 0] += offset
        return BanditInstance(means, self.thresholds, self.noise_sigma, self.label)

    # -- serialization -------------------------------------------------

    def to_dict(self) -> dict[str, Any]:
        return {
            "label": self.label,
            "k": self.k,
            "n": self.n,
            "means": self.means.tolist(),
            "thresholds": self.thresholds.tolist(),
            "noise_sigma": self.noise_sigma,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "BanditInstance":
        inst = cls(
            means=data["means"],
            thresholds=data["thresholds"],
            noise_sigma=data.get("noise_sigma", 1.0),
            label=data.get("label", ""),
        )
        for key, actual in (("k", inst.k), ("n", inst.n)):
            if key in data and int(data[key]) != actual:
                raise InvalidInstanceError(f"declared {key}={data[key]} but means imply {key}={actual}")
        return inst

    def to_json(self) -> str:
        # repr-precision floats keep the round trip lossless
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_json(cls, text: str) -> "BanditInstance":
        return cls.from_dict(json.loads(text))

    def save(self, path) -> None:
        Path(path).write_text(self.to_json() + "\n")

    @classmethod
    def load(cls, path) -> "BanditInstance":
        return cls.from_json(Path(path).read_text())


@dataclass(frozen=True)
class GroundTruth:
    feasible_set: frozenset[int]
    i_star: int


@dataclass
class Validation:
    """Outcome of :func:`validate`.

    ``violations`` break the modelling assumptions and make the instance
    unusable.  ``warnings`` flag ties between feasibility means of the same
    arm: the experiment presets contain such ties, the
    algorithms are unaffected, and only some lower-order bound terms
    degenerate.
    """

    violations: list[str] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.ok


def validate(instance: BanditInstance) -> Validation:
    out = Validation()
    k, n = instance.k, instance.n
    mu = instance.means
    if instance.thresholds.shape != (n,):
        out.violations.append(
            f"thresholds has length {instance.thresholds.size}, expected N={n}"
        )
    if not np.all(np.isfinite(mu)):
        out.violations.append("means contain non-finite values")
    if not (instance.noise_sigma > 0 and math.isfinite(instance.noise_sigma)):
        out.violations.append(f"noise_sigma must be positive, got {instance.noise_sigma}")
    for i in range(k):
        for j in range(i + 1, k):
            if mu[i, 0] == mu[j, 0]:
                out.violations.append(f"duplicate performance means at arms ({i},{j})")
    if instance.thresholds.shape == (n,):
        for i in range(k):
            for l in range(1, n + 1):
                if mu[i, l] == instance.thresholds[l - 1]:
                    out.violations.append(f"mean equals threshold at ({i},{l})")
    for i in range(k):
        for l in range(1, n + 1):
            for m in range(l + 1, n + 1):
                if mu[i, l] == mu[i, m]:
                    out.warnings.append(f"equal feasibility means at arm {i}, constraints ({l},{m})")
    return out


def require_valid(instance: BanditInstance) -> None:
    verdict = validate(instance)
    if not verdict.ok:
        raise InvalidInstanceError("; ".join(verdict.violations))


def ground_truth(instance: BanditInstance) -> GroundTruth:
    require_valid(instance)
    mu = instance.means
    feasible = frozenset(
        i for i in range(instance.k) if np.all(mu[i, 1:] < instance.thresholds)
    )
    if not feasible:
        return GroundTruth(feasible, instance.no_feasible)
    i_star = max(sorted(feasible), key=lambda i: mu[i, 0])
    return GroundTruth(feasible, i_star)


# -- presets -------------------------------------------------------------

PRESETS = ("exp1a", "exp1b", "exp1c", "exp2_vary_n", "exp2_vary_k", "exp2_delta", "drug")

DRUG_ARMS = ("25mg", "75mg", "150mg", "300mg", "placebo")
DRUG_MEANS = (
    (0.34, 0.519, 0.259),
    (0.469, 0.612, 0.184),
    (0.465, 0.465, 0.209),
    (0.537, 0.61, 0.293),
    (0.36, 0.58, 0.16),
)


def _descending(hi: float, lo: float, k: int) -> np.ndarray:
    # arm 0 gets the larger endpoint
    return np.linspace(hi, lo, k)


def _exp2_means(k: int, n: int, perf_hi: float, feasible: range) -> np.ndarray:
    means = np.empty((k, n + 1))
    means[:, 0] = _descending(perf_hi, 0.0, k)
    means[:, 1:] = 0.25
    for i in range(k):
        if i not in feasible:
            means[i, 1] = 0.75
    return means


def preset(name: str, **params) -> BanditInstance:
    """Build one of the named experiment instances.

    ``exp2_vary_n`` takes ``n`` (default 2), ``exp2_vary_k`` takes ``k``
    (default 10) and ``drug`` takes ``shift`` (default False).  With
    ``shift=True`` the drug instance uses the shifted encoding where 0.25 is
    added to constraint 2 so both thresholds equal 1/2.
    """
    allowed = {"exp2_vary_n": {"n"}, "exp2_vary_k": {"k"}, "drug": {"shift"}}.get(name, set())
    unknown = set(params) - allowed
    if name not in PRESETS:
        raise KeyError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}")
    if unknown:
        raise ValueError(f"preset {name} does not take parameters {sorted(unknown)}")

    if name == "exp1a":
        means = np.empty((5, 4))
        means[:, 0] = _descending(1.0, 0.0, 5)
        means[:4, 1:] = (0.75, 0.25, 0.25)
        means[4, 1:] = 0.25
        return BanditInstance(means, [0.5] * 3, 1.0, "exp1a")
    if name == "exp1b":
        means = np.empty((5, 4))
        means[:, 0] = _descending(1.0, 0.0, 5)
        means[:, 1:] = 0.4
        return BanditInstance(means, [0.5] * 3, 1.0, "exp1b")
    if name == "exp1c":
        means = np.array(
            [
                [1.0, 0.65, 0.4, 0.4],
                [0.9, 0.3, 0.4, 0.4],
                [0.5, 0.65, 0.4, 0.4],
                [0.25, 0.65, 0.4, 0.4],
                [0.0, 0.45, 0.45, 0.45],
            ]
        )
        return BanditInstance(means, [0.5] * 3, 1.0, "exp1c")
    if name == "exp2_vary_n":
        n = int(params.get("n", 2))
        if n < 2:
            raise ValueError(f"exp2_vary_n needs n >= 2, got {n}")
        # arms 4..7 counted from 1
        means = _exp2_means(10, n, 2.0, range(3, 7))
        return BanditInstance(means, [0.5] * n, 1.0, f"exp2_vary_n(n={n})")
    if name in ("exp2_vary_k", "exp2_delta"):
        k = int(params.get("k", 10))
        if k < 3:
            raise ValueError(f"exp2_vary_k needs k >= 3, got {k}")
        # arms floor(K/3)..floor(2K/3) counted from 1
        feasible = range(k // 3 - 1, (2 * k) // 3)
        means = _exp2_means(k, 5, 10.0, feasible)
        label = "exp2_delta" if name == "exp2_delta" else f"exp2_vary_k(k={k})"
        return BanditInstance(means, [0.5] * 5, 1.0, label)
    # drug
    means = np.array(DRUG_MEANS)
    thresholds = [0.5, 0.25]
    label = "drug"
    if params.get("shift", False):
        means[:, 2] += 0.25
        thresholds = [0.5, 0.5]
        label = "drug_shifted"
    return BanditInstance(means, thresholds, 1.0, label)


def random_instance(
    rng: np.random.Generator,
    k: int,
    n: int,
    *,
    threshold: float = 0.5,
    min_gap: float = 0.02,
    sigma: float = 1.0,
) -> BanditInstance:
    """Draw a valid instance with means in [0, 1] kept ``min_gap`` away from ties.

    Performance means are sorted in decreasing order so arm index equals
    performance rank.
    """
    while True:
        means = rng.uniform(0.0, 1.0, size=(k, n + 1))
        means[:, 0] = np.sort(means[:, 0])[::-1]
        perf_ok = k == 1 or np.min(-np.diff(means[:, 0])) >= min_gap
        margin_ok = n == 0 or np.min(np.abs(means[:, 1:] - threshold)) >= min_gap
        distinct = True
        for i in range(k):
            row = np.sort(means[i, 1:])
            if n > 1 and np.min(np.diff(row)) < min_gap:
                distinct = False
        if perf_ok and margin_ok and distinct:
            return BanditInstance(means, [threshold] * n, sigma, f"random(k={k},n={n})")


# -- sampling ------------------------------------------------------------

def sample(instance: BanditInstance, arm: int, stream: int, rng: np.random.Generator) -> float:
    """One Gaussian observation from distribution ``(arm, stream)``."""
    if not (0 <= arm < instance.k and 0 <= stream <= instance.n):
        raise IndexError(f"(arm={arm}, stream={stream}) out of range for K={instance.k}, N={instance.n}")
    return float(instance.means[arm, stream] + instance.noise_sigma * rng.standard_normal())


class Sampler:
    """Buffered sampler over one run's generator.

    Standard normals are drawn from ``rng`` in blocks and handed out in
    order, so a run's observation sequence depends only on the seed and the
    order of pulls.
    """

    def __init__(self, instance: BanditInstance, rng: np.random.Generator, block: int = 4096):
        self.instance = instance
        self.rng = rng
        self.block = block
        self._means = instance.means.tolist()
        self._sigma = instance.noise_sigma
        self._buf: list[float] = []
        self._pos = 0
        self._end = 0
        self.draws = 0

    def _refill(self):
        self._buf = self.rng.standard_normal(self.block).tolist()
        self._pos = 0
        self._end = len(self._buf)

    def draw(self, arm: int, stream: int) -> float:
        if self._pos >= self._end:
            self._refill()
        z = self._buf[self._pos]
        self._pos += 1
        self.draws += 1
        return self._means[arm][stream] + self._sigma * z

    def draw_row(self, arm: int) -> list[float]:
        """Observations from every stream of ``arm``, stream order."""
        row = self._means[arm]
        return [row[l] + self._sigma * self._next() for l in range(len(row))]

    def _next(self) -> float:
        if self._pos >= self._end:
            self._refill()
        z = self._buf[self._pos]
        self._pos += 1
        self.draws += 1
        return z
