"""Per-distribution counts, empirical means and anytime confidence bounds."""

from __future__ import annotations

import math

import numpy as np


class UndefinedBoundError(ValueError):
    """A bound was requested for a distribution that has never been sampled."""


def radius(n: int, delta: float, sigma: float = 1.0) -> float:
    """Anytime confidence radius ``sigma * sqrt(2/n * log(4 n^4 / delta))``."""
    if n < 1:
        raise UndefinedBoundError(f"radius needs n >= 1, got {n}")
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must lie in (0, 1), got {delta}")
    return sigma * math.sqrt(2.0 / n * math.log(4.0 * n**4 / delta))


def _radius_table(start: int, stop: int, delta: float, sigma: float) -> list[float]:
    n = np.arange(start, stop, dtype=float)
    return (sigma * np.sqrt(2.0 / n * np.log(4.0 * n**4 / delta))).tolist()


class ObservationTracker:
    """Counts and running sums for every ``(arm, stream)`` pair of one run.

    ``delta_prime`` is the per-distribution failure budget ``delta/(K(N+1))``
    and is fixed at construction.  Means are ``sum / count`` accumulated in
    record order.  Radii depend only on the count, so they are cached in a
    table indexed by count.
    """

    def __init__(self, k: int, n: int, delta: float, sigma: float = 1.0):
        if not 0.0 < delta < 1.0:
            raise ValueError(f"delta must lie in (0, 1), got {delta}")
        self.k = k
        self.n = n
        self.delta = delta
        self.delta_prime = delta / (k * (n + 1))
        self.sigma = sigma
        self.counts = [[0] * (n + 1) for _ in range(k)]
        self.sums = [[0.0] * (n + 1) for _ in range(k)]
        self.feas_totals = [0] * k
        self._rad = [math.nan]

    # -- updates -------------------------------------------------------

    def record(self, arm: int, stream: int, x: float) -> None:
        if not (0 <= arm < self.k and 0 <= stream <= self.n):
            raise IndexError(f"(arm={arm}, stream={stream}) out of range")
        self.counts[arm][stream] += 1
        self.sums[arm][stream] += x
        if stream:
            self.feas_totals[arm] += 1

    def record_row(self, arm: int, xs) -> None:
        """Record one observation for every stream of ``arm``."""
        c, s = self.counts[arm], self.sums[arm]
        for l, x in enumerate(xs):
            c[l] += 1
            s[l] += x
        self.feas_totals[arm] += self.n

    # -- queries -------------------------------------------------------

    @property
    def total(self) -> int:
        return sum(map(sum, self.counts))

    def rad(self, count: int) -> float:
        """Cached ``radius(count, delta_prime, sigma)``."""
        table = self._rad
        if count >= len(table):
            if count < 1:
                raise UndefinedBoundError("no samples recorded for this distribution")
            stop = max(count + 1, 2 * len(table))
            table.extend(_radius_table(len(table), stop, self.delta_prime, self.sigma))
        elif count < 1:
            raise UndefinedBoundError("no samples recorded for this distribution")
        return table[count]

    def mean(self, arm: int, stream: int) -> float:
        c = self.counts[arm][stream]
        if c < 1:
            raise UndefinedBoundError(f"no samples recorded at ({arm},{stream})")
        return self.sums[arm][stream] / c

    def ucb(self, arm: int, stream: int) -> float:
        c = self.counts[arm][stream]
        return self.sums[arm][stream] / c + self.rad(c) if c else self._undefined(arm, stream)

    def lcb(self, arm: int, stream: int) -> float:
        c = self.counts[arm][stream]
        return self.sums[arm][stream] / c - self.rad(c) if c else self._undefined(arm, stream)

    def mu_tilde(self, arm: int, stream: int) -> float:
        """Constraint-selection index: mean plus ``sigma*sqrt(2 log M_i / N_il)``."""
        if stream < 1:
            raise ValueError("mu_tilde is defined for feasibility streams only")
        c = self.counts[arm][stream]
        m = self.feas_totals[arm]
        if c < 1 or m < 1:
            self._undefined(arm, stream)
        return self.sums[arm][stream] / c + self.sigma * math.sqrt(2.0 * math.log(m) / c)

    def _undefined(self, arm, stream):
        raise UndefinedBoundError(f"no samples recorded at ({arm},{stream})")

    def counts_array(self) -> np.ndarray:
        return np.array(self.counts, dtype=np.int64)

    def means_array(self) -> np.ndarray:
        c = self.counts_array()
        with np.errstate(invalid="ignore", divide="ignore"):
            return np.where(c > 0, np.array(self.sums) / c, np.nan)
