"""Instance complexity: per-arm hardness, the I/W partition, and the sample bounds.

Arms are compared by performance mean, never by index, so the functions
work for instances in any arm order.  All thresholds are per constraint;
with every threshold at 1/2 the formulas are the textbook ones.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .instance import BanditInstance, GroundTruth, ground_truth

INF = math.inf


class BoundDomainError(ValueError):
    """A closed-form bound term left its domain (log argument <= 1 or a zero gap)."""


@dataclass
class ComplexityReport:
    theta: list[float]
    phi: list[float]
    set_i: frozenset[int]
    set_w: frozenset[int]
    h_per_arm: list[float]
    h_total: float
    i_star: int
    feasible_set: frozenset[int]

    def to_dict(self) -> dict:
        return {
            "theta": self.theta,
            "phi": [None if math.isinf(p) else p for p in self.phi],
            "set_i": sorted(self.set_i),
            "set_w": sorted(self.set_w),
            "h_per_arm": self.h_per_arm,
            "h_total": self.h_total,
            "i_star": self.i_star,
            "feasible_set": sorted(self.feasible_set),
        }


@dataclass
class BoundsReport:
    delta: float
    lower_bound: float
    upper_leading: float
    leading_terms: dict[str, float]
    g_terms: dict[str, float]
    g_per_arm: list[float]
    q_pairs: np.ndarray
    n_pairs: np.ndarray
    gamma: np.ndarray
    delta_quarter: float
    gaps: np.ndarray
    gamma_pairs: list[np.ndarray] = field(default_factory=list)
    gamma_threshold: np.ndarray | None = None
    t_caps: list[float] = field(default_factory=list)

    def to_dict(self) -> dict:
        def clean(a):
            return [[None if not math.isfinite(v) else v for v in row] for row in np.asarray(a).tolist()]

        return {
            "delta": self.delta,
            "lower_bound": self.lower_bound,
            "upper_leading": self.upper_leading,
            "leading_terms": self.leading_terms,
            "g_terms": self.g_terms,
            "g_per_arm": [None if not math.isfinite(v) else v for v in self.g_per_arm],
            "q_pairs": clean(self.q_pairs),
            "n_pairs": clean(self.n_pairs),
            "gamma": clean(self.gamma),
            "delta_quarter": self.delta_quarter,
            "gaps": clean(self.gaps),
            "t_caps": self.t_caps,
        }


# -- per-arm complexities ----------------------------------------------------

def _margins(instance: BanditInstance, arm: int) -> np.ndarray:
    return instance.means[arm, 1:] - instance.thresholds


def theta_of(instance: BanditInstance, gt: GroundTruth, arm: int) -> float:
    """Cost of settling the feasibility of ``arm``.

    Infeasible: inverse squared margin of the most violated constraint.
    Feasible: sum of inverse squared margins over all constraints.
    """
    margins = _margins(instance, arm)
    if arm in gt.feasible_set:
        return float(np.sum(margins**-2.0))
    return float(np.max(margins)) ** -2.0


def phi_of(instance: BanditInstance, gt: GroundTruth, arm: int) -> float:
    """Cost of separating the performance of ``arm`` from the optimal arm."""
    if gt.i_star == instance.no_feasible:
        return INF
    perf = instance.means[:, 0]
    best = perf[gt.i_star]
    if arm == gt.i_star:
        others = [perf[j] for j in gt.feasible_set if j != arm]
        return 0.0 if not others else float(best - max(others)) ** -2.0
    if perf[arm] > best:
        return INF
    return float(best - perf[arm]) ** -2.0


def classify(instance: BanditInstance, gt: GroundTruth | None = None) -> ComplexityReport:
    gt = gt or ground_truth(instance)
    k = instance.k
    theta = [theta_of(instance, gt, i) for i in range(k)]
    phi = [phi_of(instance, gt, i) for i in range(k)]
    perf = instance.means[:, 0]
    set_i, set_w = set(), set()
    h = [0.0] * k
    if gt.i_star == instance.no_feasible:
        set_i = set(range(k))
        h = list(theta)
    else:
        best = perf[gt.i_star]
        for i in range(k):
            if i == gt.i_star:
                h[i] = theta[i] + phi[i]
            elif perf[i] > best:
                set_i.add(i)
                h[i] = theta[i]
            elif i not in gt.feasible_set and theta[i] < phi[i]:
                set_i.add(i)
                h[i] = theta[i]
            else:
                set_w.add(i)
                h[i] = phi[i]
    assert all(math.isfinite(x) and x >= 0 for x in h), h
    return ComplexityReport(
        theta=theta,
        phi=phi,
        set_i=frozenset(set_i),
        set_w=frozenset(set_w),
        h_per_arm=h,
        h_total=float(sum(h)),
        i_star=gt.i_star,
        feasible_set=gt.feasible_set,
    )


def lower_bound(report: ComplexityReport, delta: float) -> float:
    """Expected-samples lower bound ``2 H log(1/(2.4 delta))``, floored at zero."""
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must lie in (0, 1), got {delta}")
    return max(0.0, 2.0 * report.h_total * math.log(1.0 / (2.4 * delta)))


# -- upper bound ---------------------------------------------------------------

def _log(x: float, term: str) -> float:
    if not x > 1.0:
        raise BoundDomainError(f"log argument {float(x)!r} <= 1 in term {term}")
    return math.log(x)


def _threshold_cost(c: float, dq: float, term: str) -> float:
    """``32 c log(91 c/dq * log(95 c/dq))``: samples to settle a comparison of hardness c."""
    return 32.0 * c * _log(91.0 * c / dq * _log(95.0 * c / dq, term), term)


def _pair_cost(gap: float, dq: float) -> float:
    g2 = gap * gap
    if g2 == 0.0:
        raise BoundDomainError("zero performance gap in q_ij")
    inner = _log(384.0 / (g2 * dq), "q_ij")
    return 128.0 / g2 * _log(368.0 / (g2 * dq) * inner, "q_ij") + dq**4


def upper_bound_terms(
    instance: BanditInstance, report: ComplexityReport, delta: float
) -> BoundsReport:
    """Evaluate every closed-form term of the expected-sample upper bound."""
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must lie in (0, 1), got {delta}")
    k, n = instance.k, instance.n
    mu = instance.means
    dq = (delta / (k * (n + 1))) ** 0.25
    margins = mu[:, 1:] - instance.thresholds
    gamma = margins**-2.0 if n else np.zeros((k, 0))
    gaps = mu[:, 0][:, None] - mu[:, 0][None, :]

    n_pairs = np.zeros((k, n))
    for i in range(k):
        for l in range(n):
            n_pairs[i, l] = _threshold_cost(gamma[i, l], dq, f"n[{i},{l + 1}]")
    t_caps = [n * float(np.max(np.floor(n_pairs[i] + 2))) if n else 0.0 for i in range(k)]

    q = np.full((k, k), np.nan)
    for i in range(k):
        for j in range(k):
            if i != j:
                q[i, j] = _pair_cost(gaps[i, j], dq)

    # the "first" constraint of an arm is its largest mean
    g = []
    for i in range(k):
        feas = mu[i, 1:]
        if n == 0:
            g.append(0.0)
            continue
        top = int(np.argmax(feas))
        val = 8.0 * gamma[i, top]
        val += float(np.sum(8.0 * gamma[i] * n * (k * (n + 1)) ** -0.125))
        if n > 1:
            gap12 = float(feas[top] - np.max(np.delete(feas, top)))
            if gap12 == 0.0:
                g.append(INF)
                continue
            val += (32 * n - 22 + 16 * _log(32.0 / gap12**2, f"g[{i}]")) / gap12**2
            t_log = _log(t_caps[i], f"log T[{i}]")
            for l in range(n):
                if l == top:
                    continue
                gap = feas[top] - feas[l]
                if gap == 0.0:
                    val = INF
                    break
                val += 8.0 * t_log / gap**2 + dq**4 * (n_pairs[i, l] + 8.0 * gamma[i, l])
        g.append(float(val))

    def need(arms, what):
        total = 0.0
        for i in arms:
            if not math.isfinite(g[i]):
                raise BoundDomainError(f"{what}: g[{i}] undefined (tied top constraints)")
            total += g[i]
        return total

    set_i = report.set_i
    leading: dict[str, float] = {}
    gt: dict[str, float] = {}
    if report.i_star < k:
        s = report.i_star
        leading["infeasible_arms"] = sum(
            _threshold_cost(report.theta[i], dq, f"theta[{i}]") for i in sorted(set_i)
        )
        phi_sum = sum(report.phi[i] for i in range(k) if i not in set_i)
        leading["performance"] = (
            292.0 * phi_sum * _log(phi_sum / delta, "performance") if phi_sum > 0 else 0.0
        )
        leading["optimal_feasibility"] = float(sum(
            _threshold_cost(gamma[s, l], dq, f"Gamma[{s},{l + 1}]") for l in range(n)
        ))
        not_i = [i for i in range(k) if i not in set_i]
        gt["G1"] = float(np.sum(8.0 * gamma[s])) + 16.0
        gt["G2"] = need(sorted(set_i), "G2")
        gt["G3"] = delta * float(
            4.0 * sum(q[i, j] for i in set_i for j in range(k) if j != i)
            + sum(n_pairs[i, l] + 8.0 * gamma[i, l] for i in report.set_w for l in range(n))
            + 2.0 * sum(q[i, j] for i in not_i for j in not_i if i != j)
        )
    else:
        leading["infeasible_arms"] = sum(
            _threshold_cost(report.theta[i], dq, f"theta[{i}]") for i in range(k)
        )
        gt["G4"] = need(range(k), "G4")
        gt["G5"] = 4.0 * delta * float(sum(q[i, j] for i in range(k) for j in range(k) if j != i))

    return BoundsReport(
        delta=delta,
        lower_bound=lower_bound(report, delta),
        upper_leading=float(sum(leading.values()) + sum(gt.values())),
        leading_terms=leading,
        g_terms=gt,
        g_per_arm=g,
        q_pairs=q,
        n_pairs=n_pairs,
        gamma=gamma,
        delta_quarter=dq,
        gaps=gaps,
        gamma_pairs=[np.abs(mu[i, 1:][:, None] - mu[i, 1:][None, :]) for i in range(k)],
        gamma_threshold=np.abs(margins),
        t_caps=t_caps,
    )


def analyze(instance: BanditInstance, delta: float) -> dict:
    """Both reports as one JSON-ready document."""
    report = classify(instance)
    out = {"instance": instance.label, "complexity": report.to_dict()}
    try:
        out["bounds"] = upper_bound_terms(instance, report, delta).to_dict()
    except BoundDomainError as exc:
        out["bounds"] = {"lower_bound": lower_bound(report, delta), "error": str(exc)}
    return out
