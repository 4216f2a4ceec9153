"""Baseline strategies used for comparison.

All of them use the same anytime confidence bound and the same
per-distribution budget ``delta/(K(N+1))`` as :mod:`fbai.algorithms.ours`.
Warm-up samples are charged to the run; each baseline only warms up the
streams it will touch.
"""

from __future__ import annotations

from .base import DEFAULT_EPOCH_CAP, Strategy, argmax, execute


def lucb_pick(tracker, arms):
    """Leader, challenger and whether the leader is already separated.

    The leader has the largest empirical performance mean, the challenger
    the largest performance UCB among the other arms.  Separation means
    ``lcb(leader) >= ucb(challenger)``.
    """
    leader = argmax(arms, lambda i: tracker.mean(i, 0))
    if len(arms) == 1:
        return leader, None, True
    challenger = argmax((i for i in arms if i != leader), lambda i: tracker.ucb(i, 0))
    return leader, challenger, tracker.lcb(leader, 0) >= tracker.ucb(challenger, 0)


class _BatchedFeasibility(Strategy):
    """Helpers for strategies that observe every constraint of an arm at once."""

    def check_constraints(self, arm: int) -> None:
        st = self.state
        if arm in st.f_set or arm in st.i_set:
            return
        tr = self.tracker
        h = st.h_sets[arm]
        for l in sorted(h):
            xi = self.xi[l - 1]
            if tr.lcb(arm, l) > xi:
                st.i_set.add(arm)
                return
            if tr.ucb(arm, l) < xi:
                h.discard(l)
        if not h:
            st.f_set.add(arm)

    def eliminate(self, survivors: set[int]) -> set[int]:
        st, tr = self.state, self.tracker
        s = survivors - st.i_set
        if st.f_set:
            floor = max(tr.lcb(j, 0) for j in st.f_set)
            s = {i for i in s if tr.ucb(i, 0) > floor}
        return s


class FeasibilityFirst(Strategy):
    """Settle every arm's feasibility, then run LUCB on the feasible arms."""

    name = "f-first"

    def initialize(self) -> None:
        for i in range(self.k):
            for l in range(1, self.n + 1):
                self.pull(i, l)
        self._cursor = 0
        self._lucb = False

    def step(self) -> None:
        st = self.state
        if not self._lucb:
            while self._cursor < self.k and (self._cursor in st.f_set or self._cursor in st.i_set):
                self._cursor += 1
            if self._cursor < self.k:
                self.safety(self._cursor)
                st.s_set = set(range(self.k)) - st.i_set
                st.p_set = set(st.s_set)
                self.epochs += 1
                return
            if not st.f_set:
                st.s_set = st.p_set = set()
                self.finish(self.k)
                return
            for i in sorted(st.f_set):
                self.pull(i, 0)
            self.init_samples += len(st.f_set)
            st.s_set = set(st.f_set)
            st.p_set = set(st.f_set)
            self._lucb = True
        leader, challenger, separated = lucb_pick(self.tracker, st.f_set)
        if separated:
            self.finish(leader)
            return
        st.a_t, st.b_t = leader, challenger
        self.pull(leader, 0)
        self.pull(challenger, 0)
        self.epochs += 1


class PerformanceFirst(Strategy):
    """LUCB on performance; test the winner's feasibility; drop it if infeasible and repeat.

    Performance samples are kept across repetitions.  An arm's constraints
    are warmed up the first time it is tested.
    """

    name = "p-first"

    def initialize(self) -> None:
        for i in range(self.k):
            self.pull(i, 0)
        self._testing = None

    def step(self) -> None:
        st = self.state
        while True:
            w = self._testing
            if w is not None:
                if w in st.f_set:
                    self.finish(w)
                    return
                if w in st.i_set:
                    st.s_set.discard(w)
                    st.p_set = set(st.s_set)
                    self._testing = None
                    continue
                self.safety(w)
                break
            if not st.s_set:
                self.finish(self.k)
                return
            leader, challenger, separated = lucb_pick(self.tracker, st.s_set)
            if separated:
                self._testing = leader
                if self.n and self.tracker.feas_totals[leader] == 0:
                    for l in range(1, self.n + 1):
                        self.pull(leader, l)
                    self.init_samples += self.n
                continue
            st.a_t, st.b_t = leader, challenger
            self.pull(leader, 0)
            self.pull(challenger, 0)
            break
        self.epochs += 1


class TFLUCBC(_BatchedFeasibility):
    """Leader/challenger sampling where one pull observes all N+1 streams of an arm."""

    name = "tf-lucb-c"

    def initialize(self) -> None:
        for i in range(self.k):
            self.pull_all(i)
            self.check_constraints(i)
        self._refresh()

    def _refresh(self) -> None:
        st, tr = self.state, self.tracker
        s = self.eliminate(st.s_set)
        if s:
            floor = max(tr.lcb(j, 0) for j in s)
            st.p_set = {i for i in s if tr.ucb(i, 0) > floor}
        else:
            st.p_set = set()
        st.s_set = s

    def step(self) -> None:
        st = self.state
        if not st.s_set:
            self.finish(self.k)
            return
        if len(st.p_set) == 1:
            (i,) = st.p_set
            if i in st.f_set:
                self.finish(i)
                return
            pulled = (i,)
        else:
            tr = self.tracker
            leader = argmax(st.p_set, lambda i: tr.mean(i, 0))
            challenger = argmax((i for i in st.p_set if i != leader), lambda i: tr.ucb(i, 0))
            pulled = (leader, challenger)
        st.a_t = pulled[0]
        st.b_t = pulled[1] if len(pulled) > 1 else None
        for i in pulled:
            self.pull_all(i)
            self.check_constraints(i)
        self.epochs += 1
        self._refresh()


class NaiveRacing(_BatchedFeasibility):
    """Racing: every round observes all streams of every surviving arm."""

    name = "naive"

    def initialize(self) -> None:
        self._round()

    def _round(self) -> None:
        st = self.state
        for i in sorted(st.s_set):
            self.pull_all(i)
            self.check_constraints(i)
        st.s_set = self.eliminate(st.s_set)
        st.p_set = set(st.s_set)

    def step(self) -> None:
        st = self.state
        if not st.s_set:
            self.finish(self.k)
            return
        if len(st.s_set) == 1:
            (i,) = st.s_set
            if i in st.f_set:
                self.finish(i)
                return
        self._round()
        self.epochs += 1


def run_f_first(instance, delta, rng, cap: int = DEFAULT_EPOCH_CAP, observer=None):
    return execute(FeasibilityFirst(instance, delta, rng, observer), cap)


def run_p_first(instance, delta, rng, cap: int = DEFAULT_EPOCH_CAP, observer=None):
    return execute(PerformanceFirst(instance, delta, rng, observer), cap)


def run_tf_lucb_c(instance, delta, rng, cap: int = DEFAULT_EPOCH_CAP, observer=None):
    return execute(TFLUCBC(instance, delta, rng, observer), cap)


def run_naive(instance, delta, rng, cap: int = DEFAULT_EPOCH_CAP, observer=None):
    return execute(NaiveRacing(instance, delta, rng, observer), cap)
