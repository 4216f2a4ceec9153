"""Feasible best-arm identification with separate performance and constraint tests.

Each epoch picks up to two arms from the focus set, samples their
performance, and tests at most one undetermined constraint of each arm not
yet verified feasible.  Arms leave the survivor set when verified infeasible
or when their performance upper bound falls below the best lower bound of a
verified-feasible arm.
"""

from __future__ import annotations

from .base import DEFAULT_EPOCH_CAP, Strategy, execute, sample_for_safety


class FeasibleLUCB(Strategy):
    name = "ours"

    def initialize(self) -> None:
        for i in range(self.k):
            for l in range(self.n + 1):
                self.pull(i, l)
        self._refresh()

    def step(self) -> None:
        st = self.state
        tr = self.tracker
        if not st.s_set:
            self.finish(self.k)
            return
        if len(st.p_set) == 1:
            (i,) = st.p_set
            if i in st.f_set:
                self.finish(i)
                return
            st.a_t, st.b_t = i, None
            sample_for_safety(st, tr, self.instance, i, self.sampler)
            self.epochs += 1
            st.epoch = self.epochs
            # only arm i can have changed status
            if i in st.f_set or i in st.i_set:
                self._refresh()
            return
        counts, sums = tr.counts, tr.sums
        rad = tr.rad
        p = sorted(st.p_set)
        a = p[0]
        best = sums[a][0] / counts[a][0]
        for i in p[1:]:
            v = sums[i][0] / counts[i][0]
            if v > best:
                a, best = i, v
        b, best = -1, -float("inf")
        for i in p:
            if i != a:
                c = counts[i][0]
                v = sums[i][0] / c + rad(c)
                if v > best:
                    b, best = i, v
        st.a_t, st.b_t = a, b
        draw = self.sampler.draw
        for i in (a, b):
            counts[i][0] += 1
            sums[i][0] += draw(i, 0)
        if a not in st.f_set:
            sample_for_safety(st, tr, self.instance, a, self.sampler)
        if b not in st.f_set:
            sample_for_safety(st, tr, self.instance, b, self.sampler)
        self.epochs += 1
        st.epoch = self.epochs
        # performance statistics moved, so the sets are refreshed every pair epoch
        self._refresh()

    def _refresh(self) -> None:
        st = self.state
        tr = self.tracker
        counts, sums, rad = tr.counts, tr.sums, tr.rad
        ucb, lcb = {}, {}
        for i in st.s_set | st.f_set:
            c = counts[i][0]
            m, r = sums[i][0] / c, rad(c)
            ucb[i], lcb[i] = m + r, m - r
        s = st.s_set - st.i_set
        if st.f_set:
            floor = max(lcb[j] for j in st.f_set)
            s = {i for i in s if ucb[i] > floor}
        if s:
            floor = max(lcb[j] for j in s)
            p = {i for i in s if ucb[i] > floor}
        else:
            p = set()
        st.s_set = s
        st.p_set = p


def run_ours(instance, delta, rng, epoch_cap: int = DEFAULT_EPOCH_CAP, observer=None):
    return execute(FeasibleLUCB(instance, delta, rng, observer), epoch_cap)
