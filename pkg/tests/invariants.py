"""Observers that check structural invariants of a run while it executes."""

import copy


class InvariantObserver:
    """Checks the set invariants after the warm-up and after every epoch.

    Violations are collected in ``failures`` instead of raised, so a test
    can report all of them.  ``max_per_epoch`` bounds the samples taken by a
    single epoch after the warm-up.
    """

    def __init__(self, max_per_epoch=4, focus_nonempty=True):
        self.max_per_epoch = max_per_epoch
        self.focus_nonempty = focus_nonempty
        self.failures = []
        self.strategy = None
        self.prev = None
        self.calls = 0

    def _snap(self, s):
        st = s.state
        return {
            "S": set(st.s_set),
            "F": set(st.f_set),
            "I": set(st.i_set),
            "H": copy.deepcopy(st.h_sets),
            "total": s.tracker.total,
            "epochs": s.epochs,
        }

    def check_sets(self, s, where):
        st = s.state
        if not st.p_set <= st.s_set:
            self.failures.append(f"{where}: P not a subset of S")
        if st.f_set & st.i_set:
            self.failures.append(f"{where}: F and I intersect")
        if self.focus_nonempty and st.s_set and not st.p_set:
            self.failures.append(f"{where}: S nonempty but P empty")
        for i in st.f_set:
            if st.h_sets[i]:
                self.failures.append(f"{where}: arm {i} in F with undetermined constraints")

    def __call__(self, s):
        self.strategy = s
        self.calls += 1
        where = f"epoch {s.epochs}"
        self.check_sets(s, where)
        cur = self._snap(s)
        p = self.prev
        if p is not None:
            if not cur["S"] <= p["S"]:
                self.failures.append(f"{where}: S grew")
            if not (p["F"] <= cur["F"] and p["I"] <= cur["I"]):
                self.failures.append(f"{where}: F or I shrank")
            if any(not a <= b for a, b in zip(cur["H"], p["H"])):
                self.failures.append(f"{where}: an H set grew")
            steps = cur["epochs"] - p["epochs"]
            if self.max_per_epoch is not None and cur["total"] - p["total"] > self.max_per_epoch * max(steps, 1):
                self.failures.append(f"{where}: {cur['total'] - p['total']} samples in {steps} epoch(s)")
        self.prev = cur

    def finish(self):
        """Final checks once the run returned."""
        s = self.strategy
        self.check_sets(s, "final")
        if self.prev is not None and not s.state.s_set <= self.prev["S"]:
            self.failures.append("final: S grew")
        all_infeasible = s.state.i_set == set(range(s.k))
        if (s.output == s.k) != all_infeasible:
            self.failures.append(f"final: output {s.output} but I = {sorted(s.state.i_set)}")
        return self.failures


class CleanEventObserver:
    """Tracks whether every empirical mean stayed inside its confidence interval.

    Each (arm, stream) pair is sampled at most once per epoch, so checking
    after every epoch sees every sample count.
    """

    def __init__(self, instance):
        self.mu = instance.means
        self.clean = True
        self.strategy = None

    def __call__(self, s):
        self.strategy = s
        tr = s.tracker
        for i in range(s.k):
            for l in range(s.n + 1):
                if tr.counts[i][l] and not tr.lcb(i, l) <= self.mu[i, l] <= tr.ucb(i, l):
                    self.clean = False

    def finish(self):
        self(self.strategy)
        return self.clean
