import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fbai.complexity import (
    BoundDomainError,
    analyze,
    classify,
    lower_bound,
    phi_of,
    theta_of,
    upper_bound_terms,
)
from fbai.instance import BanditInstance, ground_truth, preset, random_instance

from oracles import brute_complexity, compare_report, partition_holds


def report_and_oracle(inst):
    return classify(inst), brute_complexity(inst.means.tolist(), inst.thresholds.tolist())


def test_exp1c_frozen():
    # derived by hand from the exp1c means: H_i = theta + phi for i*, theta for I, phi for W
    r = classify(preset("exp1c"))
    assert r.i_star == 1
    assert r.set_i == {0} and r.set_w == {2, 3, 4}
    assert r.theta[1] == pytest.approx(1 / 0.04 + 2 / 0.01)
    assert r.phi[1] == pytest.approx(1 / 0.81)
    assert r.h_total == pytest.approx(280.53044, abs=1e-4)
    assert lower_bound(r, 0.1) == pytest.approx(800.699, abs=1e-2)


def test_exp1a_frozen():
    r = classify(preset("exp1a"))
    # arm 4 is the only feasible arm, all better arms are infeasible by 0.25
    assert r.i_star == 4 and r.phi[4] == 0.0
    assert r.set_i == {0, 1, 2, 3} and not r.set_w
    assert r.h_total == pytest.approx(4 * 16 + 3 * 16)


def test_no_feasible_instance():
    inst = BanditInstance([[1.0, 0.9, 0.1], [0.5, 0.2, 0.7]], [0.5, 0.5])
    r = classify(inst)
    assert r.i_star == 2 and r.set_i == {0, 1} and not r.set_w
    assert all(math.isinf(p) for p in r.phi)
    assert r.h_total == pytest.approx(1 / 0.16 + 1 / 0.04)


def test_plain_best_arm_case():
    inst = BanditInstance([[0.0], [1.0], [0.5]], [])
    r = classify(inst)
    assert r.i_star == 1 and r.theta[1] == 0.0
    # every other arm is feasible and has to be beaten on performance
    assert r.set_w == {0, 2}
    assert r.h_total == pytest.approx(4.0 + 1.0 + 4.0)


def test_theta_phi_single_arm():
    inst = preset("exp1c")
    gt = ground_truth(inst)
    assert theta_of(inst, gt, 0) == pytest.approx(1 / 0.15**2)
    assert math.isinf(phi_of(inst, gt, 0))
    assert phi_of(inst, gt, 4) == pytest.approx(1 / 0.81)


def test_lower_bound_domain():
    r = classify(preset("exp1c"))
    # 1/(2.4 delta) <= 1 for delta >= 1/2.4, the bound is then vacuous
    assert lower_bound(r, 0.5) == 0.0
    with pytest.raises(ValueError):
        lower_bound(r, 1.0)


def test_oracle_against_random_instances():
    r = np.random.default_rng(2024)
    for _ in range(150):
        inst = random_instance(r, int(r.integers(1, 7)), int(r.integers(1, 5)))
        report, oracle = report_and_oracle(inst)
        assert not compare_report(report, oracle)
        assert partition_holds(report, inst.k)


@st.composite
def shuffled_instances(draw):
    seed = draw(st.integers(0, 2**32 - 1))
    k = draw(st.integers(1, 6))
    n = draw(st.integers(0, 4))
    r = np.random.default_rng(seed)
    inst = random_instance(r, k, n, threshold=draw(st.sampled_from([0.5, 0.3, 0.7])))
    perm = r.permutation(k)
    return BanditInstance(inst.means[perm], inst.thresholds)


@given(shuffled_instances())
def test_oracle_any_arm_order(inst):
    report, oracle = report_and_oracle(inst)
    assert not compare_report(report, oracle)
    assert partition_holds(report, inst.k)


@given(shuffled_instances(), st.floats(-5, 5))
def test_performance_shift_invariance(inst, c):
    a, b = classify(inst), classify(inst.shifted(c))
    assert a.set_i == b.set_i and a.set_w == b.set_w
    assert a.h_total == pytest.approx(b.h_total, rel=1e-6)


def transcribed_n(gamma, dq):
    return 32 * gamma * math.log(91 * gamma / dq * math.log(95 * gamma / dq))


def transcribed_q(gap, dq):
    d2 = gap * gap
    return 128 / d2 * math.log(368 / (d2 * dq) * math.log(384 / (d2 * dq))) + dq**4


def test_upper_bound_closed_forms_exp1c():
    inst = preset("exp1c")
    r = classify(inst)
    b = upper_bound_terms(inst, r, 0.1)
    dq = (0.1 / 20) ** 0.25
    assert b.delta_quarter == pytest.approx(dq)
    assert b.g_terms["G1"] == pytest.approx(1816.0)
    gamma = (inst.means[:, 1:] - 0.5) ** -2
    for i in range(5):
        for l in range(3):
            assert b.n_pairs[i, l] == pytest.approx(transcribed_n(gamma[i, l], dq), rel=1e-12)
        for j in range(5):
            if i != j:
                gap = inst.means[i, 0] - inst.means[j, 0]
                assert b.q_pairs[i, j] == pytest.approx(transcribed_q(gap, dq), rel=1e-12)
    assert b.leading_terms["optimal_feasibility"] == pytest.approx(
        sum(transcribed_n(g, dq) for g in gamma[1])
    )
    assert b.leading_terms["infeasible_arms"] == pytest.approx(transcribed_n(1 / 0.15**2, dq))
    phi_sum = sum(r.phi[i] for i in (1, 2, 3, 4))
    assert b.leading_terms["performance"] == pytest.approx(292 * phi_sum * math.log(phi_sum / 0.1))
    assert b.upper_leading == pytest.approx(sum(b.leading_terms.values()) + sum(b.g_terms.values()))
    assert b.upper_leading > b.lower_bound


def test_upper_bound_g_single_constraint():
    inst = BanditInstance([[1.0, 0.2], [0.9, 0.9]], [0.5])
    r = classify(inst)
    assert r.set_i == {1}
    b = upper_bound_terms(inst, r, 0.1)
    # with one constraint only the 8 Gamma terms remain
    gam = (0.9 - 0.5) ** -2
    assert b.g_per_arm[1] == pytest.approx(8 * gam + 8 * gam * (4 ** -0.125))
    assert b.g_terms["G2"] == pytest.approx(b.g_per_arm[1])


def test_upper_bound_no_feasible_terms():
    inst = BanditInstance([[1.0, 0.9, 0.1], [0.5, 0.2, 0.7]], [0.5, 0.5])
    b = upper_bound_terms(inst, classify(inst), 0.1)
    assert set(b.g_terms) == {"G4", "G5"}
    assert set(b.leading_terms) == {"infeasible_arms"}
    dq = (0.1 / 6) ** 0.25
    assert b.g_terms["G5"] == pytest.approx(0.4 * 2 * transcribed_q(0.5, dq))


def test_tied_top_constraints_make_g_undefined():
    # exp1b arms have three equal constraint means
    inst = preset("exp1b")
    b = upper_bound_terms(inst, classify(inst), 0.1)
    assert all(math.isinf(g) for g in b.g_per_arm)
    # exp1b has no arm in I, so G2 does not need them
    assert b.g_terms["G2"] == 0.0
    # every arm infeasible with tied top constraints: G4 needs every g_i
    tied = BanditInstance([[1.0, 0.6, 0.6], [0.0, 0.7, 0.7]], [0.5, 0.5])
    with pytest.raises(BoundDomainError, match="G4"):
        upper_bound_terms(tied, classify(tied), 0.1)


def test_domain_error_reports_term():
    # a huge performance gap pushes the q_ij log argument below 1
    inst = BanditInstance([[100.0, 0.2], [0.0, 0.1]], [0.5])
    r = classify(inst)
    with pytest.raises(BoundDomainError, match="in term q_ij"):
        upper_bound_terms(inst, r, 0.1)
    out = analyze(inst, 0.1)
    assert "error" in out["bounds"]


def test_analyze_json():
    out = analyze(preset("exp1c"), 0.1)
    text = json.dumps(out, allow_nan=False)
    back = json.loads(text)
    assert back["complexity"]["i_star"] == 1
    assert back["complexity"]["phi"][0] is None
    assert back["bounds"]["g_terms"]["G1"] == pytest.approx(1816.0)
