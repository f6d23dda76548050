"""Allocation policies: index formulas, init order, schedules, tie-breaks.

Frozen numeric expectations come from scripts/golden_values.py, an
independent high-precision evaluation of the same closed forms.
"""

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from alloc_bandit.stats import RunningStats
from alloc_bandit.strategies import (
    AFormula,
    StrategyKind,
    StrategyParams,
    b_index,
    ch_index,
    compute_a,
    default_delta,
    gafs_select,
    make_state,
    optimal_static_allocation,
    select_arm,
    update_state,
)


def feed(state, arm, x):
    update_state(state, arm, x)


def drive_init(state, samples_by_arm):
    """Run the two-per-arm init phase with scripted samples."""
    for k, xs in enumerate(samples_by_arm):
        for x in xs:
            arm = select_arm(state)
            assert arm == k
            feed(state, arm, x)


# Index formulas.

def test_ch_index_golden_values():
    assert ch_index(0.25, 2, 0.01) == pytest.approx(1.7344745197170104, rel=1e-12)
    assert ch_index(0.0, 2, 0.01) == pytest.approx(1.6094745197170104, rel=1e-12)
    assert ch_index(0.25, 3, 0.01) == pytest.approx(0.95942029495948866, rel=1e-12)
    assert ch_index(0.25, 2, 0.1) == pytest.approx(1.2630703470388598, rel=1e-12)


def test_ch_index_delta_one_kills_bonus():
    for pulls in (1, 2, 7, 100):
        assert ch_index(0.0, pulls, 1.0) == 0.0
        assert ch_index(0.3, pulls, 1.0) == pytest.approx(0.3 / pulls, rel=1e-15)


def test_b_index_golden_values():
    assert b_index(1.0, 4, 0.1, 2.0) == pytest.approx(4.9765506561562763, rel=1e-12)
    assert b_index(0.0, 4, 0.1, 2.0) == pytest.approx(2.995732273553991, rel=1e-12)


def test_b_index_zero_a_is_plain_ratio():
    assert b_index(1.5, 3, 0.05, 0.0) == pytest.approx(1.5 ** 2 / 3, rel=1e-15)


def test_b_index_zero_sd_leaves_last_term():
    # (0 + 0 + 4 a^2 log(2/d) / T) / T
    for t in (2, 5, 50):
        expect = 4 * 2.0 ** 2 * math.log(2 / 0.1) / t ** 2
        assert b_index(0.0, t, 0.1, 2.0) == pytest.approx(expect, rel=1e-14)


def test_index_functions_vectorize():
    """Array inputs evaluate elementwise, bit-equal to scalar calls."""
    var = np.array([0.25, 0.0, 0.25])
    pulls = np.array([2, 2, 3])
    out = ch_index(var, pulls, 0.01)
    assert out.shape == (3,)
    for i in range(3):
        assert out[i] == ch_index(float(var[i]), int(pulls[i]), 0.01)
    sd = np.array([1.0, 0.0])
    outb = b_index(sd, np.array([4, 4]), 0.1, 2.0)
    for i in range(2):
        assert outb[i] == b_index(float(sd[i]), 4, 0.1, 2.0)


@given(
    v=st.floats(0.001, 100),
    pulls=st.integers(1, 10_000),
    delta=st.floats(1e-12, 0.999),
)
def test_ch_index_strictly_decreasing_in_pulls(v, pulls, delta):
    assert ch_index(v, pulls, delta) > ch_index(v, pulls + 1, delta)


@given(
    sd=st.floats(0.0, 10),
    pulls=st.integers(2, 10_000),
    delta=st.floats(1e-12, 0.999),
    a=st.floats(0.01, 50),
)
def test_b_index_strictly_decreasing_in_pulls(sd, pulls, delta, a):
    assert b_index(sd, pulls, delta, a) > b_index(sd, pulls + 1, delta, a)


@given(
    v=st.floats(0.0, 100),
    pulls=st.integers(1, 1000),
    d1=st.floats(1e-12, 0.999),
    d2=st.floats(1e-12, 0.999),
)
def test_indices_nonincreasing_in_delta(v, pulls, d1, d2):
    lo, hi = sorted((d1, d2))
    assert ch_index(v, pulls, lo) >= ch_index(v, pulls, hi)
    if pulls >= 2:
        assert b_index(v, pulls, lo, 1.5) >= b_index(v, pulls, hi, 1.5)


# The exploration constant.

def test_compute_a_golden_values():
    assert compute_a(1, 1, 0.01, 100, AFormula.APPENDIX) == pytest.approx(
        5.0894176145820221, rel=1e-12
    )
    assert compute_a(1, 1, 0.01, 100, AFormula.MAIN_TEXT) == pytest.approx(
        3.8323398207736203, rel=1e-12
    )
    d = 1000.0 ** -3.5
    assert compute_a(10, 1, d, 1000) == pytest.approx(31.098410120318129, rel=1e-12)
    assert compute_a(2, 1, d, 1000) == pytest.approx(13.90763180423975, rel=1e-12)


def test_compute_a_second_term_vanishes_with_delta():
    a = compute_a(3, 2, 1e-300, 10_000, AFormula.APPENDIX)
    assert a == pytest.approx(2 * math.sqrt(3 * math.log(2 / 1e-300)), rel=1e-9)
    am = compute_a(3, 2, 1e-300, 10_000, AFormula.MAIN_TEXT)
    assert am == pytest.approx(math.sqrt(2 * 3 * math.log(2 / 1e-300)), rel=1e-9)


def test_compute_a_domain_errors():
    with pytest.raises(ValueError):
        compute_a(0.5, 1, 0.01, 100)
    with pytest.raises(ValueError):
        compute_a(1, 0.5, 0.01, 100)
    with pytest.raises(ValueError):
        compute_a(1, 1, 0.0, 100)
    with pytest.raises(ValueError):
        compute_a(1, 1, 1.5, 100)
    with pytest.raises(ValueError):
        compute_a(1, 1, 0.01, 0)


def test_appendix_exceeds_main_text_leading_term():
    # 2 sqrt(x) > sqrt(2 x) for x > 0, second terms identical
    assert compute_a(1, 1, 0.01, 100, AFormula.APPENDIX) > compute_a(
        1, 1, 0.01, 100, AFormula.MAIN_TEXT
    )


# Static allocation.

def test_allocation_examples():
    assert optimal_static_allocation((4, 1), 1000) == [800, 200]
    assert optimal_static_allocation((1, 1, 1), 9) == [3, 3, 3]
    assert optimal_static_allocation((2, 1), 10) == [7, 3]
    assert optimal_static_allocation((1, 1, 1), 10) == [4, 3, 3]
    assert optimal_static_allocation((1, 1, 1), 11) == [4, 4, 3]
    assert optimal_static_allocation((4, 1), 7) == [6, 1]
    assert optimal_static_allocation((2, 1, 1), 9) == [5, 2, 2]


@given(
    variances=st.lists(st.floats(0.01, 100), min_size=1, max_size=8),
    n=st.integers(1, 100_000),
    scale=st.floats(0.001, 1000),
)
def test_allocation_sums_and_scale_invariance(variances, n, scale):
    if n < len(variances):
        n = len(variances)
    counts = optimal_static_allocation(variances, n)
    assert sum(counts) == n
    assert all(c >= 0 for c in counts)
    total = sum(variances)
    for c, v in zip(counts, variances):
        assert abs(c - n * v / total) < 1.0 + 1e-9
    assert optimal_static_allocation([v * scale for v in variances], n) == counts


def test_allocation_rejects_bad_input():
    with pytest.raises(ValueError):
        optimal_static_allocation((1.0, 0.0), 10)
    with pytest.raises(ValueError):
        optimal_static_allocation((1.0, -2.0), 10)
    with pytest.raises(ValueError):
        optimal_static_allocation((1.0, 1.0), 1)


# Parameter handling.

def test_default_delta_schedules():
    assert default_delta(StrategyKind.CHAS, 1000) == pytest.approx(1000 ** -2.5)
    assert default_delta(StrategyKind.BAS, 1000) == pytest.approx(1000.0 ** -3.5)
    assert default_delta(StrategyKind.UNIFORM, 1000) is None
    assert default_delta(StrategyKind.ORACLE, 1000) is None
    assert default_delta(StrategyKind.GAFS_MAX, 1000) is None


def test_params_validation():
    with pytest.raises(ValueError):
        StrategyParams(kind=StrategyKind.CHAS, delta=0.0)
    with pytest.raises(ValueError):
        StrategyParams(kind=StrategyKind.CHAS, delta=1.0)
    with pytest.raises(ValueError):
        StrategyParams(kind=StrategyKind.BAS, c1=0.5)
    with pytest.raises(ValueError):
        StrategyParams(kind=StrategyKind.BAS, a_override=0.0)
    with pytest.raises(ValueError):
        StrategyParams(kind=StrategyKind.BAS, sigma_bar=-1.0)


def test_make_state_resolves_a():
    d = 1000.0 ** -3.5
    s = make_state(
        StrategyParams(kind=StrategyKind.BAS), 1000, 2, instance_c1=10, instance_c2=1
    )
    assert s.a == pytest.approx(compute_a(10, 1, d, 1000), rel=1e-15)
    s = make_state(StrategyParams(kind=StrategyKind.BAS, sigma_bar=5.0), 1000, 2)
    assert s.a == pytest.approx(math.sqrt(2 * 5.0 * math.log(1000)), rel=1e-12)
    s = make_state(
        StrategyParams(kind=StrategyKind.BAS, a_override=2.5, sigma_bar=5.0), 1000, 2
    )
    assert s.a == 2.5
    with pytest.raises(ValueError):
        make_state(StrategyParams(kind=StrategyKind.BAS), 1000, 2)


def test_make_state_budget_checks():
    with pytest.raises(ValueError):
        make_state(StrategyParams(kind=StrategyKind.CHAS), 3, 2)
    with pytest.raises(ValueError):
        make_state(StrategyParams(kind=StrategyKind.UNIFORM), 1, 2)
    with pytest.raises(ValueError):
        make_state(StrategyParams(kind=StrategyKind.ORACLE), 1000, 2)  # no variances
    # near-degenerate proportions can round an arm to zero pulls
    with pytest.raises(ValueError):
        make_state(
            StrategyParams(kind=StrategyKind.ORACLE), 10, 2, variances=(1e9, 1e-9)
        )


# Arm selection.

def test_init_phase_orders_arms():
    state = make_state(StrategyParams(kind=StrategyKind.CHAS), 20, 3)
    seen = []
    for x in (0.0, 1.0, 0.5, 0.5, 2.0, 2.0):
        arm = select_arm(state)
        seen.append(arm)
        feed(state, arm, x)
    assert seen == [0, 0, 1, 1, 2, 2]


def test_ch_selection_worked_example():
    state = make_state(StrategyParams(kind=StrategyKind.CHAS, delta=0.01), 10, 2)
    drive_init(state, [(0.0, 1.0), (0.5, 0.5)])
    assert ch_index(state.arms[0].variance_biased(), 2, 0.01) == pytest.approx(
        1.7344745197170104, rel=1e-12
    )
    assert ch_index(state.arms[1].variance_biased(), 2, 0.01) == pytest.approx(
        1.6094745197170104, rel=1e-12
    )
    assert select_arm(state) == 0


def test_identical_arms_tie_break_to_lowest():
    state = make_state(StrategyParams(kind=StrategyKind.CHAS, delta=0.05), 20, 3)
    drive_init(state, [(0.0, 1.0)] * 3)
    assert select_arm(state) == 0
    bstate = make_state(
        StrategyParams(kind=StrategyKind.BAS, a_override=1.0), 20, 3
    )
    drive_init(bstate, [(0.0, 1.0)] * 3)
    assert select_arm(bstate) == 0


def test_uniform_cycles_round_robin():
    state = make_state(StrategyParams(kind=StrategyKind.UNIFORM), 7, 3)
    seen = []
    for x in range(7):
        arm = select_arm(state)
        seen.append(arm)
        feed(state, arm, float(x))
    assert seen == [0, 1, 2, 0, 1, 2, 0]


def test_oracle_schedule_hits_targets():
    state = make_state(
        StrategyParams(kind=StrategyKind.ORACLE), 10, 2, variances=(4.0, 1.0)
    )
    rng = np.random.default_rng(0)
    for _ in range(10):
        arm = select_arm(state)
        feed(state, arm, rng.standard_normal())
    assert [s.count for s in state.arms] == [8, 2]
    assert state.oracle_targets == (8, 2)


def test_budget_exhaustion_raises():
    state = make_state(StrategyParams(kind=StrategyKind.UNIFORM), 2, 2)
    for x in (0.0, 1.0):
        feed(state, select_arm(state), x)
    with pytest.raises(ValueError):
        select_arm(state)


# GAFS specifics.

def put_stats(state, arm, count, mean, m2):
    state.arms[arm] = RunningStats(count=count, mean=mean, m2=m2)


def rebuild_t(state):
    state.t = sum(s.count for s in state.arms)


def test_gafs_threshold_exactly_met_uses_ratio():
    state = make_state(StrategyParams(kind=StrategyKind.GAFS_MAX), 100, 2)
    drive_init(state, [(0.0, 1.0), (0.5, 0.5)])
    # t=4, ceil(sqrt(4))=2, counts (2,2): no forced pull; ratios (0.125, 0)
    assert gafs_select(state) == 0
    assert select_arm(state) == 0


def test_gafs_forces_underpulled_arm():
    state = make_state(StrategyParams(kind=StrategyKind.GAFS_MAX), 200, 2)
    put_stats(state, 0, 95, 0.0, 10.0)
    put_stats(state, 1, 5, 0.0, 100.0)
    rebuild_t(state)
    # ceil(sqrt(100)) = 10 > 5
    assert gafs_select(state) == 1


def test_gafs_ratio_comparison():
    state = make_state(StrategyParams(kind=StrategyKind.GAFS_MAX), 200, 2)
    put_stats(state, 0, 50, 0.0, 0.2 * 50)
    put_stats(state, 1, 50, 0.0, 0.1 * 50)
    rebuild_t(state)
    assert gafs_select(state) == 0


def test_gafs_forced_tie_takes_least_pulled_then_lowest():
    state = make_state(StrategyParams(kind=StrategyKind.GAFS_MAX), 400, 3)
    put_stats(state, 0, 90, 0.0, 9.0)
    put_stats(state, 1, 6, 0.0, 6.0)
    put_stats(state, 2, 4, 0.0, 4.0)
    rebuild_t(state)
    # threshold ceil(sqrt(100)) = 10; arm 2 is least pulled
    assert gafs_select(state) == 2
    put_stats(state, 2, 6, 0.0, 4.0)
    rebuild_t(state)
    # tie between arms 1 and 2 at count 6: lowest index wins
    assert gafs_select(state) == 1


def test_pull_sequences_deterministic_given_samples():
    def run():
        state = make_state(StrategyParams(kind=StrategyKind.CHAS), 40, 2)
        rng = np.random.default_rng(5)
        seq = []
        for _ in range(40):
            arm = select_arm(state)
            seq.append(arm)
            feed(state, arm, float(rng.standard_normal()))
        return seq

    assert run() == run()
