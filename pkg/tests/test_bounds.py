"""Concentration events and closed-form bound evaluators.

Frozen numeric expectations come from scripts/golden_values.py.
"""

import warnings

import numpy as np
import pytest
from hypothesis import given, strategies as st

from alloc_bandit.bounds import (
    InstanceSummary,
    b_event_holds,
    bas_pull_bounds,
    bas_regret_bound,
    ch_event_holds,
    ch_pull_deviation_bound,
    ch_regret_bound,
    gaussian_regret_bound,
    vacuous_for_pulls,
    vacuous_for_regret,
)
from alloc_bandit.strategies import compute_a


def summary_41():
    return InstanceSummary((4.0, 1.0), 1.0, 1.0)


# Instance summaries.

def test_summary_derived_quantities():
    s = InstanceSummary((4.0, 1.0), 2.0, 1.0)
    assert s.num_arms == 2
    assert s.total_variance == 5.0
    assert s.lambdas == (0.8, 0.2)
    assert s.lambda_min == 0.2


def test_summary_validation():
    with pytest.raises(ValueError):
        InstanceSummary((), 1.0, 1.0)
    with pytest.raises(ValueError):
        InstanceSummary((1.0, 0.0), 1.0, 1.0)
    with pytest.raises(ValueError):
        InstanceSummary((1.0, -1.0), 1.0, 1.0)


@given(st.lists(st.floats(0.01, 50), min_size=1, max_size=6))
def test_summary_lambdas_sum_to_one(variances):
    s = InstanceSummary(tuple(variances), 1.0, 1.0)
    assert sum(s.lambdas) == pytest.approx(1.0, rel=1e-12)
    assert s.lambda_min == min(s.lambdas)


# Concentration events on toy paths.

def test_ch_event_on_small_paths():
    # samples (0, 1), true variance 0.25: estimates stay inside the band
    assert ch_event_holds([np.array([0.0, 1.0])], [0.25], 0.01)
    # wildly inflated empirical variance falls outside
    assert not ch_event_holds([np.array([10.0, -10.0])], [0.01], 0.01)


def test_ch_event_delta_one_band_is_degenerate():
    # log(1/1) = 0 shrinks the band to exact equality, which generic data fails
    assert not ch_event_holds([np.array([0.0, 1.0])], [0.25], 1.0)


def test_ch_event_requires_every_arm():
    good = np.array([0.0, 1.0])
    bad = np.array([10.0, -10.0])
    assert ch_event_holds([good, good], [0.25, 0.25], 0.01)
    assert not ch_event_holds([good, bad], [0.25, 0.01], 0.01)


def test_ch_event_batch_matches_per_row():
    rows = np.vstack([[0.0, 1.0], [10.0, -10.0]])
    out = ch_event_holds([rows], [0.25], 0.01)
    assert out.shape == (2,)
    assert out.tolist() == [True, False]
    for r in range(2):
        assert out[r] == ch_event_holds([rows[r]], [0.25], 0.01)


def test_b_event_band_scales_with_a():
    path = np.array([0.0, 1.0])
    assert b_event_holds([path], [0.25], 0.1, 1.0)
    assert not b_event_holds([path], [0.25], 0.1, 0.01)


def test_b_event_needs_two_samples():
    with pytest.raises(ValueError):
        b_event_holds([np.array([1.0])], [0.25], 0.1, 1.0)


def test_b_event_batch_matches_per_row():
    rng = np.random.default_rng(2)
    rows = rng.normal(0.0, 0.5, size=(8, 30))
    out = b_event_holds([rows], [0.25], 0.1, 1.0)
    assert out.shape == (8,)
    for r in range(8):
        assert out[r] == b_event_holds([rows[r]], [0.25], 0.1, 1.0)


# Deviation and regret bound evaluators.

def test_ch_pull_deviation_golden():
    val = ch_pull_deviation_bound(summary_41(), 1000, 1000.0 ** -2.5)
    assert val == pytest.approx(3534.1820007151994, rel=1e-12)


def test_ch_pull_deviation_degenerates_to_4k():
    # delta = 1 removes the sqrt term, leaving the rounding allowance 4K
    assert ch_pull_deviation_bound(summary_41(), 1000, 1.0) == 8.0
    three = InstanceSummary((1.0, 1.0, 1.0), 1.0, 1.0)
    assert ch_pull_deviation_bound(three, 1000, 1.0) == 12.0


def test_ch_regret_bound_golden():
    assert ch_regret_bound(1000, 0.2, 5.0) == pytest.approx(
        374.66985315572151, rel=1e-12
    )


def test_ch_regret_bound_decreasing_in_lambda_min():
    vals = [ch_regret_bound(1000, lam, 5.0) for lam in (0.05, 0.1, 0.2, 0.4)]
    assert vals == sorted(vals, reverse=True)


def test_ch_regret_bound_decay():
    # quadrupling n cuts the bound by clearly more than the n^(-3/2) factor 8
    # (the second term decays like n^-2 and dominates at these scales)
    for n in (500, 1000, 4000):
        r = ch_regret_bound(4 * n, 0.2, 5.0) / ch_regret_bound(n, 0.2, 5.0)
        assert r < 1.0 / 8.0


def test_bas_pull_bounds_golden():
    d = 1000.0 ** -3.5
    a = compute_a(10, 1, d, 1000)
    lo, hi = bas_pull_bounds(summary_41(), 0, 1000, d, a)
    assert lo == pytest.approx(27917366.493661132, rel=1e-12)
    assert hi == pytest.approx(34896708.117076415, rel=1e-12)


def test_bas_pull_bounds_arm_scaling():
    """Lower bound is the upper one scaled by that arm's proportion."""
    d = 1e-3
    for arm, lam in ((0, 0.8), (1, 0.2)):
        lo, hi = bas_pull_bounds(summary_41(), arm, 10_000, d, 2.0)
        assert lo == pytest.approx(lam * hi, rel=1e-12)


def test_bas_regret_bound_golden_and_linearity():
    assert bas_regret_bound(1000, 2, 0.2, 1, 1) == pytest.approx(
        4611.3409795531147, rel=1e-12
    )
    assert bas_regret_bound(1000, 2, 0.2, 2, 1) == pytest.approx(
        2 * 4611.3409795531147, rel=1e-12
    )
    # (c2 + 1) factor: c2 = 3 doubles the c2 = 1 value
    assert bas_regret_bound(1000, 2, 0.2, 1, 3) == pytest.approx(
        2 * 4611.3409795531147, rel=1e-12
    )


def test_gaussian_regret_bound_golden():
    assert gaussian_regret_bound(1000, 2, 5.0) == pytest.approx(
        3168.7879767871534, rel=1e-12
    )
    assert gaussian_regret_bound(4000, 2, 5.0) == pytest.approx(
        571.03479016019094, rel=1e-12
    )


def test_gaussian_regret_bound_exact_decay_ratio():
    # value(n) / value(4n) = 8 (log n / log 4n)^2 exactly, here at n = 1000
    r = gaussian_regret_bound(1000, 2, 5.0) / gaussian_regret_bound(4000, 2, 5.0)
    assert r == pytest.approx(5.5492030107276325, rel=1e-12)


def test_gaussian_regret_bound_sigma_bar_domain():
    with pytest.raises(ValueError):
        gaussian_regret_bound(1000, 2, 0.49)
    assert gaussian_regret_bound(1000, 2, 0.5) > 0


def test_regret_bounds_decrease_in_n():
    for f in (
        lambda n: ch_regret_bound(n, 0.2, 5.0),
        lambda n: bas_regret_bound(n, 2, 0.2, 1, 1),
        lambda n: gaussian_regret_bound(n, 2, 5.0),
    ):
        vals = [f(n) for n in (100, 1000, 10_000, 100_000)]
        assert vals == sorted(vals, reverse=True)


# Vacuity helpers.

def test_vacuity_flags():
    assert vacuous_for_pulls(1001.0, 1000)
    assert not vacuous_for_pulls(999.0, 1000)
    assert vacuous_for_regret(2.1, 4.0)
    assert not vacuous_for_regret(1.9, 4.0)


def test_desk_scale_bounds_are_vacuous():
    """At n = 1000 the constants exceed any attainable deviation or regret."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        dev = ch_pull_deviation_bound(summary_41(), 1000, 1000.0 ** -2.5)
    assert vacuous_for_pulls(dev, 1000)
    assert vacuous_for_regret(ch_regret_bound(1000, 0.2, 5.0), 4.0)


# Regime warnings.

def test_small_n_warns():
    with pytest.warns(RuntimeWarning):
        ch_pull_deviation_bound(summary_41(), 8, 0.01)
    with pytest.warns(RuntimeWarning):
        bas_pull_bounds(summary_41(), 0, 8, 0.01, 1.0)


def test_regime_n_does_not_warn():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        ch_pull_deviation_bound(summary_41(), 10, 0.01)
