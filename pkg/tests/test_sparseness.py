"""Gini sparseness: frozen exact values, agreement with two independently
coded oracle formulas, invariance properties, and regime comparison."""
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from attrsparse.attribution import AttributionVector
from attrsparse.sparseness import (
    GiniReport,
    compare_regimes,
    gini,
    gini_of_attribution,
    make_gini_report,
)


def _gini_share_form(v):
    """Oracle 1: 1 - 2 sum_k (v_(k)/T) * ((d - k + 0.5)/d), coded directly."""
    v = np.sort(np.asarray(v, dtype=float))
    d = v.size
    total = math.fsum(v.tolist())
    acc = math.fsum((v[k - 1] / total) * ((d - k + 0.5) / d) for k in range(1, d + 1))
    return 1.0 - 2.0 * acc


def _gini_lorenz_form(v):
    """Oracle 2: one minus twice the trapezoid area under the Lorenz curve."""
    v = np.sort(np.asarray(v, dtype=float))
    total = math.fsum(v.tolist())
    shares = np.concatenate([[0.0], np.cumsum(v) / total])
    area = math.fsum(((shares[k] + shares[k + 1]) / 2.0 / v.size) for k in range(v.size))
    return 1.0 - 2.0 * area


def test_exact_values():
    assert gini(np.ones(5)) == 0.0
    assert gini(np.asarray([7.0])) == 0.0
    assert gini(np.asarray([0.0, 0.0, 0.0, 3.0])) == 0.75
    assert gini(np.asarray([3.0, 1.0, 0.0])) == 0.5
    assert gini(np.asarray([1.0, 0.0])) == 0.5
    # single nonzero among d entries scores (d-1)/d exactly
    for d in (2, 3, 10, 64):
        v = np.zeros(d)
        v[0] = 2.5
        assert gini(v) == (d - 1) / d


def test_all_equal_is_exactly_zero_any_scale():
    for c in (1e-9, 1.0, 3.7, 1e12):
        for d in (1, 2, 7, 100):
            assert gini(np.full(d, c)) == 0.0


def test_zero_vector_warns_and_returns_zero():
    with pytest.warns(UserWarning, match="all-zero"):
        assert gini(np.zeros(4)) == 0.0


def test_validation_errors():
    with pytest.raises(ValueError, match="non-negative"):
        gini(np.asarray([1.0, -0.5]))
    with pytest.raises(ValueError, match="non-empty"):
        gini(np.asarray([]))
    with pytest.raises(ValueError, match="non-empty"):
        gini(np.zeros((2, 2)))


def test_matches_two_independent_oracles(rng):
    for _ in range(300):
        d = int(rng.integers(2, 40))
        v = rng.uniform(0, 10, size=d)
        if rng.uniform() < 0.3:
            v[rng.integers(0, d)] = 0.0
        g = gini(v)
        assert g == pytest.approx(_gini_share_form(v), abs=1e-12)
        assert g == pytest.approx(_gini_lorenz_form(v), abs=1e-12)


def test_fuzz_range_scale_permutation(rng):
    for _ in range(2000):
        d = int(rng.integers(1, 30))
        v = rng.exponential(size=d)
        g = gini(v)
        assert 0.0 <= g <= (d - 1) / d + 1e-15
        assert gini(3.25 * v) == pytest.approx(g, abs=1e-12)
        assert gini(rng.permutation(v)) == g  # sorting makes order exactly irrelevant


def test_replication_invariance(rng):
    for _ in range(100):
        d = int(rng.integers(1, 12))
        v = rng.uniform(0, 5, size=d)
        for m in (2, 3, 7):
            assert gini(np.tile(v, m)) == pytest.approx(gini(v), abs=1e-12)


def test_appending_zero_strictly_increases(rng):
    for _ in range(100):
        v = rng.uniform(0.1, 5, size=int(rng.integers(1, 15)))
        assert gini(np.append(v, 0.0)) > gini(v)


@given(st.lists(st.floats(min_value=0.0, max_value=1e6), min_size=1, max_size=25),
       st.floats(min_value=1e-3, max_value=1e3))
@settings(max_examples=200, deadline=None)
def test_uniform_shift_scales_gini_by_mass_ratio(vals, c):
    v = np.asarray(vals)
    total = math.fsum(vals)
    if total == 0.0:
        return
    d = v.size
    # adding c to every entry rescales the index by T / (T + d c) exactly
    expected = gini(v) * total / (total + d * c)
    assert gini(v + c) == pytest.approx(expected, rel=1e-9, abs=1e-12)


@given(st.lists(st.floats(min_value=0.0, max_value=1e9), min_size=1, max_size=40))
@settings(max_examples=300, deadline=None)
def test_hypothesis_bounds_and_oracle(vals):
    v = np.asarray(vals)
    if math.fsum(vals) == 0.0:
        return
    g = gini(v)
    assert 0.0 <= g <= 1.0
    assert g == pytest.approx(_gini_share_form(v), abs=1e-12)


def test_gini_of_attribution_uses_magnitudes():
    attr = AttributionVector(np.asarray([-3.0, 1.0, 0.0]), np.zeros(3), "t", 0.0)
    assert gini_of_attribution(attr) == 0.5


# --- reports and regime comparison ------------------------------------------------

def test_gini_report_mean_and_validation():
    rep = GiniReport("natural", np.asarray([0.2, 0.4, 0.9]), split_key="d:test:3")
    assert rep.mean == pytest.approx(0.5, abs=1e-15)
    with pytest.raises(ValueError, match="non-empty"):
        GiniReport("natural", np.asarray([]))
    with pytest.raises(ValueError, match=r"\[0, 1\]"):
        GiniReport("natural", np.asarray([0.5, 1.2]))
    with pytest.raises(ValueError, match=r"\[0, 1\]"):
        GiniReport("natural", np.asarray([-0.1]))


def test_make_gini_report():
    attribs = [
        AttributionVector(np.asarray([1.0, 0.0]), np.zeros(2), "t", 0.0),
        AttributionVector(np.asarray([2.0, 2.0]), np.zeros(2), "t", 0.0),
    ]
    rep = make_gini_report(attribs, "natural", split_key="k")
    np.testing.assert_allclose(rep.per_example, [0.5, 0.0], atol=1e-15)
    assert rep.regime_tag == "natural" and rep.split_key == "k"


def test_compare_regimes_gaps_and_drops():
    nat = GiniReport("natural", np.asarray([0.2, 0.4]), split_key="k")
    adv = GiniReport("adversarial(eps=0.1)", np.asarray([0.5, 0.5]), split_key="k")
    l1 = GiniReport("l1(lam=0.02)", np.asarray([0.3, 0.7]), split_key="k")
    acc = {"natural": 0.90, "adversarial(eps=0.1)": 0.85, "l1(lam=0.02)": 0.92}
    cmpr = compare_regimes(nat, adv, l1, acc)
    assert cmpr.natural_mean_gini == pytest.approx(0.3)
    assert cmpr.gap_adversarial == pytest.approx(0.2)
    assert cmpr.gap_l1 == pytest.approx(0.2)
    # lower robust accuracy shows as a positive drop in percentage points
    assert cmpr.accuracy_drop_adversarial_pct == pytest.approx(5.0)
    assert cmpr.accuracy_drop_l1_pct == pytest.approx(-2.0)
    np.testing.assert_allclose(cmpr.per_example_gap_adversarial, [0.3, 0.1])
    np.testing.assert_allclose(cmpr.per_example_gap_l1, [0.1, 0.3])
    assert cmpr.adversarial_tag == "adversarial(eps=0.1)"
    assert cmpr.l1_tag == "l1(lam=0.02)"


def test_compare_regimes_partial_and_errors():
    nat = GiniReport("natural", np.asarray([0.2, 0.4]), split_key="k")
    adv = GiniReport("adv", np.asarray([0.5, 0.5]), split_key="k")
    only_nat = compare_regimes(nat, None, None, {"natural": 0.9})
    assert only_nat.gap_adversarial is None and only_nat.gap_l1 is None
    with pytest.raises(ValueError, match="missing accuracy for regime 'natural'"):
        compare_regimes(nat, adv, None, {"adv": 0.8})
    with pytest.raises(ValueError, match="missing accuracy for regime 'adv'"):
        compare_regimes(nat, adv, None, {"natural": 0.9})
    short = GiniReport("adv", np.asarray([0.5]), split_key="k")
    with pytest.raises(ValueError, match="splits differ"):
        compare_regimes(nat, short, None, {"natural": 0.9, "adv": 0.8})
    other_split = GiniReport("adv", np.asarray([0.5, 0.5]), split_key="other")
    with pytest.raises(ValueError, match="split key"):
        compare_regimes(nat, other_split, None, {"natural": 0.9, "adv": 0.8})
