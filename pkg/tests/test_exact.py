import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given

from jaccardtest import (
    DimensionError,
    MultinomialState,
    OccurrenceProbs,
    ResourceLimitError,
    centered_statistic,
    contingency,
    exact_pvalue,
    in_critical_region,
    log_multinomial_pmf,
)
from jaccardtest.exact import exact_region_mass, state_deviation

from oracles import binary_pairs, brute_force_pvalue, enumerate_pmf, fraction_deviation, simulated_exceedance


@pytest.mark.parametrize("state, probs, expected", [
    ((1, 0, 0, 1), (0.5, 0.5), math.log(0.125)),
    ((0, 0, 0, 5), (0.0, 0.0), 0.0),
    ((1, 1, 1, 1), (0.5, 0.5), math.log(0.09375)),
])
def test_log_pmf_examples(state, probs, expected):
    assert log_multinomial_pmf(MultinomialState(*state), OccurrenceProbs(*probs)) == pytest.approx(expected, abs=1e-13)


def test_log_pmf_zero_cell_with_count_is_minus_infinity():
    assert log_multinomial_pmf(MultinomialState(1, 0, 0, 1), OccurrenceProbs(0.0, 0.5)) == -math.inf


def test_log_pmf_matches_direct_enumeration():
    cells = OccurrenceProbs(0.3, 0.8).cell_probs()
    for state, w in enumerate_pmf(7, cells).items():
        assert math.exp(log_multinomial_pmf(MultinomialState(*state), OccurrenceProbs(0.3, 0.8))) == pytest.approx(w, rel=1e-12)


@pytest.mark.parametrize("state, observed, expected", [
    ((1, 0, 0, 1), 2 / 3, True),
    ((2, 0, 0, 0), 2 / 3, False),
    ((0, 0, 0, 4), 1e-3, False),
])
def test_critical_region_examples(state, observed, expected):
    assert in_critical_region(MultinomialState(*state), observed, 1e-12) is expected


def test_state_deviation_matches_rational_oracle():
    m = 9
    for n1 in range(m + 1):
        for n2 in range(m + 1 - n1):
            for n3 in range(m + 1 - n1 - n2):
                s = MultinomialState(n1, n2, n3, m - n1 - n2 - n3)
                assert state_deviation(s) == pytest.approx(float(fraction_deviation(n1, n2, n3, m)), abs=1e-15)


def test_two_unit_example():
    r = exact_pvalue([1, 0], [1, 0])
    assert r.p_value == pytest.approx(0.125, abs=1e-15)
    assert r.engine == "exact"
    assert brute_force_pvalue([1, 0], [1, 0]) == Fraction(1, 8)


def test_identical_all_ones_gives_one():
    assert exact_pvalue([1, 1, 1], [1, 1, 1]).p_value == 1.0


def test_length_mismatch():
    with pytest.raises(DimensionError):
        exact_pvalue([1, 0], [1])


def test_resource_guard():
    a = np.zeros(30, dtype=np.uint8)
    a[::2] = 1
    with pytest.raises(ResourceLimitError):
        exact_pvalue(a, a, max_m=20)


@given(binary_pairs(1, 8))
def test_matches_brute_force_enumeration(pair):
    a, b = pair
    assert exact_pvalue(a, b).p_value == pytest.approx(float(brute_force_pvalue(a, b)), abs=1e-9)


@given(binary_pairs(1, 60))
def test_pvalue_bounds(pair):
    a, b = pair
    r = exact_pvalue(a, b)
    assert 0.0 <= r.p_value <= 1.0
    assert r.diagnostics["total_mass"] == pytest.approx(1.0, abs=1e-10)
    if r.centered == 0.0:
        assert r.p_value == 1.0


@given(binary_pairs(1, 40))
def test_observed_state_in_region(pair):
    a, b = pair
    r = exact_pvalue(a, b)
    t = contingency(a, b)
    obs = math.exp(log_multinomial_pmf(t, OccurrenceProbs.from_table(t)))
    assert r.p_value >= obs * (1 - 1e-12)


@pytest.mark.parametrize("m, pi, pj", [(50, 0.5, 0.5), (200, 0.1, 0.7), (500, 0.33, 0.9), (1000, 0.02, 0.5)])
def test_total_mass_is_one(m, pi, pj):
    region, total = exact_region_mass(m, OccurrenceProbs(pi, pj), 0.0, 1e-12)
    assert total == pytest.approx(1.0, abs=1e-10)
    assert region == pytest.approx(1.0, abs=1e-10)


def test_monotone_in_threshold():
    probs = OccurrenceProbs(0.37, 0.61)
    prev = 2.0
    for thr in np.linspace(0.0, 0.8, 81):
        region, _ = exact_region_mass(60, probs, float(thr), 1e-12)
        assert region <= prev + 1e-15
        prev = region


def test_agrees_with_simulated_exceedance():
    rng = np.random.default_rng(11)
    a = np.tile([1, 0], 50)
    b = (rng.random(100) < 0.5).astype(np.uint8)
    r = exact_pvalue(a, b)
    freq, se = simulated_exceedance(100, a.mean(), b.mean(), abs(r.centered), 10**6, seed=3)
    assert abs(r.p_value - freq) < 4 * se


def test_symmetric_in_argument_order():
    rng = np.random.default_rng(5)
    a = (rng.random(80) < 0.3).astype(np.uint8)
    b = (rng.random(80) < 0.6).astype(np.uint8)
    assert exact_pvalue(a, b).p_value == pytest.approx(exact_pvalue(b, a).p_value, abs=1e-14)
    assert centered_statistic(a, b) == centered_statistic(b, a)
