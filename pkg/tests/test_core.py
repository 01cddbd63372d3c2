import numpy as np
import pytest
from hypothesis import given, strategies as st

from jaccardtest import (
    ContingencyTable,
    DimensionError,
    OccurrenceProbs,
    TestResult,
    centered_statistic,
    coefficient,
    contingency,
    expectation,
)
from jaccardtest.core import binary_vector, expectation_from_counts

from oracles import binary_pairs, mean_coefficient


@pytest.mark.parametrize("a, b, expected", [
    ([1, 1, 0, 0], [1, 0, 1, 0], (1, 1, 1, 1)),
    ([0, 0, 0], [0, 0, 0], (0, 0, 0, 3)),
    ([1, 1, 1], [1, 1, 1], (3, 0, 0, 0)),
])
def test_contingency_counts(a, b, expected):
    t = contingency(a, b)
    assert tuple(t) == expected
    assert t.m == len(a)


def test_contingency_length_mismatch():
    with pytest.raises(DimensionError):
        contingency([1, 0], [1, 0, 1])


@pytest.mark.parametrize("bad", [[0, 2, 1], [0.5, 1], [-1, 0], ["a", "b"]])
def test_non_binary_rejected(bad):
    with pytest.raises(ValueError):
        binary_vector(bad)


def test_empty_vector_rejected():
    with pytest.raises(ValueError):
        binary_vector([])


def test_bool_and_numpy_inputs_accepted():
    assert tuple(contingency(np.array([True, False]), [1, 0])) == (1, 0, 0, 1)


@pytest.mark.parametrize("table, probs, expected", [
    ((1, 1, 1, 1), (0.5, 0.5), 1 / 3),
    ((3, 0, 0, 0), (1.0, 1.0), 1.0),
    ((0, 0, 0, 2), (0.5, 0.5), 1 / 3),
])
def test_coefficient(table, probs, expected):
    assert coefficient(ContingencyTable(*table), OccurrenceProbs(*probs)) == pytest.approx(expected, abs=1e-15)


@pytest.mark.parametrize("pi, pj, expected", [(0.5, 0.5, 1 / 3), (0.0, 0.7, 0.0), (1.0, 1.0, 1.0), (0.0, 0.0, 0.0)])
def test_expectation(pi, pj, expected):
    assert expectation(OccurrenceProbs(pi, pj)) == pytest.approx(expected, abs=1e-15)


def test_occurrence_probs_validation():
    with pytest.raises(ValueError):
        OccurrenceProbs(1.2, 0.5)
    p = OccurrenceProbs(0.3, 0.6)
    assert p.q1 == pytest.approx(0.18)
    assert p.q2 == pytest.approx(0.3 + 0.6 - 2 * 0.18)
    assert p.cell_probs().sum() == pytest.approx(1.0)


def test_plugin_probs_from_table():
    p = OccurrenceProbs.from_table(ContingencyTable(2, 1, 3, 4))
    assert (p.p_i, p.p_j) == (0.3, 0.5)


@pytest.mark.parametrize("a, b, expected", [
    ([1, 1, 0, 0], [1, 1, 0, 0], (1.0, 1 / 3, 2 / 3)),
    ([1, 0], [1, 0], (1.0, 1 / 3, 2 / 3)),
])
def test_centered_statistic_examples(a, b, expected):
    assert centered_statistic(a, b) == pytest.approx(expected, abs=1e-15)


@pytest.mark.parametrize("b", [[0, 0, 0], [1, 0, 0], [1, 1, 0], [1, 1, 1]])
def test_all_ones_partner_has_zero_centered(b):
    assert centered_statistic([1, 1, 1], b)[2] == 0.0


def test_both_absent_convention():
    assert centered_statistic([0, 0, 0, 0], [0, 0, 0, 0]) == (0.0, 0.0, 0.0)


def test_expectation_from_counts_matches_real_form():
    for ki, kj, m in [(3, 4, 10), (1, 1, 2), (7, 2, 9)]:
        pi, pj = ki / m, kj / m
        assert expectation_from_counts(ki, kj, m) == pytest.approx(pi * pj / (pi + pj - pi * pj), rel=1e-14)


def test_result_is_not_collected_and_is_immutable():
    r = TestResult(0.5, 0.25, 0.25, 0.1, "exact")
    with pytest.raises(AttributeError):
        r.p_value = 0.2


@given(binary_pairs())
def test_symmetry(pair):
    a, b = pair
    assert centered_statistic(a, b) == centered_statistic(b, a)


@given(binary_pairs())
def test_ranges_and_identity(pair):
    coef, expect, centered = centered_statistic(*pair)
    assert 0.0 <= coef <= 1.0
    assert 0.0 <= expect <= 1.0
    assert -1.0 <= centered <= 1.0
    assert centered == coef - expect


@given(st.integers(1, 60).flatmap(lambda m: st.tuples(
    st.lists(st.integers(0, 1), min_size=m, max_size=m), st.sampled_from(["ones", "zeros"]))))
def test_generalist_nullity(args):
    b, kind = args
    a = [1 if kind == "ones" else 0] * len(b)
    assert centered_statistic(a, b)[2] == 0.0
    assert centered_statistic(b, a)[2] == 0.0


@given(binary_pairs())
def test_counts_partition_m(pair):
    a, b = pair
    t = contingency(a, b)
    assert sum(t) == len(a)
    assert t.n1 == sum(x & y for x, y in zip(a, b))
    assert t.union == sum(x | y for x, y in zip(a, b))


def test_unbiasedness_smoke():
    probs = OccurrenceProbs(0.3, 0.6)
    mean, se = mean_coefficient(lambda t: coefficient(ContingencyTable(*t), probs), 0.3, 0.6, 20, 20_000, 1)
    assert abs(mean - expectation(probs)) < 4 * se
