import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from jaccardtest import (
    BootstrapConfig,
    DimensionError,
    bootstrap_pvalue,
    pooled_bootstrap_pvalues,
    resample,
)
from jaccardtest.bootstrap import make_rng, null_statistics

from oracles import binary_pairs, enumerate_pmf, fraction_deviation


@pytest.mark.parametrize("v", [[1, 1, 1], [0, 0]])
def test_resample_constant(v):
    rng = make_rng(1)
    for _ in range(20):
        assert list(resample(v, rng)) == v


def test_resample_frequencies():
    rng = make_rng(9)
    draws = np.array([resample([1, 0], rng) for _ in range(100_000)])
    codes = draws[:, 0] * 2 + draws[:, 1]
    freq = np.bincount(codes, minlength=4) / codes.size
    assert np.all(np.abs(freq - 0.25) < 0.01)


def test_resample_length_and_support():
    out = resample([1, 0, 0, 0, 0], make_rng(2))
    assert out.shape == (5,)
    assert set(out.tolist()) <= {0, 1}


def _resample_pair_oracle(a, b) -> Fraction:
    """Exceedance probability over all equally likely resample pairs."""
    m = len(a)
    observed = fraction_deviation(
        sum(x and y for x, y in zip(a, b)), sum(x and not y for x, y in zip(a, b)),
        sum(y and not x for x, y in zip(a, b)), m)
    hits = total = 0
    for ia in itertools.product(range(m), repeat=m):
        ra = [a[k] for k in ia]
        for ib in itertools.product(range(m), repeat=m):
            rb = [b[k] for k in ib]
            n1 = sum(x and y for x, y in zip(ra, rb))
            n2 = sum(x and not y for x, y in zip(ra, rb))
            n3 = sum(y and not x for x, y in zip(ra, rb))
            total += 1
            hits += fraction_deviation(n1, n2, n3, m) >= observed
    return Fraction(hits, total)


def test_two_unit_example():
    assert _resample_pair_oracle([1, 0], [1, 0]) == Fraction(2, 16)
    r = bootstrap_pvalue([1, 0], [1, 0], BootstrapConfig(B=10_000, seed=123))
    assert r.p_value == pytest.approx(0.125, abs=0.01)
    assert r.diagnostics["B"] == 10_000


def test_small_pair_against_resample_enumeration():
    a, b = [1, 1, 0, 1], [1, 0, 0, 1]
    ref = float(_resample_pair_oracle(a, b))
    B = 200_000
    p = bootstrap_pvalue(a, b, BootstrapConfig(B=B, seed=5)).p_value
    assert abs(p - ref) < 4 * np.sqrt(ref * (1 - ref) / B)


def test_zero_centered_gives_one():
    assert bootstrap_pvalue([1, 1, 1], [1, 0, 1]).p_value == 1.0


def test_length_mismatch():
    with pytest.raises(DimensionError):
        bootstrap_pvalue([1, 0], [1, 0, 0])


def test_default_iterations_scale_with_length():
    r = bootstrap_pvalue([1, 0, 1, 1, 0, 0, 1, 0, 1, 0], [1, 1, 0, 1, 0, 0, 1, 0, 0, 0])
    assert r.diagnostics["B"] == 50


def test_config_validation():
    with pytest.raises(ValueError):
        BootstrapConfig(B=0)
    with pytest.raises(ValueError):
        BootstrapConfig(seed=-1)
    with pytest.raises(ValueError):
        BootstrapConfig(seed=2**64)


@given(binary_pairs(1, 50), st.integers(0, 2**64 - 1))
def test_deterministic_given_seed(pair, seed):
    cfg = BootstrapConfig(B=200, seed=seed)
    assert bootstrap_pvalue(*pair, cfg) == bootstrap_pvalue(*pair, cfg)


def test_streams_differ():
    rng = np.random.default_rng(0)
    a = (rng.random(60) < 0.5).astype(np.uint8)
    b = (rng.random(60) < 0.5).astype(np.uint8)
    cfg = BootstrapConfig(B=500, seed=1)
    p = {bootstrap_pvalue(a, b, cfg, stream=(k,)).p_value for k in range(8)}
    assert len(p) > 1


@given(binary_pairs(1, 60))
def test_smoothed_pvalue(pair):
    a, b = pair
    raw = bootstrap_pvalue(a, b, BootstrapConfig(B=100, seed=3))
    sm = bootstrap_pvalue(a, b, BootstrapConfig(B=100, seed=3, add_one_smoothing=True))
    assert sm.p_value == pytest.approx((raw.diagnostics["exceed"] + 1) / 101)
    assert sm.p_value > 0.0
    assert 0.0 <= raw.p_value <= 1.0


def test_observed_configuration_always_counts():
    # every resample that reproduces the observed table must count, so with
    # a two-unit pair at least the reproductions are hits
    for seed in range(20):
        r = bootstrap_pvalue([1, 0], [1, 0], BootstrapConfig(B=64, seed=seed))
        assert r.diagnostics["exceed"] > 0


def _plugin_centered_mean(a, b) -> float:
    """Exact mean of the resampled centered statistic, by enumerating multinomial tables."""
    m = len(a)
    pi, pj = sum(a) / m, sum(b) / m
    cells = (pi * pj, pi * (1 - pj), (1 - pi) * pj, (1 - pi) * (1 - pj))
    total = 0.0
    for (n1, n2, n3, _), w in enumerate_pmf(m, cells).items():
        u = n1 + n2 + n3
        if u:
            fi, fj = Fraction(n1 + n2, m), Fraction(n1 + n3, m)
            total += w * float(Fraction(n1, u) - fi * fj / (fi + fj - fi * fj))
    return total


def test_null_mean_matches_plugin_expectation():
    a = [1, 1, 0, 1, 1, 0, 1, 0, 1, 1]
    b = [0, 1, 0, 0, 1, 1, 0, 0, 1, 0]
    null = null_statistics(a, b, 100_000, make_rng(8))
    se = null.std(ddof=1) / np.sqrt(null.size)
    assert abs(null.mean() - _plugin_centered_mean(a, b)) < 4 * se


def test_null_mean_is_zero():
    a = [1, 1, 0, 1, 1, 0, 1, 0, 1, 1]
    b = [0, 1, 0, 0, 1, 1, 0, 0, 1, 0]
    null = null_statistics(a, b, 100_000, make_rng(8))
    se = null.std(ddof=1) / np.sqrt(null.size)
    assert abs(null.mean()) < 4 * se, f"mean {null.mean():.5f} is {abs(null.mean()) / se:.1f} SE from 0"


def test_pooled_mode():
    rng = make_rng(4)
    pairs = [((rng.random(40) < 0.5).astype(np.uint8), (rng.random(40) < 0.5).astype(np.uint8)) for _ in range(5)]
    res = pooled_bootstrap_pvalues(pairs, BootstrapConfig(B=100, seed=2))
    assert len(res) == 5
    for (a, b), r in zip(pairs, res):
        assert r.diagnostics["B"] == 500
        assert r.diagnostics["pooled"] is True
        assert 0.0 <= r.p_value <= 1.0
    single = pooled_bootstrap_pvalues(pairs[:1], BootstrapConfig(B=100, seed=2))[0]
    direct = bootstrap_pvalue(*pairs[0], BootstrapConfig(B=100, seed=2), stream=(0,))
    assert single.p_value == direct.p_value
