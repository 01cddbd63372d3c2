"""Exact p-values by enumerating every multinomial configuration.

The states ``(n1, n2, n3, n4)`` with ``n1 + n2 + n3 + n4 = m`` are weighted by
the multinomial pmf built from the observed occurrence frequencies. A state
falls in the critical region when the deviation of its coefficient from the
expectation under its *own* frequencies reaches the observed deviation; this
per-state re-estimation removes the conservative bias a fixed plug-in
expectation would introduce.
"""

from __future__ import annotations

import math
from typing import Any

import numpy as np
from scipy.special import gammaln

from . import _kernels
from .core import (
    ContingencyTable,
    MultinomialState,
    OccurrenceProbs,
    ResourceLimitError,
    TestResult,
    centered_from_table,
    contingency,
)

__all__ = [
    "DEFAULT_MAX_M",
    "DEFAULT_TOL",
    "log_factorials",
    "log_multinomial_pmf",
    "state_deviation",
    "in_critical_region",
    "exact_region_mass",
    "exact_pvalue",
]

DEFAULT_MAX_M = 2000
DEFAULT_TOL = 1e-12


def log_factorials(m: int) -> np.ndarray:
    """``log(k!)`` for ``k = 0..m``."""
    return gammaln(np.arange(m + 1, dtype=float) + 1.0)


def _cell_logs(cells: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    pos = cells > 0.0
    lcs = np.zeros(4)
    lcs[pos] = np.log(cells[pos])
    return lcs, pos


def log_multinomial_pmf(s: MultinomialState, probs: OccurrenceProbs) -> float:
    """Log probability of ``s`` under Multi(m, q1, p_i(1-p_j), (1-p_i)p_j, (1-p_i)(1-p_j)).

    Returns ``-inf`` when a positive count falls in a zero-probability cell.
    """
    cells = probs.cell_probs()
    m = s.m
    out = math.lgamma(m + 1)
    for n, c in zip(s, cells):
        if n == 0:
            continue
        if c <= 0.0:
            return -math.inf
        out += n * math.log(c) - math.lgamma(n + 1)
    return out


def state_deviation(s: MultinomialState) -> float:
    """Deviation ``|T - E|`` of a state using its own frequencies ``(n1+n2)/m``, ``(n1+n3)/m``."""
    return _kernels.deviation(s.n1, s.n2, s.n3, s.m)


def in_critical_region(s: MultinomialState, observed_abs_centered: float,
                       tol: float = DEFAULT_TOL) -> bool:
    """Whether ``s`` deviates at least as much as the observed pair.

    States with an empty union have deviation 0, as their coefficient is
    defined to equal its expectation.
    """
    if tol < 0:
        raise ValueError("tol must be non-negative")
    return state_deviation(s) >= observed_abs_centered - tol


def exact_region_mass(m: int, probs: OccurrenceProbs, threshold: float,
                      tol: float = DEFAULT_TOL) -> tuple[float, float]:
    """Probability of the critical region ``{deviation >= threshold - tol}``.

    Returns ``(region_mass, total_mass)``; the latter is 1 up to rounding and
    serves as a completeness check. Each n1 slice is reduced to a
    log-sum-exp, and slices are combined in increasing n1 order.
    """
    cells = probs.cell_probs()
    lcs, pos = _cell_logs(cells)
    lf = log_factorials(m)
    # shift by the log pmf at the mode so that no term overflows
    from .mca import find_mode

    mode = find_mode(m, cells)
    shift = log_multinomial_pmf(mode, probs)
    region, total = _kernels.exact_slices(m, lcs, pos, lf, shift, threshold - tol)
    return _combine(region, shift), _combine(total, shift)


def _combine(slice_sums: np.ndarray, shift: float) -> float:
    nz = slice_sums[slice_sums > 0.0]
    if nz.size == 0:
        return 0.0
    logs = np.log(nz) + shift
    top = logs.max()
    return float(math.exp(top + math.log(math.fsum(np.exp(logs - top)))))


def exact_pvalue(a: Any, b: Any, *, max_m: int = DEFAULT_MAX_M,
                 tol: float = DEFAULT_TOL) -> TestResult:
    """Exact two-sided p-value of the centered Jaccard/Tanimoto coefficient.

    Parameters
    ----------
    a, b : array_like
        Presence-absence vectors of equal length.
    max_m : int
        Largest vector length accepted; enumeration grows as ``m**3``.
    tol : float
        Absolute slack on the region boundary so the observed configuration
        is never lost to rounding.

    Raises
    ------
    DimensionError
        If the vectors differ in length.
    ResourceLimitError
        If ``m > max_m``.
    """
    t = contingency(a, b)
    return exact_from_table(t, max_m=max_m, tol=tol)


def exact_from_table(t: ContingencyTable, *, max_m: int = DEFAULT_MAX_M,
                     tol: float = DEFAULT_TOL) -> TestResult:
    m = t.m
    if m > max_m:
        raise ResourceLimitError(f"exact enumeration refused for m={m} > cap {max_m}")
    coef, expect, centered = centered_from_table(t)
    observed = abs(centered)
    if observed <= tol:
        # every state qualifies, so the region is the whole space
        return TestResult(coef, expect, centered, 1.0, "exact",
                          {"total_mass": 1.0, "whole_space": True})
    probs = OccurrenceProbs.from_table(t)
    region, total = exact_region_mass(m, probs, observed, tol)
    p = min(max(region, 0.0), 1.0)
    return TestResult(coef, expect, centered, p, "exact", {"total_mass": total})
