"""Gaussian approximation to the null distribution of the centered coefficient.

Under independence ``sqrt(m) * T^c`` tends to ``N(0, sigma^2)`` with
``sigma^2 = q1 q2 (1 - q2) / (q1 + q2)^3``. The two-sided p-value is
``2 * (1 - Phi(|z|))``, evaluated as ``erfc(|z| / sqrt(2))`` so that deep
tails do not cancel to zero.
"""

from __future__ import annotations

import math
from typing import Any

from scipy.special import erfc

from .core import (
    ContingencyTable,
    DegenerateError,
    OccurrenceProbs,
    TestResult,
    centered_from_table,
    contingency,
)

__all__ = ["normal_cdf", "asymptotic_variance", "asymptotic_pvalue"]


def normal_cdf(x: float) -> float:
    """Standard Gaussian CDF."""
    return 0.5 * float(erfc(-x / math.sqrt(2.0)))


def asymptotic_variance(probs: OccurrenceProbs) -> float:
    q1, q2 = probs.q1, probs.q2
    s = q1 + q2
    if s <= 0.0:
        raise DegenerateError("variance undefined when both occurrence probabilities are zero")
    return max(q1 * q2 * (1.0 - q2) / s**3, 0.0)


def asymptotic_pvalue(a: Any, b: Any) -> TestResult:
    """Two-sided p-value from the Gaussian limit, with plug-in probabilities.

    When the estimated variance is zero the statistic is constant: the
    p-value is 1 if the coefficient equals its expectation and 0 otherwise.
    """
    return asymptotic_from_table(contingency(a, b))


def asymptotic_from_table(t: ContingencyTable) -> TestResult:
    coef, expect, centered = centered_from_table(t)
    probs = OccurrenceProbs.from_table(t)
    try:
        var = asymptotic_variance(probs)
    except DegenerateError:
        var = 0.0
    sigma = math.sqrt(var)
    if sigma == 0.0:
        p = 1.0 if centered == 0.0 else 0.0
        z = 0.0 if centered == 0.0 else math.copysign(math.inf, centered)
    else:
        z = math.sqrt(t.m) * centered / sigma
        p = float(erfc(abs(z) / math.sqrt(2.0)))
    return TestResult(coef, expect, centered, min(p, 1.0), "asymptotic",
                      {"z": z, "sigma": sigma})
