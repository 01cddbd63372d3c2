"""Proportion of true nulls and q-values for a batch of p-values."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.interpolate import make_smoothing_spline

__all__ = ["FdrResult", "estimate_pi0", "smoothed_pi0", "q_values", "qvalue"]

MIN_PVALUES = 10


@dataclass(frozen=True)
class FdrResult:
    pi0: float
    q_values: np.ndarray
    lambda_: float | tuple[float, ...] | None = None


def _check(pvalues: Sequence[float]) -> np.ndarray:
    p = np.asarray(pvalues, dtype=float).ravel()
    if p.size == 0:
        raise ValueError("no p-values supplied")
    if np.any(~np.isfinite(p)) or np.any((p < 0) | (p > 1)):
        raise ValueError("p-values must lie in [0, 1]")
    return p


def estimate_pi0(pvalues: Sequence[float], lambda_: float = 0.5) -> float:
    """``min(1, #{p > lambda} / ((1 - lambda) n))``.

    Needs at least ten p-values; fewer give an estimate too noisy to use.
    """
    p = _check(pvalues)
    if p.size < MIN_PVALUES:
        raise ValueError(f"pi0 estimation needs at least {MIN_PVALUES} p-values, got {p.size}")
    if not 0.0 <= lambda_ < 1.0:
        raise ValueError(f"lambda={lambda_} outside [0, 1)")
    return float(min(1.0, np.count_nonzero(p > lambda_) / ((1.0 - lambda_) * p.size)))


def smoothed_pi0(pvalues: Sequence[float],
                 lambdas: Sequence[float] = tuple(np.round(np.arange(0.05, 0.96, 0.05), 2))) -> float:
    """Cubic smoothing spline through pi0(lambda), read off at the largest lambda."""
    p = _check(pvalues)
    if p.size < MIN_PVALUES:
        raise ValueError(f"pi0 estimation needs at least {MIN_PVALUES} p-values, got {p.size}")
    lam = np.asarray(lambdas, dtype=float)
    raw = np.array([np.count_nonzero(p > l) / ((1.0 - l) * p.size) for l in lam])
    spline = make_smoothing_spline(lam, raw)
    est = float(spline(lam[-1]))
    # guard against the spline leaving the admissible range
    return float(min(1.0, max(est, np.min(raw[raw > 0]) if np.any(raw > 0) else 1.0 / p.size)))


def q_values(pvalues: Sequence[float], pi0: float = 1.0) -> FdrResult:
    """Step-up q-values ``min_{j >= i} pi0 n p_(j) / j``, returned in input order."""
    p = _check(pvalues)
    if not 0.0 < pi0 <= 1.0:
        raise ValueError(f"pi0={pi0} outside (0, 1]")
    n = p.size
    order = np.argsort(p, kind="stable")
    ranked = pi0 * n * p[order] / np.arange(1, n + 1)
    ranked = np.minimum.accumulate(ranked[::-1])[::-1]
    q = np.empty(n)
    q[order] = np.clip(ranked, 0.0, 1.0)
    return FdrResult(pi0, q)


def qvalue(pvalues: Sequence[float], lambda_: float | None = 0.5, smoother: bool = False) -> FdrResult:
    """pi0 estimate followed by q-values.

    Batches smaller than ten p-values use ``pi0 = 1``.
    """
    p = _check(pvalues)
    if p.size < MIN_PVALUES:
        pi0, lam = 1.0, None
    elif smoother:
        pi0, lam = smoothed_pi0(p), tuple(np.round(np.arange(0.05, 0.96, 0.05), 2))
    else:
        lam = 0.5 if lambda_ is None else lambda_
        pi0 = estimate_pi0(p, lam)
    # a batch with no p-value above lambda would give pi0 = 0
    pi0 = max(pi0, 1.0 / p.size)
    res = q_values(p, pi0)
    return FdrResult(res.pi0, res.q_values, lam)
