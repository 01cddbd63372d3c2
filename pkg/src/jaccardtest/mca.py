"""Measure concentration p-value bounds.

A multinomial distribution concentrates around its mode. The set ``I_eps``
collects the most probable states until they carry at least ``1 - eps`` of
the mass; summing the critical-region mass over ``I_eps`` gives a lower bound
``p_lower`` and ``p_lower + eps`` bounds the exact p-value from above.

Two constructions of ``I_eps`` are provided:

``"levelset"`` (default)
    Finds the smallest superlevel set of the pmf holding ``1 - eps`` mass by
    scanning concave profiles, binning masses by log probability and sorting
    only the boundary bin.
``"frontier"``
    The literal expansion: start at the mode, repeatedly visit the most
    probable unvisited neighbour of the visited set.

Both return the same states in the same order. The pmf is discretely
log-concave, so every non-modal state has a more probable neighbour and the
frontier pops states in globally decreasing probability.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Any, Sequence

import numpy as np
from scipy.stats import chi2

from . import _kernels
from .core import (
    ContingencyTable,
    MultinomialState,
    OccurrenceProbs,
    TestResult,
    centered_from_table,
    contingency,
)
from .exact import DEFAULT_TOL, _cell_logs, log_factorials

__all__ = [
    "McaConfig",
    "McaSet",
    "find_mode",
    "neighbors",
    "concentration_set",
    "mca_pvalue",
]

_NBINS = 4096


@dataclass(frozen=True)
class McaConfig:
    epsilon: float = 1e-5
    report_upper: bool = False
    method: str = "levelset"

    def __post_init__(self) -> None:
        if not 0.0 < self.epsilon < 1.0:
            raise ValueError(f"epsilon={self.epsilon} must lie in (0, 1)")
        if self.method not in ("levelset", "frontier"):
            raise ValueError(f"unknown MCA method {self.method!r}")


def _logpmf(state: Sequence[int], m: int, lcells: Sequence[float]) -> float:
    out = math.lgamma(m + 1)
    for n, lc in zip(state, lcells):
        if n:
            if lc == -math.inf:
                return -math.inf
            out += n * lc - math.lgamma(n + 1)
    return out


def _round_to_total(m: int, cells: np.ndarray) -> list[int]:
    raw = m * cells
    base = np.floor(raw).astype(int)
    short = m - int(base.sum())
    frac = raw - base
    # hand the remainder to the largest fractional parts among positive cells
    order = sorted((i for i in range(4) if cells[i] > 0), key=lambda i: (-frac[i], i))
    for i in order[:short]:
        base[i] += 1
    return [int(v) for v in base]


def neighbors(s: MultinomialState) -> set[MultinomialState]:
    """States reachable by moving a single unit from one cell to another."""
    out = set()
    counts = list(s)
    for f in range(4):
        if counts[f] == 0:
            continue
        for g in range(4):
            if g == f:
                continue
            nxt = counts.copy()
            nxt[f] -= 1
            nxt[g] += 1
            out.add(ContingencyTable(*nxt))
    return out


def find_mode(m: int, cell_probs: Sequence[float]) -> MultinomialState:
    """Mode of Multi(m, cell_probs) by steepest-ascent hill climbing.

    Starts from ``m * cell_probs`` rounded to integers summing to ``m``; ties
    between equally good neighbours go to the lexicographically smallest
    ``(n1, n2, n3)``.
    """
    cells = np.asarray(cell_probs, dtype=float)
    if cells.shape != (4,) or np.any(cells < 0) or not math.isclose(cells.sum(), 1.0, abs_tol=1e-9):
        raise ValueError(f"cell probabilities must be four non-negative values summing to 1, got {cell_probs!r}")
    with np.errstate(divide="ignore"):
        lcells = [float(v) for v in np.log(cells)]
    cur = ContingencyTable(*_round_to_total(m, cells))
    cur_lp = _logpmf(cur, m, lcells)
    while True:
        best, best_lp = cur, cur_lp
        for nb in sorted(neighbors(cur)):
            lp = _logpmf(nb, m, lcells)
            if lp > best_lp:
                best, best_lp = nb, lp
        if best is cur:
            return cur
        cur, cur_lp = best, best_lp


@dataclass(frozen=True)
class McaSet:
    """Summary of a constructed ``I_eps``.

    ``states`` is populated only by the frontier construction and lists the
    visited states in visiting order.
    """

    p_lower: float
    mass: float
    size: int
    states: tuple = ()


def _frontier(m: int, cells: np.ndarray, cutoff: float, eps: float) -> McaSet:
    with np.errstate(divide="ignore"):
        lcells = [float(v) for v in np.log(cells)]
    pos = [c > 0 for c in cells]
    mode = find_mode(m, cells)
    start = _logpmf(mode, m, lcells)
    heap = [(-start, tuple(mode[:3]))]
    seen = {tuple(mode[:3])}
    mass = comp = 0.0
    region = rcomp = 0.0
    visited = []
    target = 1.0 - eps
    while heap and mass < target:
        neg_lp, key = heapq.heappop(heap)
        s = ContingencyTable(*key, m - sum(key))
        visited.append(s)
        p = math.exp(-neg_lp)
        y = p - comp
        t = mass + y
        comp = (t - mass) - y
        mass = t
        if _kernels.deviation(s.n1, s.n2, s.n3, m) >= cutoff:
            y = p - rcomp
            t = region + y
            rcomp = (t - region) - y
            region = t
        for nb in neighbors(s):
            # zero-probability cells are never filled
            if any(n and not ok for n, ok in zip(nb, pos)):
                continue
            k = tuple(nb[:3])
            if k in seen:
                continue
            seen.add(k)
            heapq.heappush(heap, (-_logpmf(nb, m, lcells), k))
    return McaSet(region, mass, len(visited), tuple(visited))


def _levelset(m: int, cells: np.ndarray, cutoff: float, eps: float) -> McaSet:
    lcs, pos = _cell_logs(cells)
    dims = int(pos.sum()) - 1
    mode = find_mode(m, cells)
    with np.errstate(divide="ignore"):
        lcells = [float(v) for v in np.log(cells)]
    lpmax = _logpmf(mode, m, lcells)
    lf = log_factorials(m)
    target = 1.0 - eps
    if dims == 0:
        inside = _kernels.deviation(mode.n1, mode.n2, mode.n3, m) >= cutoff
        return McaSet(1.0 if inside else 0.0, 1.0, 1)
    # initial depth from the Gaussian approximation, widened until enough mass is covered
    depth = 0.5 * chi2.isf(eps, dims) + 2.0
    while True:
        tau = lpmax - depth
        h_mass, h_region, h_count, *_ = _kernels.level_set_scan(
            m, lcs, pos, lf, mode.n1, mode.n2, tau, lpmax, _NBINS, cutoff, -1, 0)
        if math.fsum(h_mass) >= target or tau < -745.0:
            break
        depth = 1.5 * depth + 2.0
    cum = 0.0
    cut = _NBINS - 1
    for b in range(_NBINS):
        if cum + h_mass[b] >= target:
            cut = b
            break
        cum += h_mass[b]
    # everything in bins above the cut is included, then the cut bin in pmf order
    mass_above = math.fsum(h_mass[:cut])
    region_above = math.fsum(h_region[:cut])
    size_above = int(h_count[:cut].sum())
    cap = int(h_count[cut])
    *_, out_lp, out_code, out_reg, n_out = _kernels.level_set_scan(
        m, lcs, pos, lf, mode.n1, mode.n2, tau, lpmax, _NBINS, cutoff, cut, cap)
    order = np.lexsort((out_code[:n_out], -out_lp[:n_out]))
    probs = np.exp(out_lp[:n_out][order])
    inside = out_reg[:n_out][order]
    need = target - mass_above
    running = np.cumsum(probs)
    k = int(np.searchsorted(running, need, side="left")) + 1
    k = min(k, n_out)
    mass = math.fsum([mass_above, *probs[:k]])
    p_lower = math.fsum([region_above, *probs[:k][inside[:k]]])
    return McaSet(p_lower, mass, size_above + k)


def concentration_set(m: int, probs: OccurrenceProbs, threshold: float, epsilon: float = 1e-5,
                      method: str = "levelset", tol: float = DEFAULT_TOL) -> McaSet:
    """Build ``I_eps`` for Multi(m, cells(probs)) and its critical-region mass."""
    cells = probs.cell_probs()
    cutoff = threshold - tol
    if method == "frontier":
        return _frontier(m, cells, cutoff, epsilon)
    return _levelset(m, cells, cutoff, epsilon)


def mca_pvalue(a: Any, b: Any, cfg: McaConfig | None = None, *, tol: float = DEFAULT_TOL) -> TestResult:
    """Lower-bound p-value within ``epsilon`` of the exact p-value.

    ``diagnostics`` carries ``p_upper = p_lower + epsilon``, the mass of
    ``I_eps`` and its size. With ``cfg.report_upper`` the upper bound is
    reported as the p-value instead.
    """
    return mca_from_table(contingency(a, b), cfg, tol=tol)


def mca_from_table(t: ContingencyTable, cfg: McaConfig | None = None, *,
                   tol: float = DEFAULT_TOL) -> TestResult:
    cfg = cfg or McaConfig()
    coef, expect, centered = centered_from_table(t)
    observed = abs(centered)
    if observed <= tol:
        return TestResult(coef, expect, centered, 1.0, "mca",
                          {"p_lower": 1.0, "p_upper": 1.0, "mass": 1.0, "size": 0,
                           "epsilon": cfg.epsilon, "whole_space": True})
    res = concentration_set(t.m, OccurrenceProbs.from_table(t), observed, cfg.epsilon,
                            cfg.method, tol)
    p_lower = min(max(res.p_lower, 0.0), 1.0)
    p_upper = min(p_lower + cfg.epsilon, 1.0)
    p = p_upper if cfg.report_upper else p_lower
    return TestResult(coef, expect, centered, p, "mca",
                      {"p_lower": p_lower, "p_upper": p_upper, "mass": res.mass,
                       "size": res.size, "epsilon": cfg.epsilon})
