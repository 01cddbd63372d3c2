"""Synthetic presence-absence data for calibration and error-rate studies.

Dependent vectors are built by copying: each unit takes the query's value
with probability ``dependence_strength`` and a fresh Bernoulli(p) draw
otherwise. This alternative is a construction of this package, chosen only
to label some pairs as truly associated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bootstrap import make_rng

__all__ = ["SimSpec", "simulate_null_pair", "simulate_mixture", "n_alternatives"]


@dataclass(frozen=True)
class SimSpec:
    n: int = 2000
    m: int = 200
    p: float = 0.5
    pi0: float = 0.75
    dependence_strength: float = 0.5
    seed: int = 0

    def __post_init__(self) -> None:
        if self.n < 1 or self.m < 1:
            raise ValueError("n and m must be positive")
        if not 0.0 < self.p < 1.0:
            raise ValueError(f"p={self.p} must lie in (0, 1)")
        if not 0.0 <= self.pi0 <= 1.0:
            raise ValueError(f"pi0={self.pi0} must lie in [0, 1]")
        if not 0.0 < self.dependence_strength <= 1.0:
            raise ValueError(f"dependence_strength={self.dependence_strength} must lie in (0, 1]")


def n_alternatives(n: int, pi0: float) -> int:
    """``ceil((1 - pi0) n)``, immune to representation error such as ``1 - 0.7``."""
    return int(math.ceil(round((1.0 - pi0) * n, 9)))


def simulate_null_pair(m: int, p_i: float, p_j: float,
                       rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Two independent vectors of i.i.d. Bernoulli(p_i) and Bernoulli(p_j) entries."""
    for name, v in (("p_i", p_i), ("p_j", p_j)):
        if not 0.0 < v < 1.0:
            raise ValueError(f"{name}={v} must lie in (0, 1)")
    a = (rng.random(m) < p_i).astype(np.uint8)
    b = (rng.random(m) < p_j).astype(np.uint8)
    return a, b


def simulate_mixture(spec: SimSpec) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Query vector, panel of ``n`` vectors and the truth flags (True = dependent).

    The first ``ceil((1 - pi0) n)`` panel rows depend on the query. Each panel
    row uses its own substream, so row ``k`` is reproducible on its own.
    """
    query = (make_rng(spec.seed, 0).random(spec.m) < spec.p).astype(np.uint8)
    k = n_alternatives(spec.n, spec.pi0)
    panel = np.empty((spec.n, spec.m), dtype=np.uint8)
    for row in range(spec.n):
        rng = make_rng(spec.seed, 1, row)
        fresh = (rng.random(spec.m) < spec.p).astype(np.uint8)
        if row < k:
            copy = rng.random(spec.m) < spec.dependence_strength
            panel[row] = np.where(copy, query, fresh)
        else:
            panel[row] = fresh
    truth = np.zeros(spec.n, dtype=bool)
    truth[:k] = True
    return query, panel, truth
