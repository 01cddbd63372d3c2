"""Domain types and the centered Jaccard/Tanimoto coefficient.

Every engine shares the quantities defined here: the contingency counts of a
pair of presence-absence vectors, the coefficient with its all-absent
fallback, the expectation under independence and the centered statistic.

Expectations computed from observed counts go through the integer form
``k_i k_j / (m (k_i + k_j) - k_i k_j)`` so that a generalist vector (all ones)
gives a centered value of exactly zero instead of a rounding residue.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, NamedTuple, Sequence

import numpy as np

__all__ = [
    "DimensionError",
    "DegenerateError",
    "ResourceLimitError",
    "ContingencyTable",
    "MultinomialState",
    "OccurrenceProbs",
    "TestResult",
    "binary_vector",
    "contingency",
    "coefficient",
    "expectation",
    "expectation_from_counts",
    "centered_statistic",
    "ENGINES",
]

ENGINES = ("exact", "asymptotic", "bootstrap", "mca")


class DimensionError(ValueError):
    """Raised when two vectors that must be paired have different lengths."""


class DegenerateError(ValueError):
    """Raised when a quantity is undefined for the given probabilities."""


class ResourceLimitError(RuntimeError):
    """Raised when a computation would exceed a configured size or time cap."""


def binary_vector(values: Any) -> np.ndarray:
    """Validate ``values`` as a presence-absence vector.

    Returns a 1-D ``uint8`` array. Anything other than exact 0/1 entries is
    rejected, as is an empty vector.
    """
    arr = np.asarray(values)
    if arr.ndim != 1:
        raise ValueError(f"expected a 1-D vector, got shape {arr.shape}")
    if arr.size == 0:
        raise ValueError("presence-absence vector must have length >= 1")
    if arr.dtype == np.bool_:
        return arr.astype(np.uint8)
    if not np.issubdtype(arr.dtype, np.number):
        raise ValueError(f"non-numeric presence-absence vector (dtype {arr.dtype})")
    bad = np.flatnonzero((arr != 0) & (arr != 1))
    if bad.size:
        i = int(bad[0])
        raise ValueError(f"non-binary value {arr[i]!r} at position {i}")
    return arr.astype(np.uint8)


class ContingencyTable(NamedTuple):
    """Counts of units where both (n1), only i (n2), only j (n3) or neither (n4) occur."""

    n1: int
    n2: int
    n3: int
    n4: int

    @property
    def m(self) -> int:
        return self.n1 + self.n2 + self.n3 + self.n4

    @property
    def union(self) -> int:
        return self.n1 + self.n2 + self.n3


# A point of the multinomial state space has the same shape as a table.
MultinomialState = ContingencyTable


def contingency(a: Any, b: Any) -> ContingencyTable:
    a = binary_vector(a)
    b = binary_vector(b)
    if a.size != b.size:
        raise DimensionError(f"vector lengths differ: {a.size} != {b.size}")
    ai = a.astype(bool)
    bj = b.astype(bool)
    n1 = int(np.count_nonzero(ai & bj))
    n2 = int(np.count_nonzero(ai & ~bj))
    n3 = int(np.count_nonzero(~ai & bj))
    return ContingencyTable(n1, n2, n3, a.size - n1 - n2 - n3)


@dataclass(frozen=True)
class OccurrenceProbs:
    """Occurrence probabilities of the two species.

    ``q1`` is the probability that both occur in a unit and ``q2`` the
    probability that exactly one does.
    """

    p_i: float
    p_j: float

    def __post_init__(self) -> None:
        for name in ("p_i", "p_j"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name}={v} outside [0, 1]")

    @classmethod
    def from_table(cls, t: ContingencyTable) -> "OccurrenceProbs":
        return cls((t.n1 + t.n2) / t.m, (t.n1 + t.n3) / t.m)

    @property
    def q1(self) -> float:
        return self.p_i * self.p_j

    @property
    def q2(self) -> float:
        return self.p_i + self.p_j - 2.0 * self.p_i * self.p_j

    def cell_probs(self) -> np.ndarray:
        """Probabilities of the four contingency cells (both, i-only, j-only, neither)."""
        pi, pj = self.p_i, self.p_j
        return np.array([pi * pj, pi * (1.0 - pj), (1.0 - pi) * pj, (1.0 - pi) * (1.0 - pj)])


def expectation(probs: OccurrenceProbs) -> float:
    """Expected coefficient of two independent Bernoulli vectors.

    Zero when both probabilities are zero (continuous extension).
    """
    q1, q2 = probs.q1, probs.q2
    if q1 + q2 <= 0.0:
        return 0.0
    return q1 / (q1 + q2)


def expectation_from_counts(k_i: int, k_j: int, m: int) -> float:
    """Expectation with plug-in probabilities ``k_i/m`` and ``k_j/m``.

    Evaluated as one division of integers, hence correctly rounded.
    """
    den = m * (k_i + k_j) - k_i * k_j
    if den == 0:
        return 0.0
    return (k_i * k_j) / den


def coefficient(t: ContingencyTable, probs: OccurrenceProbs) -> float:
    """Jaccard/Tanimoto coefficient with the expectation as the empty-union value."""
    u = t.union
    if u > 0:
        return t.n1 / u
    return expectation(probs)


@dataclass(frozen=True)
class TestResult:
    """Outcome of one similarity test.

    ``diagnostics`` holds engine-specific scalars such as the z-score, the
    number of bootstrap iterations or the MCA upper bound.
    """

    __test__ = False  # keep pytest from collecting this class

    coefficient: float
    expectation: float
    centered: float
    p_value: float
    engine: str
    diagnostics: dict = field(default_factory=dict, compare=False)


def _plugin_statistic(t: ContingencyTable) -> tuple[float, float, float]:
    k_i, k_j = t.n1 + t.n2, t.n1 + t.n3
    e = expectation_from_counts(k_i, k_j, t.m)
    coef = t.n1 / t.union if t.union > 0 else e
    return coef, e, coef - e


def centered_statistic(a: Any, b: Any) -> tuple[float, float, float]:
    """Return ``(coefficient, expectation, centered)`` using plug-in probabilities."""
    return _plugin_statistic(contingency(a, b))


def centered_from_table(t: ContingencyTable) -> tuple[float, float, float]:
    """Same as :func:`centered_statistic` for an already tabulated pair."""
    return _plugin_statistic(t)


def as_table(values: Sequence[int]) -> ContingencyTable:
    n = tuple(int(v) for v in values)
    if len(n) != 4 or min(n) < 0:
        raise ValueError(f"a state needs four non-negative counts, got {values!r}")
    return ContingencyTable(*n)
