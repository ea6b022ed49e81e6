"""Learners over count-summarized datasets.

A dataset on {x0, x1} x {0, 1} is fully described by its 2x2 count matrix;
all four learners consume only these counts.  ERM breaks ties toward the
lowest class index.  For the confidence-ball learner, ties between several
*surviving* hypotheses resolve to the last class member instead; see
``intersection_of_bernstein_balls``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import DomainError, EmptyIntersectionError
from .scenarios import ConceptClass

__all__ = [
    "DatasetCounts",
    "BallReport",
    "empirical_error",
    "empirical_excess",
    "empirical_distance",
    "erm",
    "pool_erm",
    "oracle_subset_erm",
    "epsilon_complexity",
    "intersection_of_bernstein_balls",
    "ibb_with_fallback",
]


@dataclass(frozen=True)
class DatasetCounts:
    """2x2 count matrix indexed by (x in {x0, x1}, y in {0, 1})."""

    counts: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.counts, dtype=np.int64)
        object.__setattr__(self, "counts", c)
        if c.shape != (2, 2):
            raise DomainError(f"counts must be a 2x2 matrix, got shape {c.shape}")
        if np.any(c < 0):
            raise DomainError("counts must be non-negative")

    @property
    def n(self) -> int:
        return int(self.counts.sum())

    @classmethod
    def from_cells(cls, x0y0: int = 0, x0y1: int = 0, x1y0: int = 0, x1y1: int = 0):
        return cls(np.array([[x0y0, x0y1], [x1y0, x1y1]], dtype=np.int64))

    def __add__(self, other: "DatasetCounts") -> "DatasetCounts":
        return DatasetCounts(self.counts + other.counts)


def _mistakes(ds: DatasetCounts, h) -> int:
    c = ds.counts
    return int(c[0, 1 - h[0]] + c[1, 1 - h[1]])


def empirical_error(ds: DatasetCounts, h) -> float:
    """Fraction of samples the hypothesis mislabels."""
    if ds.n == 0:
        raise DomainError("empirical error undefined on an empty dataset")
    return _mistakes(ds, h) / ds.n


def empirical_excess(ds: DatasetCounts, h, h_prime) -> float:
    """empirical_error(h) - empirical_error(h'); lies in [-1, 1]."""
    if ds.n == 0:
        raise DomainError("empirical excess undefined on an empty dataset")
    return (_mistakes(ds, h) - _mistakes(ds, h_prime)) / ds.n


def empirical_distance(ds: DatasetCounts, h, h_prime) -> float:
    """Empirical mass of the disagreement region of two hypotheses."""
    if ds.n == 0:
        raise DomainError("empirical distance undefined on an empty dataset")
    c = ds.counts
    total = 0
    for x in (0, 1):
        if h[x] != h_prime[x]:
            total += c[x, 0] + c[x, 1]
    return total / ds.n


def erm(ds: DatasetCounts, cls: ConceptClass) -> int:
    """Lowest class index minimizing empirical error."""
    if ds.n == 0:
        raise DomainError("ERM undefined on an empty dataset")
    mistakes = [_mistakes(ds, h) for h in cls.hypotheses]
    return int(np.argmin(mistakes))  # argmin returns the first minimizer


def pool_erm(dss: Sequence[DatasetCounts], cls: ConceptClass) -> int:
    """ERM over the element-wise sum of the count matrices."""
    if not dss:
        raise DomainError("pool_erm needs at least one dataset")
    total = DatasetCounts(np.sum([ds.counts for ds in dss], axis=0))
    return erm(total, cls)


def oracle_subset_erm(dss: Sequence[DatasetCounts], subset: Sequence[int],
                      cls: ConceptClass) -> int:
    """pool_erm restricted to the given task indices."""
    subset = list(subset)
    if not subset:
        raise DomainError("oracle subset must be non-empty")
    if any(t < 0 or t >= len(dss) for t in subset):
        raise DomainError(f"subset indices out of range for {len(dss)} datasets")
    return pool_erm([dss[t] for t in subset], cls)


def epsilon_complexity(d: int, n: int, delta: float) -> float:
    """Per-task complexity (d/n) log(n/d) + (1/n) log(1/delta)."""
    if not 1 <= d <= n:
        raise DomainError(f"need 1 <= d <= n, got d={d}, n={n}")
    if not 0.0 < delta <= 1.0:
        raise DomainError(f"delta must lie in (0, 1], got {delta}")
    return (d / n) * math.log(n / d) + (1.0 / n) * math.log(1.0 / delta)


@dataclass(frozen=True)
class BallReport:
    """Per-task confidence balls and their intersection."""

    per_task_balls: tuple
    intersection: frozenset
    delta_t: tuple
    eps_t: tuple
    erm_indices: tuple
    heterogeneous_n: bool = False

    def __post_init__(self):
        balls = tuple(frozenset(b) for b in self.per_task_balls)
        object.__setattr__(self, "per_task_balls", balls)
        object.__setattr__(self, "intersection", frozenset(self.intersection))


def intersection_of_bernstein_balls(dss: Sequence[DatasetCounts], cls: ConceptClass,
                                    c0: float, delta: float,
                                    d: Optional[int] = None) -> tuple[int, BallReport]:
    """Keep, per task t (1-based, confidence delta/(6 t^2)), the hypotheses
    whose empirical excess over that task's ERM fits inside the Bernstein
    ball, then intersect across tasks.

    Returns the *last* surviving class index: among hypotheses consistent
    with every task there is no data left to distinguish, so the choice is
    a convention, and taking the last member makes the selection prefer h*
    under this package's [wrong, h*] class ordering.  An empty intersection
    raises EmptyIntersectionError carrying the full report.

    Heterogeneous task sizes are accepted conservatively: each task uses the
    complexity at its own n, and the report flags it.
    """
    if not dss:
        raise DomainError("need at least one dataset")
    if c0 <= 0:
        raise DomainError(f"c0 must be positive, got {c0}")
    if not 0.0 < delta < 1.0:
        raise DomainError(f"delta must lie in (0, 1), got {delta}")
    if any(ds.n < 1 for ds in dss):
        raise DomainError("every dataset must contain at least one sample")
    d = cls.vc_dim if d is None else d
    sizes = [ds.n for ds in dss]
    heterogeneous = len(set(sizes)) > 1

    balls, deltas, epss, erms = [], [], [], []
    for t, ds in enumerate(dss, start=1):
        delta_t = delta / (6.0 * t * t)
        eps_t = epsilon_complexity(min(d, ds.n), ds.n, delta_t)
        hhat = erm(ds, cls)
        ball = set()
        for i, h in enumerate(cls.hypotheses):
            excess = empirical_excess(ds, h, cls[hhat])
            radius = c0 * math.sqrt(empirical_distance(ds, h, cls[hhat]) * eps_t) + c0 * eps_t
            if excess <= radius:
                ball.add(i)
        balls.append(frozenset(ball))
        deltas.append(delta_t)
        epss.append(eps_t)
        erms.append(hhat)

    inter = frozenset.intersection(*balls)
    report = BallReport(per_task_balls=tuple(balls), intersection=inter,
                        delta_t=tuple(deltas), eps_t=tuple(epss),
                        erm_indices=tuple(erms), heterogeneous_n=heterogeneous)
    if not inter:
        raise EmptyIntersectionError(report)
    return max(inter), report


def ibb_with_fallback(dss: Sequence[DatasetCounts], cls: ConceptClass,
                      c0: float, delta: float) -> tuple[int, Optional[BallReport], bool]:
    """Ball intersection with a pooled-ERM fallback when it comes up empty.

    Returns (index, report, fell_back).
    """
    try:
        idx, report = intersection_of_bernstein_balls(dss, cls, c0, delta)
        return idx, report, False
    except EmptyIntersectionError as exc:
        return pool_erm(dss, cls), exc.report, True
