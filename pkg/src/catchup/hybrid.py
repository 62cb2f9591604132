"""Similar-case / nearest-neighbor grade estimation.

For a query triple of observed grades, the class of cases used to estimate
the missing grade is built from the training data in one of three ways:

* SIMILAR: more than ``k`` training cases sit at distance zero (exact grade
  duplicates are very common); the class is all of them.
* COMPLETED: otherwise the zero-distance cases are topped up with the nearest
  remaining cases until the class has ``k`` members. Ranking is by squared
  Euclidean distance with stable original-order tie-breaking, which puts the
  zero-distance cases first automatically.
* EPSILON_BALL: every training case within a fixed radius.

Estimates are the class average and the most frequent class grade (ties
broken toward the larger grade); either can drive the pass/fail decision.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence

import numpy as np

from .errors import NoNeighborsError
from .grades import PASS_CUT

#: Default neighbor count.
DEFAULT_K = 100


class ClassMode(Enum):
    SIMILAR = "similar"
    COMPLETED = "completed"
    EPSILON_BALL = "epsilon_ball"


class DistanceKind(Enum):
    # squared Euclidean, no square root
    EUCLID2 = "euclid2"
    CHEBYSHEV = "chebyshev"


class DecisionRule(Enum):
    AVERAGE = "average"
    MOST_FREQUENT = "most_frequent"


def squared_euclidean(p: Sequence[float], c: Sequence[float]) -> float:
    return float(sum((pj - cj) ** 2 for pj, cj in zip(p, c)))


def chebyshev(p: Sequence[float], c: Sequence[float]) -> float:
    return float(max(abs(pj - cj) for pj, cj in zip(p, c)))


def distance(kind: DistanceKind, p: Sequence[float], c: Sequence[float]) -> float:
    if kind is DistanceKind.EUCLID2:
        return squared_euclidean(p, c)
    return chebyshev(p, c)


def lower_partial_mean(values: Sequence[float], size: int) -> float:
    """Mean of the first ``size`` entries."""
    if not 1 <= size <= len(values):
        raise ValueError(f"size {size} out of range for {len(values)} values")
    return sum(values[:size]) / size


def upper_partial_mean(values: Sequence[float], subsize: int, totsize: int) -> float:
    """Mean of the last ``subsize`` of the first ``totsize`` entries."""
    if not 1 <= subsize <= totsize <= len(values):
        raise ValueError(
            f"sizes ({subsize}, {totsize}) out of range for {len(values)} values"
        )
    return sum(values[totsize - subsize : totsize]) / subsize


@dataclass(frozen=True)
class NeighborClass:
    """The set of training cases an estimate is computed over."""

    mode: ClassMode
    members: tuple[int, ...]  # positions into the training data
    k_sim: int  # number of zero-distance (exact duplicate) cases
    k: Optional[int]
    epsilon: Optional[float] = None


@dataclass(frozen=True)
class HybridEstimate:
    mean_grade: float
    modal_grade: int
    neighbor_class: NeighborClass


def _distances(kind: DistanceKind, query, train_triples: np.ndarray) -> np.ndarray:
    q = np.asarray(query, dtype=float)
    diff = train_triples.astype(float) - q
    if kind is DistanceKind.EUCLID2:
        return np.sum(diff * diff, axis=1)
    return np.max(np.abs(diff), axis=1)


def build_class(
    query: Sequence[int],
    train_triples,
    k: int = DEFAULT_K,
    *,
    epsilon: Optional[float] = None,
    distance_kind: DistanceKind = DistanceKind.EUCLID2,
) -> NeighborClass:
    """Build the estimation class for one query triple.

    ``epsilon`` switches to the epsilon-ball variant; otherwise the
    similar/completed branching applies. The zero-distance (similar) set is
    the same under either distance kind. When the training data has fewer
    than ``k`` rows, a completed class takes all of them.
    """
    train = np.asarray(train_triples)
    if train.ndim != 2 or train.shape[1] != 3:
        raise ValueError(f"training triples must be (n, 3), got shape {train.shape}")
    n = train.shape[0]
    if n == 0:
        raise NoNeighborsError("empty training set")

    d = _distances(distance_kind, query, train)
    zero = np.flatnonzero(d == 0.0)
    k_sim = len(zero)

    if epsilon is not None:
        if epsilon < 0:
            raise ValueError(f"epsilon must be >= 0, got {epsilon}")
        members = tuple(int(i) for i in np.flatnonzero(d <= epsilon))
        return NeighborClass(ClassMode.EPSILON_BALL, members, k_sim, None, epsilon)

    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if k_sim > k:
        members = tuple(int(i) for i in zero)
        return NeighborClass(ClassMode.SIMILAR, members, k_sim, k)

    # Stable sort keeps ties in original order; zero-distance rows lead.
    order = np.argsort(d, kind="stable")
    members = tuple(int(i) for i in order[: min(k, n)])
    return NeighborClass(ClassMode.COMPLETED, members, k_sim, k)


def estimate(neighbor_class: NeighborClass, train_targets) -> HybridEstimate:
    """Average and most-frequent target grade over the class members.

    Modal ties break toward the larger grade.
    """
    if not neighbor_class.members:
        raise NoNeighborsError(
            f"no neighbors in class (mode={neighbor_class.mode.value}, "
            f"epsilon={neighbor_class.epsilon})"
        )
    targets = np.asarray(train_targets)[list(neighbor_class.members)]
    counts = np.bincount(targets, minlength=10)
    modal = int(np.flatnonzero(counts == counts.max()).max())
    return HybridEstimate(
        mean_grade=float(targets.mean()),
        modal_grade=modal,
        neighbor_class=neighbor_class,
    )


def decide(est: HybridEstimate, rule: DecisionRule) -> bool:
    """Pass/fail under the chosen rule: pass iff the deciding grade is <= 8."""
    if rule is DecisionRule.AVERAGE:
        return est.mean_grade <= PASS_CUT
    return est.modal_grade <= PASS_CUT
