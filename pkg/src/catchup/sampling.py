"""Randomized train/test splits by deduplicated uniform index draws.

Two modes:

* parametric (default): draw uniform positions until the number of distinct
  ones first reaches ceil(train_fraction * n), so the train size is exact.
* legacy draw-count mode (``paper_mode``): draw a fixed number of positions,
  round(1.5 * round(2n/3)) + 2000, and keep the distinct ones. The constant
  2000 was tuned for large cohorts; on small ones the draw would swallow every
  position, so dedup stops once n - 1 distinct positions are collected to keep
  the test side nonempty.

All randomness flows through numpy generators seeded with an explicit entropy
sequence; ``rng_for(master, b)`` gives the derived stream for repetition b.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

DEFAULT_TRAIN_FRACTION = 0.75


def rng_for(*entropy: int) -> np.random.Generator:
    """Generator for a (master_seed, stream...) derivation path."""
    return np.random.default_rng(list(entropy))


def presence_test(x: int, seen: Sequence[int], k: int) -> int:
    """1 iff ``x`` equals one of the first ``k`` entries of ``seen``, else 0."""
    if k > len(seen):
        raise ValueError(f"k={k} exceeds length {len(seen)}")
    for i in range(k):
        if seen[i] == x:
            return 1
    return 0


def paper_draw_count(n_total: int) -> int:
    """Fixed draw count for the legacy mode (halves round to even)."""
    return round(1.5 * round(2 * n_total / 3)) + 2000


@dataclass(frozen=True)
class SplitConfig:
    """How train/test splits are drawn; carried verbatim through evaluations."""

    paper_mode: bool = False
    train_fraction: float = DEFAULT_TRAIN_FRACTION

    def __post_init__(self) -> None:
        if not 0.0 < self.train_fraction < 1.0:
            raise ValueError(f"train_fraction must be in (0,1), got {self.train_fraction}")


@dataclass(frozen=True)
class SplitIndices:
    """A train/test partition of positions 0..n-1.

    ``train`` is duplicate-free in draw order; ``test`` is the complement in
    ascending (original) order.
    """

    train: tuple[int, ...]
    test: tuple[int, ...]
    seed: tuple[int, ...]

    @property
    def n_total(self) -> int:
        return len(self.train) + len(self.test)

    @property
    def achieved_fraction(self) -> float:
        return len(self.train) / self.n_total


def _dedup_first(draws, cap: int) -> list[int]:
    """Distinct values in first-occurrence order, stopping at ``cap`` of them."""
    seen: dict[int, None] = {}
    for v in draws:
        if v not in seen:
            seen[v] = None
            if len(seen) == cap:
                break
    return [int(v) for v in seen]


def split(
    n_total: int,
    seed: int | Sequence[int],
    config: SplitConfig = SplitConfig(),
) -> SplitIndices:
    """Draw a train/test partition of positions 0..n_total-1."""
    if n_total < 2:
        raise ValueError(f"need at least 2 rows to split, got {n_total}")
    entropy = (seed,) if isinstance(seed, int) else tuple(seed)
    rng = np.random.default_rng(list(entropy))

    if config.paper_mode:
        draws = rng.integers(0, n_total, size=paper_draw_count(n_total))
        train = _dedup_first(draws, cap=n_total - 1)
    else:
        target = math.ceil(config.train_fraction * n_total)
        target = min(target, n_total - 1)  # keep the test side nonempty
        seen: dict[int, None] = {}
        while len(seen) < target:
            for v in rng.integers(0, n_total, size=max(64, n_total)):
                if v not in seen:
                    seen[int(v)] = None
                    if len(seen) == target:
                        break
        train = list(seen)

    in_train = set(train)
    test = tuple(i for i in range(n_total) if i not in in_train)
    return SplitIndices(train=tuple(train), test=test, seed=entropy)
