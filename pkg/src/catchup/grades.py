"""Grade scale semantics and the student/cohort record types.

Grades on the 1..9 scale: 1-6 is a credit, 7-8 a plain pass, 9 a fail.
A missing grade is always the sentinel ``MISSING`` (-1); the ingestion
layer normalizes every other out-of-range raw code to it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import IntEnum
from typing import Optional

import numpy as np

from .errors import GradeError

#: Canonical missing-grade sentinel.
MISSING = -1

#: Pass/fail cut for real-valued estimates: pass iff estimate <= PASS_CUT.
PASS_CUT = 8.0

VALID_GENDERS = (1, 2)  # 1 female, 2 male
VALID_REGIONS = (1, 2, 3, 4, 5, 6)

SUBJECTS = ("English", "Maths", "Sciences", "SES")


class GradeBand(IntEnum):
    CREDIT = 1
    PASS = 2
    FAIL = 3


def is_missing(grade: int) -> bool:
    return grade == MISSING


def is_valid_grade(grade: int) -> bool:
    """True for an observed grade 1..9 or the missing sentinel."""
    return grade == MISSING or 1 <= grade <= 9


def band_of(grade: int) -> GradeBand:
    """Band of an observed grade: 1-6 credit, 7-8 pass, 9 fail."""
    if grade == MISSING:
        raise GradeError("cannot band a missing grade")
    if not 1 <= grade <= 9:
        raise GradeError(f"not an observed grade: {grade!r}")
    if grade <= 6:
        return GradeBand.CREDIT
    if grade <= 8:
        return GradeBand.PASS
    return GradeBand.FAIL


def is_passing(estimate: float) -> bool:
    """Pass/fail cut for a real-valued grade estimate: pass iff <= 8.

    Estimates are compared unrounded, so 8.0001 already fails.
    """
    if not math.isfinite(estimate):
        raise GradeError(f"grade estimate must be finite, got {estimate!r}")
    return estimate <= PASS_CUT


def band_codes(grades: np.ndarray) -> np.ndarray:
    """Vectorized band encoding (1 credit / 2 pass / 3 fail) of observed grades."""
    arr = np.asarray(grades)
    if np.any(arr == MISSING):
        raise GradeError("cannot band missing grades")
    return np.where(arr < 7, 1, np.where(arr < 9, 2, 3))


@dataclass(frozen=True)
class StudentRecord:
    """One exam case: id, covariates, and the four core grades (G1..G4)."""

    case_id: int
    year: int
    gender: int
    region: int
    grades: tuple[int, int, int, int]

    def __post_init__(self) -> None:
        if self.case_id <= 0:
            raise GradeError(f"case_id must be positive, got {self.case_id}")
        if self.gender not in VALID_GENDERS:
            raise GradeError(f"invalid gender code {self.gender} (case {self.case_id})")
        if self.region not in VALID_REGIONS:
            raise GradeError(f"invalid region code {self.region} (case {self.case_id})")
        if len(self.grades) != 4 or not all(is_valid_grade(g) for g in self.grades):
            raise GradeError(f"invalid grade quadruple {self.grades} (case {self.case_id})")

    def is_complete(self) -> bool:
        return MISSING not in self.grades

    def n_missing(self) -> int:
        return sum(1 for g in self.grades if g == MISSING)


@dataclass(frozen=True)
class CohortFilter:
    """Year/region/gender selection; unset fields mean "all"."""

    year: Optional[int] = None
    region: Optional[int] = None
    gender: Optional[int] = None
    complete_only: bool = False

    def __post_init__(self) -> None:
        if self.gender is not None and self.gender not in VALID_GENDERS:
            raise GradeError(f"invalid gender code {self.gender}")
        if self.region is not None and self.region not in VALID_REGIONS:
            raise GradeError(f"invalid region code {self.region}")

    def matches(self, record: StudentRecord) -> bool:
        if self.year is not None and record.year != self.year:
            return False
        if self.region is not None and record.region != self.region:
            return False
        if self.gender is not None and record.gender != self.gender:
            return False
        if self.complete_only and not record.is_complete():
            return False
        return True


@dataclass(frozen=True)
class Cohort:
    """A filtered slice of records with a designated grade position to impute."""

    records: tuple[StudentRecord, ...]
    filter: CohortFilter
    target_index: int  # grade position 1..4 being imputed

    def __post_init__(self) -> None:
        if self.target_index not in (1, 2, 3, 4):
            raise GradeError(f"target_index must be 1..4, got {self.target_index}")
        for r in self.records:
            if not self.filter.matches(r):
                raise GradeError(
                    f"record {r.case_id} does not satisfy the cohort filter {self.filter}"
                )

    def complete_records(self) -> tuple[StudentRecord, ...]:
        """The complete view: records with all four grades observed, in order."""
        return tuple(r for r in self.records if r.is_complete())

    def complete_matrix(self) -> np.ndarray:
        """Complete view as an (n, 4) integer grade matrix."""
        return grade_matrix(self.complete_records())


def grade_matrix(records) -> np.ndarray:
    """Stack record grades into an (n, 4) integer array (empty -> shape (0, 4))."""
    if not records:
        return np.empty((0, 4), dtype=np.int64)
    return np.array([r.grades for r in records], dtype=np.int64)


def predictor_positions(target_index: int) -> tuple[int, int, int]:
    """0-based grade columns used as predictors for a 1-based target position.

    The three non-target positions keep their original order, e.g. target 3
    predicts from (G1, G2, G4).
    """
    if target_index not in (1, 2, 3, 4):
        raise GradeError(f"target_index must be 1..4, got {target_index}")
    return tuple(i for i in range(4) if i != target_index - 1)


def split_quadruple(grades, target_index: int) -> tuple[tuple[int, int, int], int]:
    """Split a grade quadruple into (predictor triple in position order, target)."""
    cols = predictor_positions(target_index)
    return tuple(grades[i] for i in cols), grades[target_index - 1]
