"""Record-file parsing, cohort slicing, and the rescuable-case scan.

The record file format is delimited text, comma separator, one header line:

    case_id,year,gender,region,g1,g2,g3,g4

Grades are integers; -1 (or any value outside 1..9, e.g. 0 for an absence)
is normalized to the single missing sentinel on load.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Iterable

from .errors import DataFormatError, GradeError
from .grades import (
    MISSING,
    Cohort,
    CohortFilter,
    StudentRecord,
    is_missing,
)

COLUMNS = ("case_id", "year", "gender", "region", "g1", "g2", "g3", "g4")


def normalize_grade(raw: int) -> int:
    """Collapse every out-of-range raw code to the missing sentinel."""
    return raw if 1 <= raw <= 9 else MISSING


@dataclass(frozen=True)
class RescuableCase:
    """A record with exactly one missing core grade.

    ``valid`` is true when the three observed grades are all passing (< 9),
    i.e. the case qualifies for a rescue decision.
    """

    case_id: int
    year: int
    region: int
    gender: int
    observed: tuple[int, int, int]  # the three observed grades, in position order
    missing_index: int  # 1..4 position of the missing grade
    valid: bool


def parse_records(text: str, source: str = "<string>") -> list[StudentRecord]:
    """Parse record-file content; see module docstring for the format."""
    return _parse_rows(csv.reader(io.StringIO(text)), source)


def load_records(path) -> list[StudentRecord]:
    """Load a record file from disk, normalizing raw grade codes."""
    try:
        with open(path, newline="") as fh:
            return _parse_rows(csv.reader(fh), str(path))
    except OSError as exc:
        raise DataFormatError(f"cannot read {path}: {exc}") from exc


def _parse_rows(rows: Iterable[list[str]], source: str) -> list[StudentRecord]:
    it = iter(rows)
    try:
        header = next(it)
    except StopIteration:
        return []  # fully empty file: no header, no rows
    if tuple(h.strip() for h in header) != COLUMNS:
        raise DataFormatError(
            f"{source}: expected header {','.join(COLUMNS)}, got {','.join(header)}"
        )
    records = []
    for lineno, row in enumerate(it, start=2):
        if not row:
            continue
        if len(row) != len(COLUMNS):
            raise DataFormatError(f"{source}: row {lineno}: expected {len(COLUMNS)} fields, got {len(row)}")
        try:
            values = [int(f) for f in row]
        except ValueError as exc:
            raise DataFormatError(f"{source}: row {lineno}: non-integer field ({exc})") from exc
        case_id, year, gender, region = values[:4]
        grades = tuple(normalize_grade(g) for g in values[4:])
        try:
            records.append(StudentRecord(case_id, year, gender, region, grades))
        except GradeError as exc:
            raise DataFormatError(f"{source}: row {lineno}: {exc}") from exc
    return records


def format_records(records: Iterable[StudentRecord]) -> str:
    """Render records in the input file format (normalized values)."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(COLUMNS)
    for r in records:
        writer.writerow([r.case_id, r.year, r.gender, r.region, *r.grades])
    return out.getvalue()


def write_records(records: Iterable[StudentRecord], path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(format_records(records))


def build_cohort(
    records: Iterable[StudentRecord],
    filter: CohortFilter,
    target_index: int,
) -> Cohort:
    """Select the records matching ``filter``, preserving input order."""
    selected = tuple(r for r in records if filter.matches(r))
    return Cohort(records=selected, filter=filter, target_index=target_index)


def scan_rescuable(records: Iterable[StudentRecord], target_index: int) -> list[RescuableCase]:
    """Find records whose only missing grade sits at ``target_index``.

    Output order follows input order. The ``valid`` flag marks cases whose
    three observed grades are all < 9.
    """
    if target_index not in (1, 2, 3, 4):
        raise GradeError(f"target_index must be 1..4, got {target_index}")
    cases = []
    for r in records:
        if not is_missing(r.grades[target_index - 1]):
            continue
        if r.n_missing() != 1:
            continue
        observed = tuple(g for i, g in enumerate(r.grades) if i != target_index - 1)
        cases.append(
            RescuableCase(
                case_id=r.case_id,
                year=r.year,
                region=r.region,
                gender=r.gender,
                observed=observed,
                missing_index=target_index,
                valid=all(g < 9 for g in observed),
            )
        )
    return cases
