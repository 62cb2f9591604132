import pytest

from catchup.grades import StudentRecord
from catchup.ingestion import format_records

# The four rescuable cases used as the golden scan fixture throughout the
# suite. Gender values are arbitrary fixture choices; no test conditions on
# them.
GOLDEN_CASES = (
    StudentRecord(77594, 2015, 1, 2, (8, 8, 8, -1)),
    StudentRecord(77833, 2015, 1, 3, (8, 8, 8, -1)),
    StudentRecord(80183, 2015, 1, 1, (4, 6, 7, -1)),
    StudentRecord(122915, 2017, 2, 1, (1, 7, 7, -1)),
)


@pytest.fixture
def golden_records():
    return list(GOLDEN_CASES)


@pytest.fixture
def golden_csv(tmp_path):
    path = tmp_path / "golden.csv"
    path.write_text(format_records(GOLDEN_CASES))
    return path

