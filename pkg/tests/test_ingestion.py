import pytest

from catchup.errors import DataFormatError, GradeError
from catchup.grades import MISSING, CohortFilter, StudentRecord
from catchup.ingestion import (
    build_cohort,
    format_records,
    load_records,
    normalize_grade,
    parse_records,
    scan_rescuable,
    write_records,
)

HEADER = "case_id,year,gender,region,g1,g2,g3,g4\n"


class TestLoadRecords:
    def test_golden_style_row(self, tmp_path):
        path = tmp_path / "r.csv"
        path.write_text(HEADER + "122915,2017,2,1,1,7,7,-1\n")
        (rec,) = load_records(path)
        assert rec.case_id == 122915
        assert rec.grades == (1, 7, 7, MISSING)

    def test_out_of_range_grade_normalized(self, tmp_path):
        path = tmp_path / "r.csv"
        path.write_text(HEADER + "1,2015,1,1,0,12,-3,5\n")
        (rec,) = load_records(path)
        assert rec.grades == (MISSING, MISSING, MISSING, 5)

    def test_empty_file(self, tmp_path):
        path = tmp_path / "empty.csv"
        path.write_text("")
        assert load_records(path) == []

    def test_header_only(self, tmp_path):
        path = tmp_path / "r.csv"
        path.write_text(HEADER)
        assert load_records(path) == []

    def test_missing_file(self, tmp_path):
        with pytest.raises(DataFormatError, match="cannot read"):
            load_records(tmp_path / "nope.csv")

    def test_malformed_row_reports_line_number(self, tmp_path):
        path = tmp_path / "r.csv"
        path.write_text(HEADER + "1,2015,1,1,1,2,3,4\n2,2015,x,1,1,2,3,4\n")
        with pytest.raises(DataFormatError, match="row 3"):
            load_records(path)

    def test_wrong_field_count(self, tmp_path):
        path = tmp_path / "r.csv"
        path.write_text(HEADER + "1,2015,1,1,1,2,3\n")
        with pytest.raises(DataFormatError, match="row 2"):
            load_records(path)

    def test_invalid_gender_code(self, tmp_path):
        path = tmp_path / "r.csv"
        path.write_text(HEADER + "1,2015,5,1,1,2,3,4\n")
        with pytest.raises(DataFormatError, match="gender"):
            load_records(path)

    def test_invalid_region_code(self, tmp_path):
        path = tmp_path / "r.csv"
        path.write_text(HEADER + "1,2015,1,9,1,2,3,4\n")
        with pytest.raises(DataFormatError, match="region"):
            load_records(path)

    def test_bad_header(self, tmp_path):
        path = tmp_path / "r.csv"
        path.write_text("id,year\n")
        with pytest.raises(DataFormatError, match="header"):
            load_records(path)

    def test_row_order_preserved(self, tmp_path):
        path = tmp_path / "r.csv"
        rows = "".join(f"{i},2015,1,1,1,2,3,4\n" for i in (5, 3, 9, 1))
        path.write_text(HEADER + rows)
        assert [r.case_id for r in load_records(path)] == [5, 3, 9, 1]


def test_write_then_load_is_identity(tmp_path, golden_records):
    path = tmp_path / "out.csv"
    write_records(golden_records, path)
    assert load_records(path) == golden_records


def test_parse_format_roundtrip(golden_records):
    assert parse_records(format_records(golden_records)) == golden_records


@pytest.mark.parametrize("raw,expected", [(5, 5), (9, 9), (1, 1), (0, MISSING), (-1, MISSING), (10, MISSING)])
def test_normalize_grade(raw, expected):
    assert normalize_grade(raw) == expected


class TestBuildCohort:
    def test_year_region_filter(self, golden_records):
        cohort = build_cohort(golden_records, CohortFilter(year=2015, region=1), 4)
        assert [r.case_id for r in cohort.records] == [80183]

    def test_unset_filter_is_identity(self, golden_records):
        cohort = build_cohort(golden_records, CohortFilter(), 4)
        assert list(cohort.records) == golden_records

    def test_gender_filter_can_empty(self):
        recs = [StudentRecord(1, 2015, 1, 1, (1, 2, 3, 4))]
        cohort = build_cohort(recs, CohortFilter(gender=2), 4)
        assert cohort.records == ()

    def test_complete_only(self, golden_records):
        recs = golden_records + [StudentRecord(1, 2015, 1, 1, (1, 2, 3, 4))]
        cohort = build_cohort(recs, CohortFilter(complete_only=True), 4)
        assert [r.case_id for r in cohort.records] == [1]

    def test_idempotent(self, golden_records):
        filt = CohortFilter(year=2015)
        once = build_cohort(golden_records, filt, 4)
        twice = build_cohort(once.records, filt, 4)
        assert twice.records == once.records

    def test_invalid_filter_codes_rejected(self):
        with pytest.raises(GradeError):
            CohortFilter(gender=0)
        with pytest.raises(GradeError):
            CohortFilter(region=99)


class TestScanRescuable:
    def test_golden_cases_all_four_valid(self, golden_records):
        cases = scan_rescuable(golden_records, 4)
        assert [c.case_id for c in cases] == [77594, 77833, 80183, 122915]
        assert all(c.valid for c in cases)
        assert all(c.missing_index == 4 for c in cases)

    def test_failing_observed_grade_invalidates(self):
        recs = [StudentRecord(1, 2015, 1, 1, (9, 8, 8, MISSING))]
        (case,) = scan_rescuable(recs, 4)
        assert case.observed == (9, 8, 8)
        assert case.valid is False

    def test_two_missing_not_rescuable(self):
        recs = [StudentRecord(1, 2015, 1, 1, (1, 2, MISSING, MISSING))]
        assert scan_rescuable(recs, 4) == []

    def test_missing_elsewhere_not_rescuable(self):
        recs = [StudentRecord(1, 2015, 1, 1, (MISSING, 2, 3, 4))]
        assert scan_rescuable(recs, 4) == []
        (case,) = scan_rescuable(recs, 1)
        assert case.observed == (2, 3, 4)

    def test_disjoint_from_complete_view(self, golden_records):
        recs = golden_records + [StudentRecord(1, 2015, 1, 1, (1, 2, 3, 4))]
        cases = {c.case_id for c in scan_rescuable(recs, 4)}
        complete = {r.case_id for r in build_cohort(recs, CohortFilter(), 4).complete_records()}
        assert cases & complete == set()
