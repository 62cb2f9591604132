import json

import pytest

from catchup.cli import main
from catchup.ingestion import format_records, load_records

from conftest import GOLDEN_CASES


def run_cli(capsys, *args):
    code = main(list(args))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def strip_timestamp(text: str) -> str:
    return "\n".join(
        line for line in text.splitlines() if "timestamp" not in line
    )


class TestExitCodes:
    def test_no_arguments_is_usage_error(self, capsys):
        code, _, err = run_cli(capsys)
        assert code == 1
        assert "Usage" in err or "usage" in err

    def test_unknown_option_is_usage_error(self, capsys):
        code, _, err = run_cli(capsys, "scan", "--frobnicate")
        assert code == 1

    def test_unknown_subcommand_is_usage_error(self, capsys):
        code, _, _ = run_cli(capsys, "transmogrify")
        assert code == 1

    def test_missing_required_flag_is_usage_error(self, capsys):
        code, _, _ = run_cli(capsys, "scan")
        assert code == 1

    def test_missing_input_file_is_data_error(self, capsys, tmp_path):
        code, _, err = run_cli(capsys, "scan", "--input", str(tmp_path / "none.csv"))
        assert code == 2
        assert "cannot read" in err

    def test_malformed_file_is_data_error(self, capsys, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("case_id,year,gender,region,g1,g2,g3,g4\n1,zzz,1,1,1,2,3,4\n")
        code, _, err = run_cli(capsys, "scan", "--input", str(bad))
        assert code == 2
        assert "row 2" in err

    def test_unreachable_server_is_data_error(self, capsys, golden_csv):
        code, _, err = run_cli(
            capsys, "scan", "--input", str(golden_csv), "--server", "http://127.0.0.1:1"
        )
        assert code == 2


class TestScan:
    def test_lists_golden_cases(self, capsys, golden_csv):
        code, out, _ = run_cli(capsys, "scan", "--input", str(golden_csv), "--target", "4")
        assert code == 0
        assert "rescuable=4 valid=4" in out
        for case_id in (77594, 77833, 80183, 122915):
            assert f"case={case_id}" in out

    def test_year_filter(self, capsys, golden_csv):
        code, out, _ = run_cli(
            capsys, "scan", "--input", str(golden_csv), "--year", "2015", "--region", "1"
        )
        assert code == 0
        assert "case=80183" in out
        assert "case=77594" not in out

    def test_machine_format(self, capsys, golden_csv):
        code, out, _ = run_cli(
            capsys, "scan", "--input", str(golden_csv), "--format", "machine"
        )
        assert code == 0
        body = json.loads(out)
        assert body["manifest"]["command"] == "scan"
        assert len(body["manifest"]["input_sha256"]) == 64
        assert len(body["results"]["cases"]) == 4

    def test_manifest_header_in_text(self, capsys, golden_csv):
        _, out, _ = run_cli(capsys, "scan", "--input", str(golden_csv))
        lines = out.splitlines()
        assert lines[0].startswith("# catchup ")
        assert lines[1] == "# command: scan"
        assert any(line.startswith("# input-sha256: ") for line in lines)
        assert any(line.startswith("# timestamp: ") for line in lines)


class TestGen:
    def test_writes_loadable_records(self, capsys, tmp_path):
        out_file = tmp_path / "pop.csv"
        code, out, _ = run_cli(
            capsys, "gen", "--n", "50", "--seed", "3", "--missing-rate", "0.1",
            "--out", str(out_file),
        )
        assert code == 0
        assert f"wrote 50 records to {out_file}" in out
        assert len(load_records(out_file)) == 50

    def test_deterministic_output_file(self, capsys, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        run_cli(capsys, "gen", "--n", "30", "--seed", "7", "--out", str(a))
        run_cli(capsys, "gen", "--n", "30", "--seed", "7", "--out", str(b))
        assert a.read_text() == b.read_text()


@pytest.fixture(scope="module")
def population_file(tmp_path_factory):
    tmp = tmp_path_factory.mktemp("cli-pop")
    code = main(
        ["gen", "--n", "400", "--seed", "19", "--noise", "0.6", "--out", str(tmp / "pop.csv")]
    )
    assert code == 0
    records = load_records(tmp / "pop.csv")
    path = tmp / "pop_with_cases.csv"
    path.write_text(format_records(records + list(GOLDEN_CASES)))
    return path


class TestEval:
    def test_eval_regression_text(self, capsys, population_file):
        code, out, _ = run_cli(
            capsys, "eval-regression", "--input", str(population_file),
            "--reps", "3", "--seed", "2",
        )
        assert code == 0
        assert "model=regression" in out
        assert "mpf=" in out and "mfp=" in out and "mean_adj_r2=" in out

    def test_eval_regression_machine(self, capsys, population_file):
        code, out, _ = run_cli(
            capsys, "eval-regression", "--input", str(population_file),
            "--reps", "2", "--seed", "2", "--format", "machine",
        )
        assert code == 0
        body = json.loads(out)
        report = body["results"]["report"]
        assert report["model"] == "regression"
        assert report["reps"] == 2
        assert set(report["exclusions"]) == {"mpf", "mfp"}

    def test_eval_hybrid_reports_all_models(self, capsys, population_file):
        code, out, _ = run_cli(
            capsys, "eval-hybrid", "--input", str(population_file),
            "--reps", "2", "--seed", "2", "--k", "10",
        )
        assert code == 0
        for model in (
            "similar_average", "similar_most_frequent",
            "completed_average", "completed_most_frequent",
        ):
            assert f"model={model}" in out

    def test_eval_hybrid_rule_filter_and_fidelity(self, capsys, population_file):
        code, out, _ = run_cli(
            capsys, "eval-hybrid", "--input", str(population_file),
            "--reps", "1", "--k", "10", "--rule", "avg", "--paper-normalization",
        )
        assert code == 0
        assert "model=similar_most_frequent" in out or "model=similar_average" in out
        assert "model=completed_most_frequent" not in out
        assert "group_mpf=" in out

    def test_eval_regression_cohort_flags(self, capsys, population_file):
        code, out, _ = run_cli(
            capsys, "eval-regression", "--input", str(population_file),
            "--year", "2015", "--region", "1", "--reps", "2", "--seed", "3",
        )
        assert code == 0
        assert "model=regression" in out


class TestPredictAndRescue:
    def test_predict_regression(self, capsys, population_file):
        code, out, _ = run_cli(
            capsys, "predict", "--input", str(population_file),
            "--case", "80183", "--engine", "reg", "--reps", "10", "--seed", "4",
        )
        assert code == 0
        assert "case=80183" in out
        assert "verdict=" in out
        assert "grade4P=" in out
        assert "estimates: n=10" in out

    def test_predict_unknown_case_is_data_error(self, capsys, population_file):
        code, _, err = run_cli(
            capsys, "predict", "--input", str(population_file), "--case", "31337",
        )
        assert code == 2
        assert "not rescuable" in err

    def test_rescue_all(self, capsys, population_file):
        code, out, _ = run_cli(
            capsys, "rescue-all", "--input", str(population_file),
            "--engine", "hybrid", "--k", "15", "--reps", "5", "--seed", "6",
        )
        assert code == 0
        assert "decisions=4" in out
        assert out.count("verdict=") == 4


class TestDeterminism:
    @pytest.mark.parametrize("fmt", ["text", "machine"])
    def test_scan_byte_identical_minus_timestamp(self, capsys, golden_csv, fmt):
        _, out1, _ = run_cli(capsys, "scan", "--input", str(golden_csv), "--format", fmt)
        _, out2, _ = run_cli(capsys, "scan", "--input", str(golden_csv), "--format", fmt)
        assert strip_timestamp(out1) == strip_timestamp(out2)

    def test_eval_hybrid_byte_identical(self, capsys, population_file):
        args = ["eval-hybrid", "--input", str(population_file), "--reps", "2",
                "--k", "10", "--seed", "11", "--format", "machine"]
        _, out1, _ = run_cli(capsys, *args)
        _, out2, _ = run_cli(capsys, *args)
        assert strip_timestamp(out1) == strip_timestamp(out2)
