import json

import pytest

from mpcreg.cli import EXIT_DATA, EXIT_OK, EXIT_USAGE, main


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


class TestCost:
    def test_reference_dimension_text(self, capsys):
        code, out, _ = run_cli(capsys, "cost", "--dim", "14")
        assert code == EXIT_OK
        assert "openings=6090" in out
        assert "openings=2541" in out

    def test_json_format(self, capsys):
        code, out, _ = run_cli(capsys, "cost", "--dim", "14", "--method", "gauss", "--format", "json")
        payload = json.loads(out)
        assert payload["methods"]["gauss"]["openings"] == 2541
        assert payload["methods"]["gauss"]["inversions"] == 105

    def test_bad_dim_is_usage_error(self, capsys):
        code, _, err = run_cli(capsys, "cost", "--dim", "0")
        assert code == EXIT_USAGE


class TestLeak:
    REF_ARGS = (
        "leak", "--threshold", "3",
        "--alphas", "0.1,0.3,0.5,0.7,0.9",
        "--adversary", "3,4,5",
        "--sigma-r2", "1e4", "--sigma-beta2", "1e5",
        "--sigma-x2", "3.927777777777778",
    )

    def test_reference_scenario_from_dim(self, capsys):
        code, out, _ = run_cli(capsys, *self.REF_ARGS, "--dim", "14", "--method", "inverse", "--format", "json")
        assert code == EXIT_OK
        payload = json.loads(out)
        assert payload["openings"] == 6090
        assert payload["leakage_bound_nats"] == pytest.approx(0.6243, abs=5e-4)
        assert payload["sigma_convention"] == "variance"

    def test_explicit_openings(self, capsys):
        code, out, _ = run_cli(capsys, *self.REF_ARGS, "--openings", "2541")
        assert code == EXIT_OK
        bound_line = next(line for line in out.splitlines() if "leakage bound" in line)
        assert float(bound_line.split("=")[1].split()[0]) == pytest.approx(0.3558, abs=5e-4)

    def test_usage_error_without_source(self, capsys):
        with pytest.raises(SystemExit) as exc:
            run_cli(capsys, "leak", "--threshold", "3", "--alphas", "0.1,0.3,0.5",
                    "--adversary", "1,2,3", "--sigma-x2", "1.0")
        assert exc.value.code == EXIT_USAGE


class TestRegress:
    def test_writes_report_and_figures(self, capsys, tmp_path):
        out_file = tmp_path / "grid.json"
        code, out, _ = run_cli(
            capsys, "regress",
            "--parties", "3", "--threshold", "2",
            "--lambda", "100", "--repeats", "1",
            "--method", "insecure-inverse",
            "--out", str(out_file),
        )
        assert code == EXIT_OK
        payload = json.loads(out_file.read_text())
        assert payload["dataset"]["rows"] == 506
        assert (tmp_path / "grid_mse.png").exists()

    def test_no_figures_flag(self, capsys, tmp_path):
        out_file = tmp_path / "grid.csv"
        code, *_ = run_cli(
            capsys, "regress",
            "--parties", "3", "--threshold", "2",
            "--lambda", "100", "--repeats", "1",
            "--method", "insecure-gauss",
            "--out", str(out_file), "--format", "csv", "--no-figures",
        )
        assert code == EXIT_OK
        assert out_file.read_text().startswith("method,lambda")
        assert not (tmp_path / "grid_mse.png").exists()

    def test_stdout_when_no_out(self, capsys):
        code, out, _ = run_cli(
            capsys, "regress",
            "--parties", "3", "--threshold", "2",
            "--lambda", "10", "--repeats", "1",
            "--method", "insecure-gauss", "--format", "csv",
        )
        assert code == EXIT_OK
        assert out.startswith("method,lambda")

    def test_missing_data_file_is_data_error(self, capsys, tmp_path):
        code, _, err = run_cli(capsys, "regress", "--data", str(tmp_path / "nope.csv"))
        assert code == EXIT_DATA

    def test_malformed_data_file_is_data_error(self, capsys, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("a,y\n1,2\nx,3\n")
        code, _, err = run_cli(capsys, "regress", "--data", str(bad), "--repeats", "1")
        assert code == EXIT_DATA
        assert "row 3" in err

    def test_mismatched_sigma_lists(self, capsys):
        code, _, err = run_cli(
            capsys, "regress", "--sigma-r2", "1e4", "--sigma-r2", "1e5", "--sigma-beta2", "1e5",
        )
        assert code == EXIT_USAGE

    def test_usage_error_exit_code_from_argparse(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["regress", "--method", "does-not-exist"])
        assert exc.value.code == EXIT_USAGE


class TestDemo:
    def test_share_and_reconstruct_walkthrough(self, capsys, monkeypatch):
        import io

        monkeypatch.setattr("sys.stdin", io.StringIO("5\n-2.5\n"))
        code, out, _ = run_cli(capsys, "demo", "--parties", "4", "--threshold", "2", "--seed", "1")
        assert code == EXIT_OK
        assert out.count("reconstructed") == 2
        assert "secret 5.0" in out and "secret -2.5" in out

    def test_non_number_is_data_error(self, capsys, monkeypatch):
        import io

        monkeypatch.setattr("sys.stdin", io.StringIO("zebra\n"))
        code, _, err = run_cli(capsys, "demo")
        assert code == EXIT_DATA
