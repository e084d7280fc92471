"""End-to-end tests for the ctc-detector command line."""

import json

import pytest

from src.cli import EXIT_CONVERGENCE, EXIT_OK, EXIT_USAGE, EXIT_VALIDATION, main
from src.config import CSV_COLUMNS
from src.errors import ConvergenceError


def write_csv(path, rows):
    lines = [",".join(CSV_COLUMNS)] + [",".join(map(str, r)) for r in rows]
    path.write_text("\n".join(lines) + "\n")
    return path


ROW = [100.0, 0.44, 0.441, 0.439, 0.4398, 1e-10, 1e-9, "ok"]


class TestResponseCommand:
    def test_minkowski(self, capsys):
        assert main(["response", "--geometry", "minkowski", "--omega", "0.1"]) == 0
        out = capsys.readouterr().out
        assert "0.43983" in out
        assert "closed_form" in out

    def test_ads2_rejects_zero_curvature(self, capsys):
        code = main(["response", "--geometry", "ads2", "--omega", "0.1", "--w", "0"])
        assert code == EXIT_USAGE
        assert "W" in capsys.readouterr().err

    def test_missing_geometry_parameter(self):
        assert main(["response", "--geometry", "ec", "--omega", "0.1"]) == EXIT_USAGE

    def test_time_machine_needs_one_warp_flag(self):
        argv = ["response", "--geometry", "tm", "--omega", "0.1", "--ell", "10"]
        assert main(argv + ["--w", "0.05", "--delta", "0.1"]) == EXIT_USAGE
        assert main(argv) == EXIT_USAGE

    def test_unknown_geometry_is_usage_error(self):
        assert main(["response", "--geometry", "sphere", "--omega", "0.1"]) == 2

    def test_help_exits_ok(self, capsys):
        assert main(["response", "--help"]) == EXIT_OK
        assert "--geometry" in capsys.readouterr().out

    def test_cylinder(self, capsys):
        argv = ["response", "--geometry", "ec", "--omega", "0.1", "--ell", "20"]
        assert main(argv) == 0
        assert "regular_split" in capsys.readouterr().out

    def test_convergence_failure_exit_code(self, monkeypatch, capsys):
        def fail(*args, **kwargs):
            raise ConvergenceError("quadrature failed", estimate=0.44, error_bound=1e-3)

        monkeypatch.setattr("src.commands.response.compute_response", fail)
        code = main(["response", "--geometry", "minkowski", "--omega", "0.1"])
        assert code == EXIT_CONVERGENCE
        err = capsys.readouterr().err
        assert "partial estimate: 4.4" in err

    @pytest.mark.slow
    def test_time_machine(self, capsys):
        argv = [
            "response", "--geometry", "tm", "--omega", "0.1", "--w", "0.05",
            "--ell", "100", "--N", "10",
        ]
        assert main(argv) == 0
        out = capsys.readouterr().out
        assert "tail_estimate" in out
        assert "N: 10" in out


class TestSweepCommand:
    @pytest.mark.slow
    def test_single_point_matches_response(self, tmp_path, capsys):
        out = tmp_path / "one.csv"
        argv = [
            "sweep", "--mode", "curvature", "--omega", "0.1", "--ell", "100",
            "--w", "0.05", "--N", "1", "--out", str(out),
        ]
        assert main(argv) == 0
        lines = out.read_text().splitlines()
        assert lines[0] == ",".join(CSV_COLUMNS)
        assert len(lines) == 2
        capsys.readouterr()
        main(["response", "--geometry", "minkowski", "--omega", "0.1"])
        printed = capsys.readouterr().out.split("=")[1].split()[0]
        p_m = float(lines[1].split(",")[CSV_COLUMNS.index("P_M")])
        assert p_m == pytest.approx(float(printed), rel=1e-15)

    def test_missing_config_file(self, tmp_path):
        code = main(["sweep", "--config", str(tmp_path / "absent.json")])
        assert code == EXIT_USAGE

    def test_unwritable_output(self, tmp_path):
        argv = [
            "sweep", "--mode", "curvature", "--omega", "0.1", "--ell", "100",
            "--w", "0.05", "--out", str(tmp_path / "no" / "such" / "dir.csv"),
        ]
        assert main(argv) == EXIT_USAGE


class TestPlotCommand:
    def test_single_row_with_markers(self, tmp_path):
        csv = write_csv(tmp_path / "one.csv", [ROW])
        svg = tmp_path / "one.svg"
        assert main(["plot", str(csv), "--out", str(svg), "--mode", "curvature"]) == 0
        text = svg.read_text()
        assert "<svg" in text
        assert "marker" in text or "<use" in text

    def test_deterministic_bytes(self, tmp_path):
        rows = [[10.0 * k] + ROW[1:] for k in range(1, 5)]
        csv = write_csv(tmp_path / "many.csv", rows)
        first, second = tmp_path / "a.svg", tmp_path / "b.svg"
        assert main(["plot", str(csv), "--out", str(first)]) == 0
        assert main(["plot", str(csv), "--out", str(second)]) == 0
        assert first.read_bytes() == second.read_bytes()

    def test_empty_data_writes_nothing(self, tmp_path):
        csv = write_csv(tmp_path / "empty.csv", [])
        svg = tmp_path / "empty.svg"
        assert main(["plot", str(csv), "--out", str(svg)]) == EXIT_USAGE
        assert not svg.exists()

    def test_malformed_row_reports_line(self, tmp_path, capsys):
        csv = write_csv(tmp_path / "bad.csv", [ROW, ["x"] + ROW[1:]])
        assert main(["plot", str(csv), "--out", str(tmp_path / "bad.svg")]) == 2
        assert "line 3" in capsys.readouterr().err


class TestValidateCommand:
    def test_subset(self, tmp_path):
        report = tmp_path / "report.jsonl"
        code = main(["validate", "--only", "kernel_limits", "--out", str(report)])
        assert code == 0
        rows = [json.loads(line) for line in report.read_text().splitlines()]
        assert rows
        assert all(r["name"].startswith("kernel_limits.") for r in rows)

    def test_zero_bound_fails(self, tmp_path):
        argv = [
            "validate", "--only", "ec_image", "--bound", "0",
            "--out", str(tmp_path / "r.jsonl"),
        ]
        assert main(argv) == EXIT_VALIDATION

    def test_unknown_check(self):
        assert main(["validate", "--only", "bogus"]) == EXIT_USAGE

    def test_disabled_check(self):
        assert main(["validate", "--only", "tm_theta"]) == EXIT_USAGE
