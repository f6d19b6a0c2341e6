import csv
import io
import json
import math
import os

import numpy as np
import pytest

from hermite_decay.cli_report import (
    DEFAULT_T_GRID,
    GridSpec,
    SweepConfig,
    calibrate,
    compare_to_fixture,
    fixture_path,
    main,
    render,
    run,
    to_csv,
    to_json,
)
from hermite_decay.decay_sum import SumParams, envelope, find_nmax
from hermite_decay.hermite_core import hermite_exact
from oracles import naive_weighted_sum


def sum_config(**overrides):
    base = dict(
        mode="sum",
        x_grid=GridSpec(1.0, 5.0, 5),
        kappa=1.0,
        beta=0.25,
        y=0.5,
    )
    base.update(overrides)
    return SweepConfig(**base)


def parse_csv(text: str):
    lines = [line for line in text.splitlines() if not line.startswith("#")]
    reader = csv.reader(io.StringIO("\n".join(lines)))
    header = next(reader)
    return header, list(reader)


class TestGridSpec:
    def test_validation(self):
        with pytest.raises(ValueError):
            GridSpec(1.0, 2.0, 1)
        with pytest.raises(ValueError):
            GridSpec(2.0, 1.0, 5)
        with pytest.raises(ValueError):
            GridSpec(0.0, 1.0, 5, log=True)
        with pytest.raises(ValueError):
            GridSpec(math.nan, 1.0, 5)

    def test_points(self):
        lin = GridSpec(0.0, 1.0, 5).points()
        assert np.allclose(lin, [0.0, 0.25, 0.5, 0.75, 1.0])
        log = GridSpec(1.0, 100.0, 3, log=True).points()
        assert np.allclose(log, [1.0, 10.0, 100.0])

    def test_round_trip(self):
        spec = GridSpec(2.0, 50.0, 11, log=True)
        assert GridSpec.from_dict(spec.to_dict()) == spec


class TestSweepConfig:
    def test_mode_required_parameters(self):
        with pytest.raises(ValueError, match="kappa"):
            SweepConfig(mode="sum", x_grid=GridSpec(1.0, 2.0, 3), beta=0.0, y=1.0)
        with pytest.raises(ValueError, match="order"):
            SweepConfig(mode="eval", x_grid=GridSpec(1.0, 2.0, 3))
        with pytest.raises(ValueError, match="alpha"):
            SweepConfig(mode="oscillator", x_grid=GridSpec(1.0, 2.0, 3), n_terms=10,
                        t_grid=(0.0,))
        with pytest.raises(ValueError, match="t_grid"):
            SweepConfig(mode="oscillator", x_grid=GridSpec(1.0, 2.0, 3), alpha=0.5,
                        n_terms=10)
        with pytest.raises(ValueError, match="mode"):
            SweepConfig(mode="plot", x_grid=GridSpec(1.0, 2.0, 3))
        with pytest.raises(ValueError, match="format"):
            sum_config(fmt="xml")
        with pytest.raises(ValueError, match="jobs"):
            sum_config(jobs=0)
        with pytest.raises(ValueError):
            sum_config(kappa=-2.0)

    def test_round_trip_field_for_field(self):
        configs = [
            sum_config(),
            sum_config(mode="sharpness", x_grid=GridSpec(15.0, 60.0, 40, log=True),
                       y=1.0, out="r.csv", fmt="json", jobs=3, force=True),
            SweepConfig(mode="eval", x_grid=GridSpec(-5.0, 5.0, 21), order=7),
            SweepConfig(mode="oscillator", x_grid=GridSpec(0.0, 8.0, 80), alpha=0.5,
                        n_terms=400, t_grid=DEFAULT_T_GRID, fixture="osc"),
        ]
        for config in configs:
            assert SweepConfig.from_dict(config.to_dict()) == config

    def test_fixture_id_stable_and_output_independent(self):
        a = sum_config()
        b = sum_config(out="elsewhere.csv", fmt="json", jobs=7)
        c = sum_config(y=0.75)
        assert a.fixture_id() == b.fixture_id()
        assert a.fixture_id() != c.fixture_id()


class TestRun:
    def test_eval_rows(self):
        config = SweepConfig(mode="eval", x_grid=GridSpec(-2.0, 2.0, 5), order=3)
        report = run(config)
        assert report.columns == ("x", "sign", "log_magnitude", "value", "error")
        assert len(report.rows) == 5
        assert not report.error_rows
        for row in report.rows:
            want = hermite_exact(3, row[0])
            assert row[1] == want.sign
            assert row[3] == pytest.approx(want.to_float(), rel=1e-14, abs=1e-300)

    def test_sum_matches_naive_oracle(self):
        report = run(sum_config(x_grid=GridSpec(1.0, 3.0, 3)))
        row = report.rows[-1]
        assert row[0] == 3.0
        assert row[1] == pytest.approx(naive_weighted_sum(3.0, 1.0, 0.25, 0.5), rel=1e-10)

    def test_envelope_power_column_vanishes_at_quarter_beta(self):
        config = sum_config(mode="envelope", x_grid=GridSpec(2.0, 40.0, 6))
        report = run(config)
        power = report.columns.index("x_power")
        assert all(row[power] == 0.0 for row in report.rows)
        value = report.columns.index("value")
        params = SumParams(1.0, 0.25, 0.5)
        for row in report.rows:
            assert row[value] == pytest.approx(
                envelope(row[0], params).to_float(), rel=1e-14, abs=1e-300
            )

    def test_nmax_rows_and_errors(self):
        config = SweepConfig(mode="nmax", x_grid=GridSpec(3.0, 30.0, 4), y=0.25)
        report = run(config)
        assert len(report.rows) == 4
        assert report.error_rows == [0]
        good = report.rows[-1]
        profile = find_nmax(30.0, 0.25)
        assert good[1] == pytest.approx(profile.n_max, rel=1e-12)
        assert "ValueError" in report.rows[0][-1]

    def test_sharpness_summary(self):
        config = sum_config(mode="sharpness", y=1.0,
                            x_grid=GridSpec(15.0, 40.0, 8, log=True))
        report = run(config)
        assert len(report.rows) == 8
        assert set(report.summary) == {"slope", "ratio_min", "ratio_max",
                                       "restricted_ratio_min"}
        assert abs(report.summary["slope"]) < 0.05

    def test_sharpness_bad_grid_raises(self):
        config = sum_config(mode="sharpness", y=0.25, x_grid=GridSpec(2.0, 6.0, 4))
        with pytest.raises(ValueError):
            run(config)

    def test_oscillator_grid_product(self):
        config = SweepConfig(mode="oscillator", x_grid=GridSpec(0.0, 2.0, 3),
                             alpha=0.5, n_terms=100, t_grid=(0.0, 0.25, 0.5))
        report = run(config)
        assert len(report.rows) == 9
        # x outer, t inner ordering
        assert [(r[0], r[1]) for r in report.rows[:4]] == [
            (0.0, 0.0), (0.0, 0.25), (0.0, 0.5), (1.0, 0.0)]
        re_col = report.columns.index("phi_re")
        flip = {(r[0], r[1]): r[re_col] for r in report.rows}
        for x in (0.0, 1.0, 2.0):
            assert flip[(x, 0.5)] == pytest.approx(-flip[(x, 0.0)], rel=1e-12)
        assert report.summary["decay_constant"] > 0.0

    def test_deterministic_and_jobs_invariant(self):
        config = sum_config(x_grid=GridSpec(1.0, 30.0, 12), jobs=1)
        text_serial = render(run(config))
        text_again = render(run(config))
        assert text_serial == text_again
        parallel = sum_config(x_grid=GridSpec(1.0, 30.0, 12), jobs=4)
        # jobs is execution detail: strip the config echo before comparing
        body = lambda s: [l for l in s.splitlines() if not l.startswith("#")]
        assert body(render(run(parallel))) == body(text_serial)


class TestFormats:
    def test_csv_full_precision_round_trip(self):
        report = run(sum_config(x_grid=GridSpec(1.0, 7.0, 4)))
        header, rows = parse_csv(to_csv(report))
        value = header.index("value")
        for text_row, row in zip(rows, report.rows):
            assert float(text_row[value]) == row[1]

    def test_csv_uses_crlf_and_17_digits(self):
        report = run(sum_config(x_grid=GridSpec(1.0, 2.0, 2)))
        text = to_csv(report)
        assert "\r\n" in text
        header, rows = parse_csv(text)
        mantissa = rows[0][header.index("value")].split("e")[0]
        digits = mantissa.replace("-", "").replace(".", "")
        assert len(digits) == 17

    def test_log_column_survives_underflow(self):
        # at x = 60, y = 0.5 the sum is e^(-831): value column underflows
        # to 0, the log-magnitude column keeps the number readable
        report = run(sum_config(x_grid=GridSpec(59.0, 60.0, 2)))
        header, rows = parse_csv(to_csv(report))
        value = float(rows[1][header.index("value")])
        log_mag = float(rows[1][header.index("log_magnitude")])
        assert value == 0.0
        assert -840.0 < log_mag < -820.0

    def test_json_document(self):
        report = run(sum_config(fmt="json", x_grid=GridSpec(1.0, 4.0, 3)))
        doc = json.loads(to_json(report))
        assert doc["config"]["mode"] == "sum"
        assert doc["columns"] == ["x", "value", "log_magnitude", "error"]
        assert len(doc["rows"]) == 3
        assert SweepConfig.from_dict(doc["config"]) == report.config

    def test_json_handles_nonfinite(self):
        config = SweepConfig(mode="nmax", x_grid=GridSpec(3.0, 30.0, 3), y=0.25,
                             fmt="json")
        doc = json.loads(to_json(run(config)))
        assert doc["rows"][0][1] == "nan"


class TestFixtures:
    def fixture_config(self, **overrides):
        base = dict(mode="sharpness", y=1.0, x_grid=GridSpec(15.0, 40.0, 6, log=True))
        base.update(overrides)
        return sum_config(**base)

    def test_calibrate_writes_fixture(self, tmp_path, monkeypatch):
        monkeypatch.setenv("HERMITE_DECAY_FIXTURE_DIR", str(tmp_path))
        path = calibrate(self.fixture_config())
        assert os.path.dirname(path) == str(tmp_path)
        with open(path) as handle:
            doc = json.load(handle)
        assert doc["mode"] == "sharpness"
        assert len(doc["data"]["ratio"]) == 6
        assert "slope" in doc["summary"]

    def test_calibrate_rejects_pointwise_modes(self):
        with pytest.raises(ValueError):
            calibrate(sum_config())

    def test_overwrite_protection(self, tmp_path, monkeypatch):
        monkeypatch.setenv("HERMITE_DECAY_FIXTURE_DIR", str(tmp_path))
        calibrate(self.fixture_config())
        with pytest.raises(FileExistsError):
            calibrate(self.fixture_config())
        calibrate(self.fixture_config(force=True))

    def test_refreeze_is_byte_identical(self, tmp_path, monkeypatch):
        monkeypatch.setenv("HERMITE_DECAY_FIXTURE_DIR", str(tmp_path))
        path = calibrate(self.fixture_config())
        first = open(path, "rb").read()
        calibrate(self.fixture_config(force=True))
        assert open(path, "rb").read() == first

    def test_compare_detects_perturbation(self, tmp_path, monkeypatch):
        monkeypatch.setenv("HERMITE_DECAY_FIXTURE_DIR", str(tmp_path))
        path = calibrate(self.fixture_config())
        with open(path) as handle:
            fixture = json.load(handle)
        clean = run(self.fixture_config())
        assert compare_to_fixture(clean, fixture) == []
        # a 1% envelope perturbation blows through the ratio band
        perturbed = run(self.fixture_config(y=1.01))
        problems = compare_to_fixture(perturbed, fixture)
        assert problems
        assert any("ratio" in p for p in problems)

    def test_compare_detects_grid_change(self, tmp_path, monkeypatch):
        monkeypatch.setenv("HERMITE_DECAY_FIXTURE_DIR", str(tmp_path))
        path = calibrate(self.fixture_config())
        with open(path) as handle:
            fixture = json.load(handle)
        other = run(self.fixture_config(x_grid=GridSpec(16.0, 40.0, 6, log=True)))
        assert compare_to_fixture(other, fixture) == ["x grid differs from fixture"]

    def test_fixture_path_resolution(self, monkeypatch):
        monkeypatch.setenv("HERMITE_DECAY_FIXTURE_DIR", "/some/dir")
        assert fixture_path("band") == "/some/dir/band.json"
        assert fixture_path("explicit/file.json") == "explicit/file.json"
        monkeypatch.delenv("HERMITE_DECAY_FIXTURE_DIR")
        assert fixture_path("band") == os.path.join("fixtures", "band.json")


class TestMainExitCodes:
    def test_success(self, capsys):
        rc = main(["sum", "--x-min", "1", "--x-max", "3", "--x-count", "3"])
        out = capsys.readouterr().out
        assert rc == 0
        assert "x,value,log_magnitude,error" in out

    def test_config_error(self, capsys):
        rc = main(["sum", "--kappa", "-1", "--x-min", "1", "--x-max", "2"])
        err = capsys.readouterr().err
        assert rc == 1
        assert "config error" in err and "kappa" in err

    def test_sharpness_bad_grid_is_config_error(self, capsys):
        rc = main(["sharpness", "--y", "0.25", "--x-min", "2", "--x-max", "6",
                   "--x-count", "4"])
        assert rc == 1
        assert "config error" in capsys.readouterr().err

    def test_numeric_failure(self, capsys):
        rc = main(["nmax", "--y", "0.25", "--x-min", "3", "--x-max", "30",
                   "--x-count", "4"])
        captured = capsys.readouterr()
        assert rc == 2
        assert "numeric failure" in captured.err
        assert "ValueError" in captured.out  # embedded in the row, not hidden

    def test_eval_order_flag(self, capsys):
        rc = main(["eval", "--order", "3", "--x-min", "-1", "--x-max", "1",
                   "--x-count", "3"])
        out = capsys.readouterr().out
        assert rc == 0
        want = hermite_exact(3, 1.0).to_float()
        assert f"{want:.16e}" in out

    def test_out_file_and_determinism(self, tmp_path, capsys):
        target = tmp_path / "report.csv"
        argv = ["sum", "--x-min", "1", "--x-max", "10", "--x-count", "6",
                "--out", str(target)]
        assert main(argv) == 0
        first = target.read_bytes()
        assert main(argv) == 0
        assert target.read_bytes() == first
        assert capsys.readouterr().out == ""

    def test_fixture_mismatch_exit_code(self, tmp_path, monkeypatch, capsys):
        monkeypatch.setenv("HERMITE_DECAY_FIXTURE_DIR", str(tmp_path))
        base = ["--kappa", "1", "--beta", "0.25", "--x-min", "15", "--x-max", "40",
                "--x-count", "6", "--x-log"]
        assert main(["calibrate", "sharpness", "--y", "1.0", *base]) == 0
        name = os.path.basename(capsys.readouterr().out.strip())[:-5]
        out = str(tmp_path / "run.csv")
        rc = main(["sharpness", "--y", "1.0", *base, "--fixture", name, "--out", out])
        assert rc == 0
        rc = main(["sharpness", "--y", "1.01", *base, "--fixture", name, "--out", out])
        assert rc == 3
        assert "fixture mismatch" in capsys.readouterr().err

    def test_calibrate_overwrite_exit_code(self, tmp_path, monkeypatch, capsys):
        monkeypatch.setenv("HERMITE_DECAY_FIXTURE_DIR", str(tmp_path))
        argv = ["calibrate", "nmax", "--y", "0.5", "--x-min", "20", "--x-max", "60",
                "--x-count", "5"]
        assert main(argv) == 0
        capsys.readouterr()
        assert main(argv) == 1
        assert "--force" in capsys.readouterr().err
        assert main([*argv, "--force"]) == 0

    def test_missing_fixture_is_config_error(self, tmp_path, monkeypatch, capsys):
        monkeypatch.setenv("HERMITE_DECAY_FIXTURE_DIR", str(tmp_path))
        rc = main(["sum", "--x-min", "1", "--x-max", "2", "--x-count", "2",
                   "--fixture", "absent", "--out", str(tmp_path / "o.csv")])
        assert rc == 1
        assert "cannot read fixture" in capsys.readouterr().err


class TestCheckedInFixtures:
    """The calibration files under tests/fixtures reproduce on a fresh run.

    These are the frozen reference sweeps the package ships with; a
    mismatch means numerical behavior drifted since they were cut.
    """

    FIXTURE_DIR = os.path.join(os.path.dirname(__file__), "fixtures")

    def test_sharpness_default_reproduces(self, tmp_path):
        rc = main([
            "sharpness", "--kappa", "1", "--beta", "0.25", "--y", "0.5",
            "--x-min", "15", "--x-max", "60", "--x-count", "40", "--x-log",
            "--fixture", os.path.join(self.FIXTURE_DIR, "sharpness-default.json"),
            "--out", str(tmp_path / "sharpness.csv"),
        ])
        assert rc == 0

    def test_nmax_y05_reproduces(self, tmp_path):
        rc = main([
            "nmax", "--y", "0.5",
            "--x-min", "20", "--x-max", "200", "--x-count", "46",
            "--fixture", os.path.join(self.FIXTURE_DIR, "nmax-y05.json"),
            "--out", str(tmp_path / "nmax.csv"),
        ])
        assert rc == 0
