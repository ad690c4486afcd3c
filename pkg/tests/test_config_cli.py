"""
运行配置、命令行解析、分派退出码与报告落盘
"""
import importlib
import json
import logging
import os

import pandas as pd
import pytest
from pydantic import ValidationError

from backend.app import cli
run_config_module = importlib.import_module("backend.app.config.run_config")
from backend.app.config.run_config import RunConfig, get_config, reset_config, update_config
from backend.app.core.config import DEFAULT_SEED, Settings, settings
from backend.app.core.exceptions import ConfigError, RieszLabError
from backend.app.core.log_config import setup_logging
from backend.app.models.experiment_models import ExperimentReport, ReportStatus
from backend.app.utils.report_writer import CSV_COLUMNS, load_report, report_frame, write_report


class TestRunConfig:

    def test_defaults(self):
        cfg = RunConfig()
        assert (cfg.d, cfg.i, cfg.N, cfg.T, cfg.y, cfg.p) == (2, 1, [4, 8, 16], 4.0, 1.0, [2.0])
        assert (cfg.paths, cfg.depth, cfg.L, cfg.M) == (100000, 8, 20.0, 256)
        assert cfg.seed == settings.SEED

    @pytest.mark.parametrize("values", [
        {"i": 3, "d": 2},
        {"N": [4, 4]},
        {"N": []},
        {"M": 100},
        {"p": [0.5]},
        {"experiment": "norm_comparison", "p": [1.0]},
        {"experiment": "plotting"},
        {"walk_mode": "decoupled", "delta": 0.1},
        {"walk_mode": "decoupled", "delta": 0.02, "theta": 0.05, "eps": 0.1},
        {"colour": "blue"},
    ])
    def test_invalid(self, values):
        with pytest.raises(ValidationError):
            RunConfig(**values)

    def test_decoupled(self):
        cfg = RunConfig(walk_mode="decoupled", delta=0.01, theta=0.05, eps=0.2)
        assert cfg.theta == 0.05

    def test_effective_excludes_machine_settings(self):
        effective = RunConfig(threads=4).effective()
        assert "threads" not in effective and "output_dir" not in effective
        assert effective["N"] == [4, 8, 16]

    def test_global_accessors(self):
        try:
            update_config(d=3, i=3)
            assert get_config().d == 3
            with pytest.raises(ValidationError):
                update_config(i=4)
        finally:
            reset_config()
        assert run_config_module.run_config == RunConfig()

    def test_seed_from_environment(self, monkeypatch):
        monkeypatch.setenv("RDL_SEED", "123")
        assert Settings().SEED == 123
        monkeypatch.delenv("RDL_SEED")
        assert Settings(_env_file=None).SEED == DEFAULT_SEED

    def test_seed_default_follows_settings(self, monkeypatch):
        monkeypatch.setattr(settings, "SEED", 99)
        assert RunConfig().seed == 99


class TestParseConfig:

    def test_empty_args(self):
        assert cli.parse_config([]) == RunConfig()

    def test_moment_suite_flags(self):
        cfg = cli.parse_config(["--experiment", "moments", "--d", "2", "--i", "1", "--N", "3",
                                "--mode", "enumeration"])
        assert (cfg.experiment, cfg.d, cfg.i, cfg.N, cfg.mode) == ("moments", 2, 1, [3], "enumeration")

    def test_lists_and_switches(self):
        cfg = cli.parse_config(["--p", "2", "4", "--y-sweep", "1", "8", "--no-bridge", "--coarse-integral"])
        assert cfg.p == [2.0, 4.0]
        assert cfg.y_sweep == [1.0, 8.0]
        assert cfg.bridge is False and cfg.coarse_integral is True

    def test_range_error(self):
        with pytest.raises(ValidationError):
            cli.parse_config(["--i", "3", "--d", "2"])

    def test_unknown_flag(self):
        with pytest.raises(SystemExit):
            cli.parse_config(["--colour", "blue"])

    def test_file_values_and_precedence(self, tmp_path):
        path = tmp_path / "run.ini"
        path.write_text("[run]\nexperiment = vector\nd = 3\nN = 2, 3 5\ny-sweep = 1 2\nbridge = false\n",
                        encoding="utf-8")
        cfg = cli.parse_config(["--config", str(path), "--d", "1"])
        assert cfg.experiment == "vector"
        assert cfg.d == 1
        assert cfg.N == [2, 3, 5]
        assert cfg.y_sweep == [1.0, 2.0]
        assert cfg.bridge is False
        assert cli.parse_config([], file=str(path)).d == 3

    def test_unknown_file_key(self, tmp_path):
        path = tmp_path / "run.ini"
        path.write_text("[run]\ncolour = blue\n", encoding="utf-8")
        with pytest.raises(ValidationError):
            cli.parse_config(["--config", str(path)])

    def test_malformed_file(self, tmp_path):
        missing_section = tmp_path / "flat.ini"
        missing_section.write_text("d = 2\n", encoding="utf-8")
        with pytest.raises(ConfigError):
            cli.parse_config(["--config", str(missing_section)])
        with pytest.raises(ConfigError):
            cli.parse_config(["--config", str(tmp_path / "absent.ini")])
        wrong_section = tmp_path / "other.ini"
        wrong_section.write_text("[other]\nd = 2\n", encoding="utf-8")
        with pytest.raises(ConfigError):
            cli.parse_config(["--config", str(wrong_section)])


class TestReportWriter:

    def _report(self) -> ExperimentReport:
        report = ExperimentReport(experiment="moments", parameters={"d": 2})
        report.add_estimate("N", 3, "var_ratio_x1", 1.0 / 3.0, exact=True)
        report.add_estimate("N", 3, "gap", 0.25, stderr=0.125, paths=100)
        report.add_check("demo", True, observed=0.0, threshold=1.0)
        return report

    def test_estimate_needs_stderr(self):
        with pytest.raises(ValidationError):
            ExperimentReport(experiment="x", parameters={}).add_estimate("N", 1, "gap", 0.1)

    def test_status_tracks_checks(self):
        report = self._report()
        assert report.status == ReportStatus.PASSED
        report.add_check("broken", False)
        assert report.status == ReportStatus.FAILED
        assert [c.criterion for c in report.failed_checks] == ["broken"]

    def test_frame(self):
        frame = report_frame(self._report())
        assert list(frame.columns) == CSV_COLUMNS
        assert frame["param"].tolist() == ["var_ratio_x1[N]", "gap[N]"]
        assert frame["exact"].tolist() == [1, 0]
        assert frame["stderr"].tolist() == [0.0, 0.125]

    def test_round_trip_and_csv(self, output_dir):
        report = self._report()
        path = write_report(report, output_dir, wall_clock_seconds=1.23456)
        assert os.path.basename(path).startswith("moments-")
        loaded = load_report(path)
        assert loaded == report
        assert loaded.timestamp.wall_clock_seconds == 1.235
        with open(os.path.join(path, "sweep.csv"), encoding="utf-8") as fh:
            assert fh.readline().strip() == "param,value,estimate,stderr,exact"
        frame = pd.read_csv(os.path.join(path, "sweep.csv"))
        assert frame["estimate"][0] == 1.0 / 3.0

    def test_same_second_runs_get_distinct_directories(self, output_dir):
        first = write_report(self._report(), output_dir)
        second = write_report(self._report(), output_dir)
        assert first != second


class TestDispatch:

    def test_passing_run(self, small_config, output_dir):
        cfg = small_config(experiment="operator_algebra", d=2, i=1)
        assert cli.dispatch(cfg) == cli.EXIT_OK
        runs = os.listdir(output_dir)
        assert len(runs) == 1 and runs[0].startswith("operator_algebra-")
        with open(os.path.join(output_dir, runs[0], "report.json"), encoding="utf-8") as fh:
            body = json.load(fh)
        assert body["parameters"] == cfg.effective()
        assert body["status"] == "PASSED"
        assert all(row["exact"] for row in body["estimates"])

    def test_rerun_is_identical_apart_from_timestamp(self, small_config, output_dir):
        cfg = small_config(experiment="transform_identity", d=2)
        assert cli.dispatch(cfg) == cli.EXIT_OK
        assert cli.dispatch(cfg) == cli.EXIT_OK
        bodies = []
        for run in sorted(os.listdir(output_dir)):
            with open(os.path.join(output_dir, run, "report.json"), encoding="utf-8") as fh:
                body = json.load(fh)
            body.pop("timestamp")
            bodies.append(body)
        assert bodies[0] == bodies[1]

    def test_failed_check_exit_status(self, small_config, monkeypatch):
        def failing(cfg):
            report = ExperimentReport(experiment=cfg.experiment, parameters=cfg.effective())
            report.add_check("always_fails", False, observed=1.0, threshold=0.0)
            return report
        monkeypatch.setattr(cli, "run_experiment", failing)
        assert cli.dispatch(small_config()) == cli.EXIT_CHECK_FAILED

    def test_library_error_exit_status(self, small_config, monkeypatch):
        def broken(cfg):
            raise RieszLabError("坏输入")
        monkeypatch.setattr(cli, "run_experiment", broken)
        assert cli.dispatch(small_config()) == cli.EXIT_CONFIG_ERROR

    def test_io_error_exit_status(self, small_config, tmp_path):
        blocker = tmp_path / "not_a_directory"
        blocker.write_text("", encoding="utf-8")
        cfg = small_config(experiment="operator_algebra", output_dir=str(blocker / "runs"))
        assert cli.dispatch(cfg) == cli.EXIT_IO_ERROR

    def test_main_rejects_invalid_config(self):
        assert cli.main(["--i", "3", "--d", "2"]) == cli.EXIT_CONFIG_ERROR

    def test_norm_comparison_rejects_p_one(self):
        assert cli.main(["--experiment", "norm_comparison", "--p", "1"]) == cli.EXIT_CONFIG_ERROR


def test_logging_to_file(tmp_path):
    log_file = tmp_path / "logs" / "lab.log"
    setup_logging("DEBUG", str(log_file))
    logging.getLogger("backend.app.test").debug("二进树深度检查")
    for handler in logging.getLogger().handlers:
        handler.flush()
    assert "二进树深度检查" in log_file.read_text(encoding="utf-8")
    setup_logging("INFO")
