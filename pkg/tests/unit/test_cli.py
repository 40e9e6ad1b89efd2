import json
import logging

import pytest

from fdstates.cli import (
    EXIT_CONFIG_ERROR,
    EXIT_OK,
    EXIT_VERIFICATION_FAILED,
    build_parser,
    configure_logging,
    load_scenario,
    main,
)
from fdstates.report import RunReport


@pytest.fixture
def scenario_file(tmp_path):
    path = tmp_path / "scenario.json"
    path.write_text(
        json.dumps(
            {
                "name": "small",
                "order": 2,
                "eps": 0.05,
                "dim": 4,
                "duration": 20.0,
                "sample_count": 21,
            }
        )
    )
    return str(path)


@pytest.fixture
def failed_report():
    return RunReport(
        "verify",
        [],
        [],
        0.0,
        verification={"eps": 0.1, "bound": 1e-3, "max_deviation": {"2": 0.5}, "passed": False},
    )


class TestParser:
    def test_run_arguments(self):
        args = build_parser().parse_args(["run", "fig1", "--samples", "11", "--gamma", "0.1"])
        assert args.command == "run"
        assert args.scenario == "fig1"
        assert args.samples == 11
        assert args.gamma == 0.1
        assert args.out == "."

    def test_verify_defaults(self):
        args = build_parser().parse_args(["verify"])
        assert args.nmax == 3
        assert args.jobs == 1
        assert args.bound == pytest.approx(2e-2)

    def test_missing_command(self):
        with pytest.raises(SystemExit):
            build_parser().parse_args([])


class TestConfigureLogging:
    @pytest.mark.parametrize(
        "verbosity, level", [(0, logging.WARNING), (1, logging.INFO), (3, logging.DEBUG)]
    )
    def test_levels(self, mocker, verbosity, level):
        basic_config = mocker.patch("fdstates.cli.logging.basicConfig")
        configure_logging(verbosity)
        assert basic_config.call_args[1]["level"] == level


class TestLoadScenario:
    def test_file(self, scenario_file):
        assert load_scenario(scenario_file).name == "small"

    def test_preset(self):
        assert load_scenario("fig1").name == "fig1"


class TestMain:
    def test_presets(self, capsys):
        assert main(["presets"]) == EXIT_OK
        assert "fig1" in capsys.readouterr().out.split()

    def test_run_file(self, scenario_file, tmp_path, capsys):
        assert main(["run", scenario_file, "--out", str(tmp_path)]) == EXIT_OK
        assert (tmp_path / "small.csv").exists()
        assert (tmp_path / "small.json").exists()
        assert json.loads(capsys.readouterr().out)["name"] == "small"

    def test_run_preset_with_samples(self, tmp_path):
        assert main(["run", "fig1", "--out", str(tmp_path), "--samples", "11"]) == EXIT_OK
        lines = (tmp_path / "fig1.csv").read_text().splitlines()
        assert len(lines) == 12

    def test_samples_ignored_by_kicked_engine(self, tmp_path, caplog):
        args = ["run", "kicked", "--out", str(tmp_path), "--samples", "5"]
        with caplog.at_level(logging.WARNING, logger="fdstates.cli"):
            assert main(args) == EXIT_OK
        assert "--samples ignored" in caplog.text
        lines = (tmp_path / "kicked.csv").read_text().splitlines()
        assert len(lines) == 42

    def test_unknown_preset(self, tmp_path, capsys):
        assert main(["run", "no_such_preset", "--out", str(tmp_path)]) == EXIT_CONFIG_ERROR
        assert "error" in capsys.readouterr().err

    def test_malformed_file(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{")
        assert main(["run", str(path)]) == EXIT_CONFIG_ERROR

    def test_gamma_on_continuous_engine(self, scenario_file, tmp_path):
        args = ["run", scenario_file, "--out", str(tmp_path), "--gamma", "0.1"]
        assert main(args) == EXIT_CONFIG_ERROR

    def test_verify_passes(self, tmp_path, capsys):
        assert main(["verify", "--nmax", "2", "--out", str(tmp_path)]) == EXIT_OK
        assert "passed" in capsys.readouterr().out
        saved = json.loads((tmp_path / "verify.json").read_text())
        assert saved["verification"]["passed"]

    def test_verify_fails(self, mocker, failed_report):
        mocker.patch("fdstates.cli.verify_closed_forms", return_value=failed_report)
        assert main(["verify"]) == EXIT_VERIFICATION_FAILED

    def test_verify_order_out_of_range(self):
        assert main(["verify", "--nmax", "9"]) == EXIT_CONFIG_ERROR
