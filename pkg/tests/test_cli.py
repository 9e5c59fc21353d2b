import json

from typer.testing import CliRunner

from battery_cli import app
from tests.helpers import read_csv

runner = CliRunner()

SMALL = ["--dim", "8", "--jobs", "1", "--set", "tau_stop=2", "--set", "tau_count=21"]


def invoke(tmp_path, *args):
    return runner.invoke(app, ["--out", str(tmp_path), *SMALL, *args])


def test_spectrum(tmp_path):
    result = invoke(tmp_path, "--preset", "fig1", "spectrum", "--kerr")
    assert result.exit_code == 0, result.output
    rows = read_csv(tmp_path / "spectrum.csv")
    assert "E_n_kerr" in rows[0]
    assert len(rows) == 21 * 31


def test_charge_with_config_file(tmp_path):
    config = tmp_path / "run.toml"
    config.write_text('sweep_param = "n_s"\nsweep_values = [0.0, 2.0]\n', encoding="utf-8")
    result = invoke(tmp_path, "--config", str(config), "charge")
    assert result.exit_code == 0, result.output
    assert len(read_csv(tmp_path / "charge_summary.csv")) == 2


def test_json_format(tmp_path):
    result = invoke(tmp_path, "--format", "json", "steady")
    assert result.exit_code == 0, result.output
    assert json.loads((tmp_path / "steady.json").read_text())["columns"][2] == "E_ss"


def test_configuration_error(tmp_path):
    result = invoke(tmp_path, "--set", "sweep_param=frequency", "--set", "sweep_values=[1]", "charge")
    assert result.exit_code == 1


def test_missing_config_file(tmp_path):
    result = invoke(tmp_path, "--config", str(tmp_path / "absent.toml"), "charge")
    assert result.exit_code == 1


def test_numerical_failure(tmp_path):
    result = invoke(tmp_path, "--set", "gamma=0", "steady")
    assert result.exit_code == 2


def test_partial_sweep(tmp_path):
    result = invoke(tmp_path, "--set", "gamma_values=[0.0, 0.2]", "steady")
    assert result.exit_code == 3
    assert len(read_csv(tmp_path / "steady.csv")) == 1


def test_check_always_succeeds(tmp_path):
    result = invoke(tmp_path, "--set", "check_dim_step=2", "check")
    assert result.exit_code == 0, result.output
    assert (tmp_path / "check_report.json").exists()


def test_invalid_sweep_point_is_a_config_error(tmp_path):
    result = invoke(tmp_path, "--set", "sweep_param=n_s", "--set", "sweep_values=[-0.3, 0.3]", "charge")
    assert result.exit_code == 1
    assert isinstance(result.exception, SystemExit)
    assert "Traceback" not in result.output


def test_empty_charging_window_is_a_config_error(tmp_path):
    result = invoke(tmp_path, "--set", "tau_list=[0.0]", "maxenergy")
    assert result.exit_code == 1
    assert isinstance(result.exception, SystemExit)
    assert not (tmp_path / "maxenergy.csv").exists()
