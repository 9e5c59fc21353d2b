import json

import pytest

from core.config import RunConfig
from core.errors import ConfigError, NoRelaxation
from core.model import ModelParams
from tools.charge_tools import TRAJECTORY_COLUMNS, run_charge
from tools.check_tools import run_check
from tools.maxenergy_tools import max_energy_point, run_maxenergy, trend_violations
from tools.spectrum_tools import run_spectrum
from tools.steady_tools import run_steady
from tools.sweep import run_sweep
from tools.wigner_tools import run_wigner
from tests.helpers import read_csv
from utils.formatters import format_float, sidecar_path


def small_config(tmp_path, **values) -> RunConfig:
    base = {"dim": 8, "tau_stop": 4.0, "tau_count": 41, "jobs": 1, "outputs": tmp_path}
    return RunConfig(**{**base, **values})


def flaky_point(payload, threshold):
    if payload > threshold:
        raise NoRelaxation(f"payload {payload} above {threshold}")
    return payload * 2


def fragile_point(payload):
    return 1.0 / payload


class TestSweep:
    def test_all_points_succeed(self):
        result = run_sweep(flaky_point, [({"k": i}, i) for i in range(3)], args=(10,))
        assert result.exit_code == 0
        assert [o.value for o in result.outcomes] == [0, 2, 4]

    def test_partial_failure(self):
        result = run_sweep(flaky_point, [({"k": i}, i) for i in range(3)], args=(1,))
        assert result.exit_code == 3
        assert [o.index for o in result.failed] == [2]
        assert result.failed[0].failure_record()["error_type"] == "NoRelaxation"

    def test_total_failure_keeps_error_code(self):
        result = run_sweep(flaky_point, [({"k": 5}, 5)], args=(1,))
        assert result.exit_code == 2

    def test_unexpected_error_stays_with_its_point(self):
        result = run_sweep(fragile_point, [({"k": i}, float(i)) for i in range(3)])
        assert result.exit_code == 3
        assert [o.value for o in result.succeeded] == [1.0, 0.5]
        assert result.failed[0].failure_record()["error_type"] == "ZeroDivisionError"
        assert result.failed[0].exit_code == 2

    def test_empty_charging_window_is_recorded(self):
        args = (0.0, 11, 1e-3, 1e-9, 1e-12, "rk45")
        result = run_sweep(max_energy_point, [({"n_s": 0.0}, ModelParams(dim=6))], args=args)
        assert result.failed[0].error_type == "InvalidTimeGrid"
        assert result.exit_code == 1


class TestFormatting:
    @pytest.mark.parametrize("value,text", [
        (0.1, "0.10000000000000001"),
        (2.0, "2"),
        (7, "7"),
        (True, "1"),
        (1e-20, "9.9999999999999995e-21"),
    ])
    def test_format_float(self, value, text):
        assert format_float(value) == text

    def test_round_trip(self):
        for x in (0.1, 1 / 3, 2.0**-40, 123456.789):
            assert float(format_float(x)) == x


class TestSpectrumCommand:
    def test_table(self, tmp_path):
        config = small_config(tmp_path, sweep_param="n_s", sweep_values=[0.0, 1.0], spectrum_levels=4,
                              include_kerr=True)
        report = run_spectrum(config)
        rows = read_csv(tmp_path / "spectrum.csv")
        assert list(rows[0]) == ["n_s", "n", "E_n", "E_n_kerr"]
        assert len(rows) == 8
        assert rows[1] == {"n_s": "0", "n": "1", "E_n": "2", "E_n_kerr": "2"}
        assert rows[6]["E_n"] == format_float(2 + 2 / 3)
        assert report.exit_code == 0

    def test_sidecar(self, tmp_path):
        run_spectrum(small_config(tmp_path, spectrum_levels=3))
        meta = json.loads(sidecar_path(tmp_path / "spectrum.csv").read_text())
        assert meta["config"]["spectrum_levels"] == 3
        assert meta["config"]["drive_freq"] == pytest.approx(0.9)
        assert set(meta["columns"]) == {"n_s", "n", "E_n"}

    def test_json_format(self, tmp_path):
        run_spectrum(small_config(tmp_path, spectrum_levels=3, format="json"))
        document = json.loads((tmp_path / "spectrum.json").read_text())
        assert document["columns"] == ["n_s", "n", "E_n"]
        assert len(document["rows"]) == 3

    def test_reruns_are_identical(self, tmp_path):
        config = small_config(tmp_path, sweep_param="n_s", sweep_values=[0.3, 0.7])
        run_spectrum(config)
        first = (tmp_path / "spectrum.csv").read_bytes()
        run_spectrum(config)
        assert (tmp_path / "spectrum.csv").read_bytes() == first


class TestChargeCommand:
    def test_files(self, tmp_path):
        config = small_config(tmp_path, sweep_param="n_s", sweep_values=[0.0, 1.0])
        report = run_charge(config)
        assert report.exit_code == 0
        trajectory = read_csv(tmp_path / "trajectory_001.csv")
        assert list(trajectory[0]) == TRAJECTORY_COLUMNS
        assert len(trajectory) == 41
        assert trajectory[0]["energy"] == "0"
        summary = read_csv(tmp_path / "charge_summary.csv")
        assert [r["n_s"] for r in summary] == ["0", "1"]
        assert float(summary[0]["E_max"]) >= float(summary[0]["ergotropy_max"])
        meta = json.loads(sidecar_path(tmp_path / "trajectory_001.csv").read_text())
        assert meta["config"]["point"]["n_s"] == 1.0

    def test_truncation_column(self, tmp_path):
        run_charge(small_config(tmp_path, truncation_check=True, check_dim_step=2))
        summary = read_csv(tmp_path / "charge_summary.csv")
        assert float(summary[0]["truncation_delta"]) >= 0.0

    def test_worker_pool_matches_serial(self, tmp_path):
        values = {"sweep_param": "n_s", "sweep_values": [0.0, 0.5, 1.0]}
        run_charge(small_config(tmp_path / "serial", **values))
        run_charge(small_config(tmp_path / "pool", **{**values, "jobs": 2}))
        for k in range(3):
            name = f"trajectory_{k:03d}.csv"
            assert (tmp_path / "serial" / name).read_bytes() == (tmp_path / "pool" / name).read_bytes()


class TestMaxEnergyCommand:
    def test_table(self, tmp_path):
        config = small_config(tmp_path, sweep_param="n_s", sweep_values=[0.0, 1.0], gamma_values=[0.2, 0.4],
                              tau_stop=30.0, tau_count=151)
        report = run_maxenergy(config)
        rows = read_csv(tmp_path / "maxenergy.csv")
        assert list(rows[0]) == ["n_s", "gamma", "tau_star", "E_max"]
        assert len(rows) == 4
        meta = json.loads(sidecar_path(tmp_path / "maxenergy.csv").read_text())
        assert "boundary_maxima" in meta and "trend_violations" in meta
        assert report.summary["points"] == 4

    def test_grid_ending_at_zero_is_a_config_error(self, tmp_path):
        with pytest.raises(ConfigError):
            run_maxenergy(small_config(tmp_path, tau_list=[0.0]))
        with pytest.raises(ConfigError):
            run_steady(small_config(tmp_path, tau_count=1, compare_max_energy=True))
        assert run_steady(small_config(tmp_path, tau_count=1)).exit_code == 0

    def test_trend_violations(self):
        rows = [
            {"n_s": 0.0, "gamma": 0.2, "E_max": 1.0},
            {"n_s": 1.0, "gamma": 0.2, "E_max": 0.5},
            {"n_s": 0.0, "gamma": 0.4, "E_max": 1.2},
            {"n_s": 1.0, "gamma": 0.4, "E_max": 1.3},
        ]
        violations = trend_violations(rows)
        assert len(violations) == 3
        assert trend_violations(rows[:1]) == []


class TestWignerCommand:
    def test_snapshots(self, tmp_path):
        config = small_config(tmp_path, dim=10, snapshot_times=[0.0, 1.0], wigner_extent=2.0, wigner_points=11)
        report = run_wigner(config)
        assert report.exit_code == 0
        table = read_csv(tmp_path / "wigner_001.csv")
        assert list(table[0]) == ["re_beta", "im_beta", "W"]
        assert len(table) == 121
        grid = json.loads((tmp_path / "wigner_001_grid.json").read_text())
        assert grid["point"]["tau"] == 1.0
        assert len(grid["values"]) == 11
        summary = read_csv(tmp_path / "wigner_summary.csv")
        assert [r["tau"] for r in summary] == ["0", "1"]
        assert float(summary[0]["min_W"]) > 0

    def test_truncation_failure_is_reported(self, tmp_path):
        config = small_config(tmp_path, dim=4, alpha=2.0, gamma=0.01, snapshot_times=[0.0, 5.0],
                              wigner_points=5)
        report = run_wigner(config)
        assert report.exit_code == 3
        assert report.failures[0]["error_type"] == "TruncationInsufficient"


class TestSteadyCommand:
    def test_table(self, tmp_path):
        report = run_steady(small_config(tmp_path, sweep_param="n_s", sweep_values=[0.0, 1.0]))
        rows = read_csv(tmp_path / "steady.csv")
        assert list(rows[0]) == ["n_s", "gamma", "E_ss", "ergotropy_ss", "spectral_gap", "residual"]
        assert report.exit_code == 0

    def test_compare_with_charging_maximum(self, tmp_path):
        run_steady(small_config(tmp_path, compare_max_energy=True, tau_stop=20.0, tau_count=101))
        assert list(read_csv(tmp_path / "steady.csv")[0])[-1] == "E_max"

    def test_lossless_points_fail(self, tmp_path):
        report = run_steady(small_config(tmp_path, gamma_values=[0.0, 0.2]))
        assert report.exit_code == 3
        assert len(read_csv(tmp_path / "steady.csv")) == 1
        assert report.failures[0]["error_type"] == "NoRelaxation"
        assert run_steady(small_config(tmp_path, gamma=0.0)).exit_code == 2


class TestCheckCommand:
    def test_report(self, tmp_path):
        report = run_check(small_config(tmp_path, check_dim_step=2))
        document = json.loads((tmp_path / "check_report.json").read_text())
        checks = {c["name"]: c for c in document["checks"]}
        assert len(checks) == 6
        assert checks["taylor_first_order"]["passed"] is True
        assert checks["taylor_second_order"]["passed"] is True
        assert checks["integrators"]["passed"] is True
        assert report.exit_code == 0

    def test_two_levels_fail_truncation_and_skip_second_order(self, tmp_path):
        run_check(small_config(tmp_path, dim=2, check_dim_step=1))
        document = json.loads((tmp_path / "check_report.json").read_text())
        checks = {c["name"]: c for c in document["checks"]}
        assert checks["taylor_second_order"]["passed"] is None
        assert checks["truncation"]["passed"] is False
        assert checks["truncation"]["value"] > checks["truncation"]["threshold"]
