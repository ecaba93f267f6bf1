"""End-to-end checks of the scenario runner, in process via main(argv)."""

import json
import math
import os

import pytest

from spinfc.cli import (
    EXIT_CONFIG,
    EXIT_DOMAIN,
    EXIT_OK,
    FAVORED_SWEEP,
    main,
)


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    for name in list(os.environ):
        if name.startswith("SPINFC_"):
            monkeypatch.delenv(name)


def _read_csv(path):
    lines = path.read_text(encoding="utf-8").splitlines()
    header = lines[0].split(",")
    rows = [line.split(",") for line in lines[1:]]
    return header, rows


class TestParsing:
    def test_version_flag(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["--version"])
        assert exc.value.code == 0
        assert "spinfc" in capsys.readouterr().out

    def test_requires_a_scenario(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main([])
        assert exc.value.code == 2

    def test_run_without_scenario_name_fails(self, tmp_path, capsys):
        assert main(["run", "--out", str(tmp_path)]) == EXIT_CONFIG
        assert "scenario" in capsys.readouterr().err

    def test_domain_error_exit_code(self, tmp_path, capsys):
        code = main(["fc-factors", "--n-spins", "0", "--out", str(tmp_path)])
        assert code == EXIT_DOMAIN
        assert "domain error" in capsys.readouterr().err


class TestFcFactors:
    def test_writes_full_table(self, tmp_path, capsys):
        code = main(
            ["fc-factors", "--n-spins", "6", "--hyperfine", "0.5",
             "--out", str(tmp_path)]
        )
        assert code == EXIT_OK
        header, rows = _read_csv(tmp_path / "fc_factors.csv")
        assert header == ["final_n", "initial_m", "fc_factor"]
        assert len(rows) == 49
        values = [float(r[2]) for r in rows]
        assert all(-1.0 <= v <= 1.0 for v in values)
        assert "wrote" in capsys.readouterr().out

    def test_out_directory_is_created(self, tmp_path):
        target = tmp_path / "deep" / "nested"
        code = main(
            ["fc-factors", "--n-spins", "2", "--hyperfine", "0.1",
             "--out", str(target)]
        )
        assert code == EXIT_OK
        assert (target / "fc_factors.csv").is_file()


class TestDeterminism:
    def test_repeated_runs_are_byte_identical(self, tmp_path):
        argv = ["spectrum", "--n-spins", "6", "--hyperfine", "0.5",
                "--points", "101"]
        a, b = tmp_path / "a", tmp_path / "b"
        assert main(argv + ["--out", str(a)]) == EXIT_OK
        assert main(argv + ["--out", str(b)]) == EXIT_OK
        for name in ("spectrum.csv", "spectrum_summary.json"):
            assert (a / name).read_bytes() == (b / name).read_bytes()

    def test_zero_values_are_normalized(self, tmp_path):
        code = main(
            ["dynamics", "--n-spins", "4", "--hyperfine", "0.3",
             "--time-points", "11", "--out", str(tmp_path)]
        )
        assert code == EXIT_OK
        _, rows = _read_csv(tmp_path / "trajectory.csv")
        assert rows[0][0] == "0"


class TestSpectrumScenario:
    def test_csv_and_summary_shape(self, tmp_path):
        code = main(
            ["spectrum", "--n-spins", "8", "--hyperfine", "0.9",
             "--points", "201", "--out", str(tmp_path)]
        )
        assert code == EXIT_OK
        header, rows = _read_csv(tmp_path / "spectrum.csv")
        assert header == [
            "delta_over_omega_nu",
            "intensity_rabi2_over_2omega_nu",
            "channel_m",
            "channel_n",
            "channel_rate_rabi2_over_2omega_nu",
        ]
        summary = json.loads((tmp_path / "spectrum_summary.json").read_text())
        kept = summary["channels_in_csv"]
        assert len(rows) == 201 * kept
        assert summary["grid"]["points"] == 201
        assert summary["peak"]["intensity"] > 0
        assert summary["integrated_intensity"] > 0
        assert summary["channel_count"] >= kept
        assert summary["model"]["n_spins"] == 8

    def test_channel_cap_limits_csv(self, tmp_path):
        code = main(
            ["spectrum", "--n-spins", "8", "--hyperfine", "0.9",
             "--points", "101", "--max-csv-channels", "2",
             "--out", str(tmp_path)]
        )
        assert code == EXIT_OK
        _, rows = _read_csv(tmp_path / "spectrum.csv")
        pairs = {(r[2], r[3]) for r in rows}
        assert len(pairs) == 2
        summary = json.loads((tmp_path / "spectrum_summary.json").read_text())
        assert summary["channels_in_csv"] == 2
        assert summary["channel_count"] > 2

    def test_half_width_flag_sets_grid(self, tmp_path):
        code = main(
            ["spectrum", "--n-spins", "4", "--hyperfine", "0.2",
             "--points", "11", "--half-width", "3", "--out", str(tmp_path)]
        )
        assert code == EXIT_OK
        summary = json.loads((tmp_path / "spectrum_summary.json").read_text())
        assert summary["grid"]["min_over_omega_nu"] == -3.0
        assert summary["grid"]["max_over_omega_nu"] == 3.0

    def test_thermal_scenario_with_kelvin_temperature(self, tmp_path):
        code = main(
            ["thermal-spectrum", "--n-spins", "6", "--hyperfine", "0.5",
             "--points", "101", "--temperature-k", "300",
             "--out", str(tmp_path)]
        )
        assert code == EXIT_OK
        summary = json.loads(
            (tmp_path / "thermal_spectrum_summary.json").read_text()
        )
        ratio = summary["model"]["temperature_ratio"]
        assert ratio == pytest.approx(41673238.246655144, rel=1e-12)

    def test_bad_grid_flags_are_config_errors(self, tmp_path, capsys):
        base = ["spectrum", "--n-spins", "4", "--hyperfine", "0.2",
                "--out", str(tmp_path)]
        assert main(base + ["--points", "1"]) == EXIT_CONFIG
        assert main(base + ["--half-width", "-2"]) == EXIT_CONFIG


class TestConfigPrecedence:
    def _write_config(self, tmp_path, body):
        path = tmp_path / "scenario.ini"
        path.write_text(body, encoding="utf-8")
        return str(path)

    def test_config_drives_a_full_run(self, tmp_path):
        out = tmp_path / "from_config"
        cfg = self._write_config(
            tmp_path,
            "[scenario]\nname = fc-factors\n\n"
            "[model]\nn_spins = 6\nhyperfine = 0.9\n\n"
            f"[output]\ndirectory = {out}\n",
        )
        assert main(["run", "--config", cfg]) == EXIT_OK
        _, rows = _read_csv(out / "fc_factors.csv")
        assert len(rows) == 49

    def test_flags_override_config(self, tmp_path):
        cfg = self._write_config(
            tmp_path, "[model]\nn_spins = 6\nhyperfine = 0.9\n"
        )
        out = tmp_path / "out"
        code = main(
            ["fc-factors", "--config", cfg, "--n-spins", "4",
             "--out", str(out)]
        )
        assert code == EXIT_OK
        _, rows = _read_csv(out / "fc_factors.csv")
        assert len(rows) == 25

    def test_env_overrides_config_but_not_flags(self, tmp_path, monkeypatch):
        cfg = self._write_config(tmp_path, "[model]\nn_spins = 6\n")
        monkeypatch.setenv("SPINFC_N_SPINS", "5")
        out_env = tmp_path / "env"
        assert main(["fc-factors", "--config", cfg, "--out", str(out_env)]) == EXIT_OK
        _, rows = _read_csv(out_env / "fc_factors.csv")
        assert len(rows) == 36
        out_flag = tmp_path / "flag"
        code = main(
            ["fc-factors", "--config", cfg, "--n-spins", "4",
             "--out", str(out_flag)]
        )
        assert code == EXIT_OK
        _, rows = _read_csv(out_flag / "fc_factors.csv")
        assert len(rows) == 25

    def test_scenario_flag_overrides_nothing_needed(self, tmp_path):
        assert main(["run", "--scenario", "favored", "--out", str(tmp_path)]) == EXIT_OK
        assert (tmp_path / "favored_levels.csv").is_file()

    @pytest.mark.parametrize(
        "body",
        [
            "[model]\ncoupling = 1\n",
            "[mystery]\nx = 1\n",
            "[DEFAULT]\nn_spins = 4\n",
            "[model]\nn_spins = abc\n",
            "[model]\ntemperature = 5\ntemperature_k = 300\n",
            "[model]\npreset = other\n",
        ],
    )
    def test_bad_configs_exit_with_config_code(self, tmp_path, body, capsys):
        cfg = self._write_config(tmp_path, body)
        code = main(["fc-factors", "--config", cfg, "--out", str(tmp_path)])
        assert code == EXIT_CONFIG
        assert "config error" in capsys.readouterr().err

    def test_missing_config_file(self, tmp_path, capsys):
        code = main(
            ["fc-factors", "--config", str(tmp_path / "absent.ini"),
             "--out", str(tmp_path)]
        )
        assert code == EXIT_CONFIG

    def test_unrecognized_env_variable(self, tmp_path, monkeypatch, capsys):
        monkeypatch.setenv("SPINFC_FOO", "1")
        code = main(["fc-factors", "--out", str(tmp_path)])
        assert code == EXIT_CONFIG
        assert "SPINFC_FOO" in capsys.readouterr().err


class TestOtherScenarios:
    def test_favored_table(self, tmp_path):
        assert main(["favored", "--out", str(tmp_path)]) == EXIT_OK
        header, rows = _read_csv(tmp_path / "favored_levels.csv")
        assert header[0] == "hyperfine_over_omega_nu"
        assert [float(r[0]) for r in rows] == list(FAVORED_SWEEP)
        for row in rows:
            assert row[1] == row[5]  # closed form agrees with brute force

    def test_fc_sweep_table(self, tmp_path):
        code = main(
            ["fc-sweep", "--n-spins", "10", "--sweep-points", "5",
             "--max-final", "2", "--out", str(tmp_path)]
        )
        assert code == EXIT_OK
        header, rows = _read_csv(tmp_path / "fc_sweep.csv")
        assert header == [
            "hyperfine_over_omega_nu",
            "final_n",
            "exact_abs_factor",
            "bosonic_abs_factor",
        ]
        assert len(rows) == 15
        couplings = sorted({float(r[0]) for r in rows})
        assert couplings == pytest.approx([0.0, 0.5, 1.0, 1.5, 2.0])

    def test_hp_compare_summary(self, tmp_path):
        code = main(
            ["hp-compare", "--n-spins", "50", "--hyperfine", "0.2",
             "--out", str(tmp_path)]
        )
        assert code == EXIT_OK
        summary = json.loads((tmp_path / "hp_compare_summary.json").read_text())
        assert summary["poisson_mean"] == pytest.approx(0.5, rel=1e-12)
        assert summary["displacement"] == pytest.approx(
            math.sqrt(0.5), rel=1e-12
        )
        assert summary["max_prob_gap"] < 0.01
        assert summary["favored_exact"] == 0
        assert summary["favored_bosonic"] == 0

    def test_dynamics_summary(self, tmp_path):
        code = main(
            ["dynamics", "--n-spins", "8", "--hyperfine", "0.3",
             "--time-points", "201", "--time-max", "12",
             "--out", str(tmp_path)]
        )
        assert code == EXIT_OK
        _, rows = _read_csv(tmp_path / "trajectory.csv")
        assert len(rows) == 201
        summary = json.loads((tmp_path / "dynamics_summary.json").read_text())
        assert summary["max_closed_form_deviation"] < 1e-8
        assert summary["jx_drift"] < 1e-9
        assert summary["period_measured_omega_nu"] == pytest.approx(
            summary["period_expected_omega_nu"], abs=1e-3
        )

    def test_validate_scenario(self, tmp_path, capsys):
        assert main(["validate", "--out", str(tmp_path)]) == EXIT_OK
        out = capsys.readouterr().out
        assert "checks passed" in out
        assert "FAIL" not in out
        report = json.loads((tmp_path / "validation_report.json").read_text())
        assert report["failed"] == 0
        assert report["total"] == len(report["checks"])
