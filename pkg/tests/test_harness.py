"""Tests for configs, the experiment harness, and the CLI."""

import json
import os

import numpy as np
import pytest

import viscogreen.harness as harness
from viscogreen.cli import main
from viscogreen.config import ExperimentConfig, default_config, load_config

CONFIG_TEXT = """
[run]
schema = 1
scenario = localize
seed = 3

[medium]
rho = 1000.0
c_p = 2400.0
c_s = 600.0
nu_s = 0.2
y = 2.0

[geometry]
xi = 0.01 0.0 0.0
array_radius = 0.05
n_receivers = 16

[grids]
n = 8192
omega_max = 1.6e6
voxel = 5e-4
half_extent = 0.021
"""


class TestConfig:
    def test_ini_round_trip(self, tmp_path):
        path = tmp_path / "run.ini"
        path.write_text(CONFIG_TEXT)
        cfg = load_config(str(path))
        assert cfg.scenario == "localize"
        assert cfg.seed == 3
        assert cfg.medium["c_s"] == 600.0
        assert np.allclose(cfg.geometry["xi"], [0.01, 0.0, 0.0])
        assert cfg.grids["n"] == 8192

    def test_unknown_schema_rejected(self, tmp_path):
        path = tmp_path / "run.ini"
        path.write_text("[run]\nschema = 2\nscenario = fig1\n")
        with pytest.raises(ValueError):
            load_config(str(path))

    def test_unknown_section_rejected(self, tmp_path):
        path = tmp_path / "run.ini"
        path.write_text("[run]\nscenario = fig1\n[banana]\nx = 1\n")
        with pytest.raises(ValueError):
            load_config(str(path))

    def test_unknown_scenario_rejected(self):
        with pytest.raises(ValueError):
            ExperimentConfig(scenario="fig9")

    def test_overrides_win(self, tmp_path):
        path = tmp_path / "run.ini"
        path.write_text(CONFIG_TEXT)
        cfg = load_config(str(path), overrides={"medium.c_s": 10.0, "medium.y": None})
        assert cfg.medium["c_s"] == 10.0
        assert cfg.medium["y"] == 2.0  # None overrides are ignored

    def test_make_medium_applies_defaults(self):
        med = default_config("fig1").make_medium(nu_s=0.2, y=1.5)
        assert med.c_s == 1.0 and med.nu_s == 0.2 and med.y == 1.5


class TestHarnessRuns:
    def test_fig1_report_and_outputs(self, tmp_path):
        out = str(tmp_path / "fig1")
        report = harness.run_fig1(ExperimentConfig(scenario="fig1"), out)
        assert report["passed"]
        manifest = json.load(open(os.path.join(out, "manifest.json")))
        assert manifest["schema"] == 1
        assert "fig1.csv" in manifest["outputs"]
        data = np.genfromtxt(os.path.join(out, "fig1.csv"), delimiter=",", names=True)
        assert set(data.dtype.names) == {"t", "elastic", "y15", "y20", "y25"}
        assert os.path.exists(os.path.join(out, "plot_fig1.py"))

    def test_manifest_precedes_data(self, tmp_path, monkeypatch):
        # a crash after the manifest leaves a detectable partial run
        out = str(tmp_path / "partial")

        def boom(*a, **k):
            raise RuntimeError("disk full")

        monkeypatch.setattr(harness, "_write_csv", boom)
        with pytest.raises(RuntimeError):
            harness.run_fig1(ExperimentConfig(scenario="fig1"), out)
        assert os.path.exists(os.path.join(out, "manifest.json"))
        assert not os.path.exists(os.path.join(out, "fig1.csv"))

    def test_fig3_deterministic_outputs(self, tmp_path):
        outs = []
        for name in ("a", "b"):
            out = str(tmp_path / name)
            harness.run_fig3(ExperimentConfig(scenario="fig3"), out)
            outs.append(out)
        for fname in ("fig3.csv", "manifest.json"):
            a = open(os.path.join(outs[0], fname), "rb").read()
            b = open(os.path.join(outs[1], fname), "rb").read()
            assert a == b

    def test_kk_check_report(self, tmp_path):
        cfg = ExperimentConfig(scenario="kk")
        report = harness.run_kk_check(cfg, str(tmp_path / "kk"), n_doublings=1)
        assert report["passed"]
        assert len(report["residuals"]) == 2


class TestCli:
    def test_fig3_exit_zero_and_report(self, tmp_path, capsys):
        out = str(tmp_path / "fig3")
        assert main(["fig3", "--out", out]) == 0
        assert "[PASS]" in capsys.readouterr().out
        report = json.load(open(os.path.join(out, "report.json")))
        assert report["passed"]

    def test_kk_flag_overrides(self, tmp_path):
        out = str(tmp_path / "kk")
        assert main(["kk-check", "--out", out, "--doublings", "1", "--nu-s", "0.1"]) == 0
        manifest = json.load(open(os.path.join(out, "manifest.json")))
        assert manifest["medium"]["nu_s"] == 0.1

    def test_missing_config_exits_two(self, tmp_path, capsys):
        assert main(["fig3", "--config", str(tmp_path / "none.ini"), "--out", str(tmp_path)]) == 2
        assert "error" in capsys.readouterr().err

    def test_green_subcommand(self, tmp_path):
        out = str(tmp_path / "green")
        assert main(["green", "--out", out, "--nu-s", "0.2", "--r", "0.015", "--n", "1024"]) == 0
        data = np.genfromtxt(os.path.join(out, "green.csv"), delimiter=",", names=True)
        assert "g11" in data.dtype.names and len(data) == 1024

    def test_correct_subcommand_round_trip(self, tmp_path):
        t = np.arange(1024) * (4.0 / 1024)
        trace = np.exp(-50.0 * (t - 1.0) ** 2)
        src = tmp_path / "trace.csv"
        np.savetxt(src, np.column_stack([t, trace]), delimiter=",", header="t,value", comments="")
        out = str(tmp_path / "corr")
        assert main(["correct", str(src), "--out", out, "--nu-s", "0.0"]) == 0
        data = np.genfromtxt(os.path.join(out, "corrected.csv"), delimiter=",", names=True)
        assert np.allclose(data["corrected"], trace, atol=1e-12)
