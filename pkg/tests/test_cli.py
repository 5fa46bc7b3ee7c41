"""Config validation, presets, experiment dispatch and output determinism."""

import json
import math
from pathlib import Path

import numpy as np
import pytest

from mdce import SystemParams, TargetPair
from mdce.cli import (ConfigError, config_from_dict, config_to_dict, load_config,
                      main, run, write_csv)
from mdce.presets import preset, preset_names, resonant_params

QUICK_PULSE = {
    "experiment": "evolve",
    "params": {"omega_m": 0.3, "omega_a": 0.6976126445195819, "lam": 0.01, "g": 0.03,
               "kappa": 1e-4, "eta": 1e-4, "gamma": 1e-4},
    "dims": {"n_cav": 3, "n_mech": 3},
    "drive": {"kind": "ultrafast_gaussian", "amplitude": 1.0471975511965976,
              "sigma": 20.0, "t0": 50.0, "freq_mech": 0.3,
              "freq_atom": 0.6976126445195819},
    "integration": {"dt": 0.02, "t_end": 120.0, "store_every": 10},
}


def test_config_roundtrip_all_presets():
    for name in preset_names():
        cfg = preset(name)
        assert config_from_dict(config_to_dict(cfg)) == cfg


def test_config_validation_names_offending_field():
    with pytest.raises(ConfigError, match="params"):
        config_from_dict({"experiment": "evolve", "params": {"omega_m": -1}})
    with pytest.raises(ConfigError, match="missing"):
        config_from_dict({"experiment": "evolve"})
    with pytest.raises(ConfigError, match="unknown config fields"):
        config_from_dict({**QUICK_PULSE, "bogus": 1})
    with pytest.raises(ConfigError, match="experiment"):
        config_from_dict({**QUICK_PULSE, "experiment": "nope"})
    with pytest.raises(ConfigError, match="integration"):
        config_from_dict({**QUICK_PULSE, "integration": {"dt": -1, "t_end": 1.0}})


def test_preset_reference_values():
    fig5a = preset("fig5a")
    assert fig5a.drive.amplitude == pytest.approx(math.pi / 3)
    assert fig5a.params.kappa == fig5a.params.eta == fig5a.params.gamma == 1e-4
    assert fig5a.drive.sigma == pytest.approx(53.125, rel=1e-6)
    assert fig5a.drive.t0 == 100.0

    fig6a = preset("fig6a")
    assert fig6a.drive.kind == "continuous"
    assert fig6a.drive.amplitude == 12.0
    assert fig6a.params.kappa == fig6a.params.eta == pytest.approx(2.5e-3)
    assert fig6a.params.gamma == pytest.approx(2.5e-4)
    assert fig6a.drive.mech_enabled and fig6a.drive.atom_enabled

    fig6b = preset("fig6b")
    assert not fig6b.drive.mech_enabled
    assert fig6b.drive.atom_enabled

    sigma_ref = preset("fig7a").sweep.values
    assert sigma_ref[1] == pytest.approx(8 * sigma_ref[0]) and sigma_ref[2] == pytest.approx(16 * sigma_ref[0])
    assert preset("fig7b").sweep.values == (1 / 8000, 1 / 5000, 1 / 3000)
    assert preset("fig8").sweep.axis == "omega_m"

    with pytest.raises(KeyError):
        preset("fig99")


def test_evolve_all_drives_off_flat_csv(tmp_path):
    # couplings off as well: |g00> is then exactly stationary
    params = {**QUICK_PULSE["params"], "lam": 0.0, "g": 0.0}
    cfg_dict = {**QUICK_PULSE, "params": params, "drive": {"kind": "off"},
                "integration": {"dt": 0.02, "t_end": 50.0, "store_every": 25}}
    manifest = run(config_from_dict(cfg_dict), tmp_path)
    rows = (tmp_path / "trajectory.csv").read_text().strip().split("\n")
    assert rows[0] == "t,n_qubit,n_cav,n_mech,trace_err"
    for row in rows[1:]:
        _, nq, nc, nm, _ = row.split(",")
        assert float(nq) == 0.0 and float(nc) == 0.0 and float(nm) == 0.0
    assert "trajectory.csv" in manifest.outputs
    assert (tmp_path / "manifest.json").exists()


def test_rerun_is_byte_identical(tmp_path):
    cfg = config_from_dict(QUICK_PULSE)
    run(cfg, tmp_path / "r1")
    run(cfg, tmp_path / "r2")
    first = (tmp_path / "r1" / "trajectory.csv").read_bytes()
    second = (tmp_path / "r2" / "trajectory.csv").read_bytes()
    assert first == second


def test_fft_experiment_outputs(tmp_path):
    cfg_dict = {**QUICK_PULSE, "experiment": "fft",
                "integration": {"dt": 0.02, "t_end": 200.0, "store_every": 5}}
    run(config_from_dict(cfg_dict), tmp_path)
    spectrum_rows = (tmp_path / "spectrum_fft.csv").read_text().strip().split("\n")
    assert spectrum_rows[0] == "freq,magnitude"
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary["schema_version"] == 1
    assert "peaks_angular" in summary and "peaks_rate" in summary
    for angular, rate in zip(summary["peaks_angular"], summary["peaks_rate"]):
        assert rate == pytest.approx(angular / 2.0)


def test_crossing_experiment_csv(tmp_path):
    cfg = config_from_dict({
        "experiment": "crossing",
        "params": config_to_dict(preset("fig3"))["params"],
        "dims": {"n_cav": 6, "n_mech": 6},
        "pairs": [[0, 0]],
    })
    run(cfg, tmp_path)
    header, row = (tmp_path / "crossing.csv").read_text().strip().split("\n")
    assert header.startswith("n,m,omega_a_star,gap,predicted_gap")
    values = dict(zip(header.split(","), row.split(",")))
    assert abs(float(values["half_gap"]) - float(values["predicted_gap"]) / 2) \
        / (float(values["predicted_gap"]) / 2) < 0.1


def test_spectrum_experiment_csv(tmp_path):
    cfg = config_from_dict({
        "experiment": "spectrum",
        "params": config_to_dict(preset("fig3"))["params"],
        "dims": {"n_cav": 4, "n_mech": 4},
        "pairs": [[0, 0]],
        "scan": {"omega_a_min": 0.65, "omega_a_max": 0.75, "points": 11},
    })
    run(cfg, tmp_path)
    rows = (tmp_path / "spectrum_levels.csv").read_text().strip().split("\n")
    header = rows[0].split(",")
    assert header[0] == "omega_a"
    assert "track_e01_level" in header and "track_g10_overlap" in header
    assert len(rows) == 12


def test_sweep_crossing_with_jobs(tmp_path):
    cfg = config_from_dict({
        "experiment": "sweep",
        "params": config_to_dict(preset("fig3"))["params"],
        "dims": {"n_cav": 5, "n_mech": 5},
        "pairs": [[0, 0]],
        "sweep": {"axis": "lam", "values": [0.004, 0.01], "inner": "crossing"},
    })
    manifest = run(cfg, tmp_path, jobs=2)
    assert (tmp_path / "crossing_lam_00.csv").exists()
    assert (tmp_path / "crossing_lam_01.csv").exists()
    summary = json.loads((tmp_path / "sweep_summary.json").read_text())
    assert [p["value"] for p in summary["points"]] == [0.004, 0.01]
    assert "sweep_summary.json" in manifest.outputs


def test_perturb_cli_main(tmp_path, capsys):
    rc = main(["perturb", "--pair", "0", "0", "--out", str(tmp_path)])
    assert rc == 0
    report = (tmp_path / "perturb_report.txt").read_text()
    assert "|e01> <-> |g10>" in report
    assert "0.0011764" in report
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary["reports"][0]["coupling_closed"] == pytest.approx(-1.176470588e-3)


def test_preset_show(capsys):
    rc = main(["preset", "fig6a", "--show"])
    assert rc == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["experiment"] == "steady"
    assert payload["drive"]["amplitude"] == 12.0


def test_cli_error_paths(tmp_path, capsys):
    assert main(["evolve", "--out", str(tmp_path)]) == 2          # missing --config
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["evolve", "--config", str(bad), "--out", str(tmp_path)]) == 2
    mismatched = tmp_path / "mismatch.json"
    mismatched.write_text(json.dumps(QUICK_PULSE))
    assert main(["steady", "--config", str(mismatched), "--out", str(tmp_path)]) == 2


def test_snr_experiment_small_system(tmp_path):
    # fast-relaxing miniature system so both runs reach steady state quickly
    cfg = config_from_dict({
        "experiment": "snr",
        "params": {"omega_m": 0.3, "omega_a": 0.7, "lam": 0.01, "g": 0.03,
                   "kappa": 0.05, "eta": 0.05, "gamma": 0.02},
        "dims": {"n_cav": 3, "n_mech": 3},
        "drive": {"kind": "continuous", "amplitude": 2.0, "gamma_scale": 0.02,
                  "freq_mech": 0.3, "freq_atom": 0.7},
        "integration": {"dt": 0.02, "t_end": 600.0, "store_every": 20},
    })
    run(cfg, tmp_path)
    payload = json.loads((tmp_path / "snr.json").read_text())
    assert payload["n_both"] >= 0.0
    assert payload["n_atom_only"] >= 0.0
    if not payload["noise_floor"]:
        assert payload["eta"] == pytest.approx(
            (payload["n_both"] - payload["n_atom_only"]) / payload["n_atom_only"])
        assert payload["eta_raw"] == pytest.approx(payload["eta"] + 1.0, rel=1e-9)


def test_steady_experiment_outputs(tmp_path):
    cfg_dict = {**QUICK_PULSE, "experiment": "steady",
                "integration": {"dt": 0.02, "t_end": 150.0, "store_every": 10}}
    run(config_from_dict(cfg_dict), tmp_path)
    summary = json.loads((tmp_path / "summary.json").read_text())
    for name in ("n_qubit", "n_cav", "n_mech"):
        assert set(summary["steady_state"][name]) == {"value", "drift", "steady", "window"}


def test_checkpoint_written(tmp_path):
    cfg_dict = {**QUICK_PULSE, "checkpoint": True,
                "integration": {"dt": 0.02, "t_end": 50.0, "store_every": 25}}
    run(config_from_dict(cfg_dict), tmp_path)
    rho = np.load(tmp_path / "rho_final.npy")
    assert rho.shape == (18, 18)
    assert abs(np.trace(rho).real - 1.0) < 1e-8


def test_write_csv_formats_floats_deterministically(tmp_path):
    path = write_csv(tmp_path / "x.csv", ["a"], [[1 / 3], [float("inf")], [True]])
    assert path.read_text() == "a\n0.33333333333333331\ninf\n1\n"


def test_verify_flag_on_static_experiment(tmp_path):
    cfg = config_from_dict({
        "experiment": "crossing",
        "params": config_to_dict(preset("fig3"))["params"],
        "dims": {"n_cav": 6, "n_mech": 6},
        "pairs": [[0, 0]],
    })
    manifest = run(cfg, tmp_path, verify=True)
    assert manifest.convergence_checks
    assert all(c["passed"] for c in manifest.convergence_checks)
