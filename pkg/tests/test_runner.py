"""Configs, presets, artifacts, determinism, sweeps, and the CLI."""

import os
from dataclasses import replace

import numpy as np
import pytest
import yaml

from fkslab.cli import main
from fkslab.runner import (
    ConfigError,
    RunConfig,
    SweepConfig,
    config_hash,
    load_run_config,
    preset,
    run,
    save_run_config,
    sweep,
)


def small_config(**over):
    base = RunConfig.from_dict(
        {
            "alpha": 1.0,
            "chi": 1.0,
            "frame": "physical",
            "grid": {"n": 256, "half_width": 20.0},
            "initial": {"family": "gaussian", "mass": 1.0, "scale": 1.0},
            "control": {"dt_max": 5e-3},
            "horizon": 0.3,
            "observation_interval": 0.05,
        }
    )
    return replace(base, **over) if over else base


def test_config_roundtrip(tmp_path):
    cfg = preset("subcritical-alpha1")
    path = tmp_path / "cfg.yaml"
    save_run_config(cfg, path)
    assert load_run_config(path) == cfg


def test_config_validation_rejects_preconditions():
    with pytest.raises(ConfigError):
        RunConfig.from_dict({"grid": {"n": 100, "half_width": 20.0}})
    with pytest.raises(ConfigError):
        RunConfig.from_dict({"alpha": 3.0})
    with pytest.raises(ConfigError):
        RunConfig.from_dict({"frame": "rescaled", "alpha": 0.5})
    with pytest.raises(ConfigError):
        RunConfig.from_dict({"initial": {"family": "cauchy", "mass": 1.0, "scale": 1.0}})
    with pytest.raises(ConfigError):
        RunConfig.from_dict({"horizon": -1.0})
    with pytest.raises(ConfigError):
        RunConfig.from_dict({"schema_version": 99})


def test_unknown_preset():
    with pytest.raises(ConfigError):
        preset("nope")


def test_run_writes_artifacts(tmp_path):
    out = str(tmp_path / "run")
    cfg = small_config(output_dir=out, keep_snapshots=True)
    result = run(cfg)
    assert result.trajectory.outcome == "completed"
    assert (tmp_path / "run" / "config.yaml").exists()
    assert (tmp_path / "run" / "diagnostics.csv").exists()
    assert (tmp_path / "run" / "criteria.csv").exists()
    assert (tmp_path / "run" / "summary").exists()
    snaps = os.listdir(tmp_path / "run" / "snapshots")
    assert len(snaps) == len(result.trajectory.rows)
    header = (tmp_path / "run" / "diagnostics.csv").read_text().splitlines()[0]
    assert header == "time,mass,l2,l_inv_alpha,l_inf,first_moment,i_lambda,min_value,tail_fraction"


def test_run_determinism_byte_identical(tmp_path):
    a, b = str(tmp_path / "a"), str(tmp_path / "b")
    run(small_config(output_dir=a))
    run(small_config(output_dir=b))
    for name in ("diagnostics.csv", "criteria.csv", "summary"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_config_hash_ignores_destination(tmp_path):
    h1 = config_hash(small_config(output_dir=str(tmp_path / "x")))
    h2 = config_hash(small_config(output_dir=str(tmp_path / "y")))
    assert h1 == h2


def test_sweep_degenerate_equals_run(tmp_path):
    base = small_config(output_dir=str(tmp_path / "sweep"))
    pts = sweep(SweepConfig(base=base, alphas=(1.0,), masses=(1.0,), scales=(1.0,)))
    assert len(pts) == 1
    assert pts[0].outcome == "completed"
    single = run(small_config())
    assert pts[0].outcome == single.trajectory.outcome
    assert np.isclose(pts[0].first_moment, single.trajectory.rows[0].first_moment)


def test_sweep_resume_does_not_rewrite(tmp_path):
    base = small_config(output_dir=str(tmp_path / "sweep"))
    cfg = SweepConfig(base=base, masses=(0.5, 1.0), scales=(1.0,))
    sweep(cfg)
    cell = tmp_path / "sweep" / "cell_a1_m0.5_s1"
    marker = cell / "summary"
    before = marker.read_bytes()
    stamp = os.path.getmtime(marker)
    sweep(cfg)
    assert marker.read_bytes() == before
    assert os.path.getmtime(marker) == stamp


def test_cli_run_preset_and_exit_codes(tmp_path, capsys):
    rc = main(["run", "--preset", "supercritical-alpha05", "--output-dir", str(tmp_path / "r")])
    out = capsys.readouterr().out
    assert rc == 0
    assert "outcome=blowup_detected" in out
    rc = main(["run", "--preset", "nope"])
    assert rc == 2
    rc = main(["run"])
    assert rc == 2


def test_cli_run_config_file(tmp_path, capsys):
    cfg = small_config()
    p = tmp_path / "cfg.yaml"
    save_run_config(cfg, p)
    rc = main(["run", "--config", str(p)])
    assert rc == 0
    assert "outcome=completed" in capsys.readouterr().out


def test_cli_resolution_exit_code(tmp_path):
    # force the step floor: dt_min far above the CFL step
    cfg = small_config(
        control=replace(small_config().control, dt_min=1.0, dt_max=2.0),
        horizon=5.0,
    )
    p = tmp_path / "cfg.yaml"
    save_run_config(cfg, p)
    rc = main(["run", "--config", str(p)])
    assert rc == 3


def test_cli_gns_and_testfn(tmp_path, capsys):
    rc = main(["gns", "--p", "2", "--alpha", "1", "--budget", "200", "--out", str(tmp_path / "g.csv")])
    assert rc == 0
    text = (tmp_path / "g.csv").read_text().splitlines()
    assert text[0] == "p,alpha,C_hat,trials,seed"
    rc = main(["testfn", "--alpha", "0.6", "--beta", "0.7", "--out", str(tmp_path / "tf.csv")])
    assert rc == 0
    assert (tmp_path / "tf.csv").read_text().splitlines()[0] == "x,phi,phi_prime,omega"
    rc = main(["gns", "--p", "0.5", "--alpha", "1"])
    assert rc == 2


def test_cli_sweep(tmp_path, capsys):
    doc = {
        "base": small_config(output_dir=str(tmp_path / "sw")).to_dict(),
        "axes": {"masses": [0.5, 1.0]},
        "parallelism": 1,
    }
    p = tmp_path / "sweep.yaml"
    with open(p, "w") as fh:
        yaml.safe_dump(doc, fh)
    rc = main(["sweep", "--config", str(p)])
    assert rc == 0
    phase = (tmp_path / "sw" / "phase.csv").read_text().splitlines()
    assert phase[0].startswith("alpha,mass,scale,first_moment")
    assert len(phase) == 3
