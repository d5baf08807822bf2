import json
import math
from pathlib import Path

import numpy as np
import pytest

from catswap.cli import load_config, main, resolve_time, run
from catswap.dynamics import timescales
from catswap.errors import ConfigError
from catswap.fileio import read_grid


# ------------------------------------------------------------ time grammar

def test_resolve_time_forms():
    ts = timescales(1.0, 25.0, 5)
    assert resolve_time("t_r/2N", ts, 5) == pytest.approx(math.pi)
    assert resolve_time("t_r/N", ts, 5) == pytest.approx(2 * math.pi)
    assert resolve_time("3/4*t_r", ts, 5) == pytest.approx(7.5 * math.pi)
    assert resolve_time("t_c", ts, 5) == pytest.approx(math.sqrt(2))
    assert resolve_time("t_r1", ts, 5) == pytest.approx(2 * math.pi)
    assert resolve_time("2*t_R", ts, 5) == pytest.approx(2 * math.pi / 5)
    assert resolve_time(1.25, ts, 5) == 1.25
    assert resolve_time("0", ts, 5) == 0.0
    with pytest.raises(ConfigError):
        resolve_time("t_r/x", ts, 5)
    with pytest.raises(ConfigError):
        resolve_time("revival", ts, 5)


# ---------------------------------------------------------- config parsing

def _write(tmp_path, payload):
    p = tmp_path / "cfg.json"
    p.write_text(json.dumps(payload))
    return p


def test_load_config_reports_json_position(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{"scenario": "custom",\n  broken\n}')
    with pytest.raises(ConfigError, match="line 2"):
        load_config(p)


def test_load_config_unknown_scenario(tmp_path):
    p = _write(tmp_path, {"scenario": "nope"})
    with pytest.raises(ConfigError, match="scenario"):
        load_config(p)


def test_load_config_field_types(tmp_path):
    p = _write(tmp_path, {"scenario": "custom",
                          "physics": {"n_bar": "many"}})
    with pytest.raises(ConfigError, match="physics.n_bar"):
        load_config(p)


def test_exit_codes(tmp_path, capsys):
    missing = tmp_path / "absent.json"
    assert main(["run", str(missing)]) == 1
    p = _write(tmp_path, {"scenario": "custom", "physics": {"N": 1, "n_bar": 1.0},
                          "numerics": {"n_max": 10}})
    # custom without t_final is a config error
    assert main(["run", str(p)]) == 1


def test_timescales_subcommand(capsys):
    assert main(["timescales", "--g", "1", "--nbar", "25", "--N", "5"]) == 0
    out = capsys.readouterr().out
    assert "revival = 31.4159265359" in out
    assert "first_revival = 6.28318530718" in out
    assert main(["timescales", "--g", "1", "--nbar", "0", "--N", "2"]) == 1


# ------------------------------------------------------------- scenarios

def _micro_custom(tmp_path, **over):
    payload = {
        "scenario": "custom",
        "physics": {"N": 1, "n_bar": 1.0, "z": 1.0, "g": 1.0, "gamma": 0.05,
                    "spin_state": "excited"},
        "numerics": {"n_max": 14, "dt": 0.01, "t_final": 1.0,
                     "snapshot_times": ["0"]},
        "output": {"grid_resolution": 31,
                   "observables": ["photon_number", "excitation"]},
    }
    for k, v in over.items():
        payload[k] = {**payload.get(k, {}), **v}
    return _write(tmp_path, payload)


def test_custom_scenario_outputs(tmp_path):
    cfg = _micro_custom(tmp_path)
    out = tmp_path / "out"
    written = run(cfg, out_dir=out)
    names = sorted(p.name for p in written)
    assert "series.csv" in names and "series.json" in names
    assert "snapshot_t0_field.csv" in names and "snapshot_t0_spin.csv" in names
    sidecar = json.loads((out / "snapshot_t0_field.json").read_text())
    assert "config_hash" in sidecar["metadata"]
    table = np.loadtxt(out / "series.csv", delimiter=",", skiprows=1)
    assert table.shape[1] == 3  # time + two observables


def test_custom_zero_horizon_emits_only_initial_snapshot(tmp_path):
    cfg = _micro_custom(tmp_path, numerics={"t_final": 0.0},
                        output={"observables": []})
    out = tmp_path / "out0"
    written = run(cfg, out_dir=out)
    grids = [p for p in written if "snapshot" in p.name]
    assert len(grids) == 4  # t0 field + spin, csv + json each
    series = np.loadtxt(out / "series.csv", delimiter=",", skiprows=1, ndmin=2)
    assert series.shape[0] == 1


def test_outputs_are_deterministic(tmp_path):
    cfg = _micro_custom(tmp_path)
    out1, out2 = tmp_path / "a", tmp_path / "b"
    run(cfg, out_dir=out1)
    run(cfg, out_dir=out2)
    for p1 in sorted(out1.iterdir()):
        p2 = out2 / p1.name
        assert p1.read_bytes() == p2.read_bytes()


def test_dry_run_writes_nothing(tmp_path, capsys):
    cfg = _micro_custom(tmp_path)
    out = tmp_path / "dry"
    written = run(cfg, out_dir=out, dry_run=True)
    assert written == []
    assert not out.exists()


def test_snapshot_scenario_six_grid_files(tmp_path):
    payload = {
        "scenario": "catswap_snapshots",
        "physics": {"N": 2, "n_bar": 2.25, "z": 1.0, "g": 1.0, "gamma": 0.0},
        "numerics": {"n_max": 17, "dt": 0.005},
        "output": {"grid_resolution": 41},
    }
    cfg = _write(tmp_path, payload)
    out = tmp_path / "snap"
    written = run(cfg, out_dir=out)
    csvs = [p for p in written if p.suffix == ".csv"]
    assert len(csvs) == 6  # field + spin at three snapshot times
    grid = read_grid(out / "snapshot_t2_spin")
    assert grid.kind == "spin_lambert"
    assert grid.metadata["time"] == pytest.approx(
        timescales(1.0, 2.25, 2).first_revival, abs=0.01
    )


def test_frame_export_counts(tmp_path):
    payload = {
        "scenario": "custom",
        "physics": {"N": 1, "n_bar": 1.0, "gamma": 0.0, "spin_state": "excited"},
        "numerics": {"n_max": 14, "dt": 0.01, "t_final": 0.02},
        "output": {"grid_resolution": 21, "observables": [],
                   "frames": {"interval": 0.01}},
    }
    cfg = _write(tmp_path, payload)
    out = tmp_path / "frames"
    written = run(cfg, out_dir=out)
    frame_csvs = [p for p in written if p.name.startswith("frame_")
                  and p.suffix == ".csv"]
    # floor(t_final/interval) + 1 = 3 frames, field + spin each
    assert len(frame_csvs) == 6
    assert (out / "frame_0002_field.csv").exists()


def test_fig3_scenario_micro(tmp_path):
    payload = {
        "scenario": "fig3_sweep",
        "physics": {"N": [2], "n_bar": 4.0, "z": 1.0, "g": 1.0,
                    "gamma": [1e-3]},
        "numerics": {"n_max": 22, "dt": 0.002},
        "output": {},
    }
    cfg = _write(tmp_path, payload)
    out = tmp_path / "sweep"
    written = run(cfg, out_dir=out, threads=1)
    assert (out / "sweep.csv").exists()
    rows = (out / "sweep.csv").read_text().strip().splitlines()
    assert rows[0].startswith("N,gamma,t,fidelity")
    assert len(rows) == 2
    sidecar = json.loads((out / "sweep.json").read_text())
    assert "config_hash" in sidecar["provenance"]
