import math

import numpy as np
import pytest

from krflow.cli import main as cli_main
from krflow.config import RunConfig, parse_config, config_to_text
from krflow.curvature import curvature_components
from krflow.errors import (ParseError, UnknownKey, OutOfRange, UnknownPreset,
                           InvalidParams, IoError, VersionMismatch,
                           CorruptSnapshot)
from krflow.flow import FlowState, FlowConfig, run_flow
from krflow.grid import RadialGrid, Profile
from krflow.io import (export_records, save_snapshot, load_snapshot, dir_lock)
from krflow.presets import preset_xi, preset_metric, xi_function


# --------------------------------------------------------------- presets

def test_preset_values(grid_1024):
    xi = preset_xi("euclidean", {}, grid_1024)
    assert np.all(xi.values == 0)
    xi = preset_xi("cigar", {}, grid_1024)
    i = grid_1024.index_at_or_above(1.0)
    r = grid_1024.nodes[i]
    assert xi.values[i] == pytest.approx(r / (1 + r))


def test_preset_errors(grid_1024):
    with pytest.raises(UnknownPreset):
        preset_xi("torus", {}, grid_1024)
    with pytest.raises(InvalidParams):
        preset_xi("conoid", {"beta": 1.5}, grid_1024)
    with pytest.raises(InvalidParams):
        preset_xi("custom_table", {"points": [(0.5, 0.2), (2.0, 0.4)]},
                  grid_1024)     # must start at (0, 0)


def test_custom_table_monotone(grid_1024):
    xi = preset_xi("custom_table",
                   {"points": [(0.0, 0.0), (1.0, 0.3), (10.0, 0.6)]},
                   grid_1024)
    assert np.all(np.diff(xi.values) >= -1e-12)
    assert xi.values[-1] == pytest.approx(0.6)     # held beyond the table


def test_conoid_preset_classifies_as_conoid(grid_1024):
    from krflow.classify import classify_metric
    m = preset_metric("conoid", {"beta": 0.5}, grid_1024, n=2)
    rep = classify_metric(m)
    assert rep.c1.holds and rep.growth.conoid


# ---------------------------------------------------------------- config

def test_parse_config_defaults():
    cfg = parse_config("")
    assert cfg == RunConfig()
    assert cfg.count == 512 and cfg.r_min == 1e-6 and cfg.dt_safety == 0.2


def test_parse_config_values():
    cfg = parse_config("flow.t_end = 5\n# comment\nn = 3\n"
                       "flow.output_times = 1, 2.5\n")
    assert cfg.t_end == 5.0
    assert cfg.n == 3
    assert cfg.output_times == (1.0, 2.5)


def test_parse_config_errors():
    with pytest.raises(OutOfRange):
        parse_config("grid.count = 8")
    with pytest.raises(UnknownKey, match="grid.shape"):
        parse_config("grid.shape = donut")
    with pytest.raises(ParseError, match="line 2"):
        parse_config("n = 2\nthis is not a setting\n")
    with pytest.raises(ParseError, match="n"):
        parse_config("n = two")
    with pytest.raises(OutOfRange):
        parse_config("grid.r_min = 1.0\ngrid.r_max = 100.0")


def test_config_roundtrip_text():
    cfg = parse_config("flow.t_end = 2.5\nxi.preset = conoid\nxi.beta = 0.25")
    again = parse_config(config_to_text(cfg))
    assert again == cfg


# ---------------------------------------------------------------- export

def test_export_flat_curvature_zero_columns(tmp_path, euclidean):
    path = tmp_path / "curv.csv"
    export_records(curvature_components(euclidean), path)
    lines = path.read_text().splitlines()
    assert lines[0] == "r,A,B,C,R"
    for line in lines[1:]:
        _, a, b, c, s = line.split(",")
        assert a == b == c == s == "0.0"


def test_export_metric_row_values(tmp_path):
    grid = RadialGrid.logspace(1e-6, 1e6, 1025)   # node exactly at r = 1
    m = preset_metric("cigar", {}, grid, n=2)
    path = tmp_path / "metric.csv"
    export_records(m, path)
    lines = path.read_text().splitlines()
    row = [ln for ln in lines[1:]
           if abs(float(ln.split(",")[0]) - 1.0) < 1e-12]
    assert row, "expected a row at r = 1"
    h_val = float(row[0].split(",")[2])
    assert h_val == pytest.approx(0.5, rel=1e-8)


def test_export_roundtrip_bit_identical(tmp_path, grid_1024):
    m = preset_metric("custom_table",
                      {"points": [(0.0, 0.0), (1.0, 0.3), (10.0, 0.6)]},
                      grid_1024, n=2)
    path = tmp_path / "table.csv"
    export_records(m, path)
    rows = [ln.split(",") for ln in path.read_text().splitlines()[1:]]
    data = np.array([[float(v) for v in row] for row in rows])
    assert np.array_equal(data[:, 0], grid_1024.nodes)
    assert np.array_equal(data[:, 1], m.xi.values)
    assert np.array_equal(data[:, 2], m.h.values)
    assert np.array_equal(data[:, 3], m.f.values)


def test_export_trajectory_files(tmp_path):
    grid = RadialGrid.logspace(1e-2, 1e4, 64)
    fn, slope0 = xi_function("cigar", {})
    xi0 = Profile(grid, fn(grid.nodes))
    cfg = FlowConfig(n=2, grid=grid, t_end=0.02, dt_safety=0.45)
    traj = run_flow(xi0, cfg, slope0=slope0, output_times=(0.01, 0.02))
    written = export_records(traj, tmp_path / "run.csv")
    names = [p.name for p in written]
    assert names == ["run_000.csv", "run_001.csv", "run_002.csv"]
    first = written[0].read_text().splitlines()
    assert first[0].startswith("# t=")
    assert first[1] == "r,xi,h,f,F"


# -------------------------------------------------------------- snapshots

def _small_state():
    grid = RadialGrid.logspace(1e-2, 1e4, 32)
    m = preset_metric("cigar", {}, grid, n=2)
    return FlowState(t=0.25, metric=m)


def test_snapshot_roundtrip(tmp_path):
    state = _small_state()
    path = tmp_path / "state.snap"
    save_snapshot(state, path)
    text = path.read_text().splitlines()
    assert text[0] == "# krfsnap v1"
    loaded = load_snapshot(path)
    assert loaded.t == state.t
    assert loaded.metric.n == state.metric.n
    assert np.array_equal(loaded.metric.xi.values, state.metric.xi.values)
    assert np.array_equal(loaded.metric.h.values, state.metric.h.values)
    assert np.array_equal(loaded.metric.f.values, state.metric.f.values)


def test_snapshot_version_mismatch(tmp_path):
    state = _small_state()
    path = tmp_path / "state.snap"
    save_snapshot(state, path)
    body = path.read_text().splitlines()
    body[0] = "# krfsnap v9"
    path.write_text("\n".join(body) + "\n")
    with pytest.raises(VersionMismatch):
        load_snapshot(path)


def test_snapshot_corruption_detected(tmp_path):
    state = _small_state()
    path = tmp_path / "state.snap"
    save_snapshot(state, path)
    lines = path.read_text().splitlines()
    truncated = tmp_path / "trunc.snap"
    truncated.write_text("\n".join(lines[:10]) + "\n")
    with pytest.raises(CorruptSnapshot):
        load_snapshot(truncated)
    tampered = tmp_path / "tamper.snap"
    lines[7] = lines[7].replace("0.", "1.", 1)
    tampered.write_text("\n".join(lines) + "\n")
    with pytest.raises(CorruptSnapshot):
        load_snapshot(tampered)


def test_snapshot_resume_matches(tmp_path):
    grid = RadialGrid.logspace(1e-2, 1e4, 96)
    fn, slope0 = xi_function("cigar", {})
    xi0 = Profile(grid, fn(grid.nodes))
    cfg = FlowConfig(n=2, grid=grid, t_end=0.2, dt_safety=0.45)
    full = run_flow(xi0, cfg, slope0=slope0, output_times=(0.1, 0.2))
    path = tmp_path / "mid.snap"
    save_snapshot(full.state_at(0.1), path)
    resumed = run_flow(xi0, cfg, slope0=slope0, output_times=(0.2,),
                       start_state=load_snapshot(path))
    gap = np.max(np.abs(resumed.states[-1].metric.h.values
                        - full.state_at(0.2).metric.h.values))
    assert gap <= 1e-12


# ------------------------------------------------------------------ lock

def test_dir_lock_exclusive(tmp_path):
    with dir_lock(tmp_path):
        with pytest.raises(IoError, match="locked"):
            with dir_lock(tmp_path):
                pass
    with dir_lock(tmp_path):     # released after exit
        pass


# ------------------------------------------------------------------- CLI

def test_cli_classify_cigar(tmp_path, capsys):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("xi.preset = cigar\ngrid.count = 512\n")
    rc = cli_main(["classify", "--config", str(cfg),
                   "--out", str(tmp_path / "out")])
    assert rc == 0
    out = capsys.readouterr().out
    assert "c3 holds=True" in out
    b = float([ln for ln in out.splitlines()
               if ln.startswith("c3")][0].split("b=")[1])
    assert b == pytest.approx(math.log(2), abs=1e-3)
    assert (tmp_path / "out" / "classification.csv").exists()


def test_cli_flow_euclidean_zero_deviation(tmp_path, capsys):
    cfg = tmp_path / "e.cfg"
    cfg.write_text("xi.preset = euclidean\ngrid.r_min = 0.01\n"
                   "grid.r_max = 10000.0\ngrid.count = 48\n"
                   "flow.t_end = 0.5\n")
    rc = cli_main(["flow", "--config", str(cfg),
                   "--out", str(tmp_path / "out")])
    assert rc == 0
    files = sorted((tmp_path / "out").glob("flow_*.csv"))
    assert files
    for fpath in files:
        for line in fpath.read_text().splitlines()[2:]:
            F = float(line.split(",")[4])
            assert abs(F) < 1e-11
    assert (tmp_path / "out" / "final.snap").exists()


def test_cli_deterministic_outputs(tmp_path):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("xi.preset = cigar\ngrid.count = 256\n")
    for sub in ("a", "b"):
        rc = cli_main(["classify", "--config", str(cfg),
                       "--out", str(tmp_path / sub)])
        assert rc == 0
    fa = (tmp_path / "a" / "classification.csv").read_bytes()
    fb = (tmp_path / "b" / "classification.csv").read_bytes()
    assert fa == fb


def test_cli_error_reporting(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("grid.count = 4\n")
    rc = cli_main(["classify", "--config", str(cfg),
                   "--out", str(tmp_path / "out")])
    assert rc == 2
    assert "OutOfRange" in capsys.readouterr().err
