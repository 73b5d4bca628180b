"""CSV export, text snapshots, and output-directory locking.

All numeric output is written with repr(), which round-trips float64
exactly, so identical runs produce bit-identical files and snapshots
restore bit-identical states.
"""
from __future__ import annotations

import os
import zlib
from contextlib import contextmanager
from pathlib import Path

import numpy as np

from .errors import IoError, VersionMismatch, CorruptSnapshot
from .grid import RadialGrid, Profile

SNAPSHOT_VERSION = "krfsnap v1"
LOCK_NAME = ".krflow.lock"


def _fmt(x) -> str:
    return repr(float(x))


def _write_text(path, text: str) -> None:
    try:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


def _metric_rows(m) -> str:
    lines = ["r,xi,h,f"]
    for r, xi, h, f in zip(m.grid.nodes, m.xi.values, m.h.values, m.f.values):
        lines.append(f"{_fmt(r)},{_fmt(xi)},{_fmt(h)},{_fmt(f)}")
    return "\n".join(lines) + "\n"


def export_records(obj, path):
    """Write obj as comma-separated text; returns the written path(s).

    Metric profiles export r,xi,h,f; curvature r,A,B,C,R; classification
    reports key,value pairs; trajectories one file per stored time, suffixed
    with the zero-padded time index and carrying an extra F column.
    """
    from .metric import MetricProfile
    from .curvature import CurvatureProfile
    from .classify import ClassificationReport
    from .flow import Trajectory, log_det_ratio

    if isinstance(obj, MetricProfile):
        _write_text(path, _metric_rows(obj))
        return path

    if isinstance(obj, CurvatureProfile):
        lines = ["r,A,B,C,R"]
        grid = obj.a.grid
        zero = np.zeros(grid.count)
        b = obj.b.values if obj.b is not None else zero
        c = obj.c.values if obj.c is not None else zero
        for vals in zip(grid.nodes, obj.a.values, b, c, obj.scalar.values):
            lines.append(",".join(_fmt(v) for v in vals))
        _write_text(path, "\n".join(lines) + "\n")
        return path

    if isinstance(obj, ClassificationReport):
        rows = [("c1.holds", obj.c1.holds), ("c1.alpha", obj.c1.alpha),
                ("c1.beta", obj.c1.beta), ("c1.gamma", obj.c1.gamma),
                ("c2.holds", obj.c2.holds), ("c2.delta", obj.c2.delta),
                ("c3.holds", obj.c3.holds), ("c3.b", obj.c3.b),
                ("xi_limit", obj.xi_limit)]
        if obj.growth is not None:
            rows += [("growth.cigar", obj.growth.cigar),
                     ("growth.conoid", obj.growth.conoid),
                     ("growth.limsup_2n", obj.growth.limsup_2n),
                     ("growth.limsup_n", obj.growth.limsup_n)]
        lines = ["key,value"]
        for k, v in rows:
            lines.append(f"{k},{_fmt(v) if isinstance(v, float) else v}")
        _write_text(path, "\n".join(lines) + "\n")
        return path

    if isinstance(obj, Trajectory):
        base = Path(path)
        stem, suffix = base.stem, base.suffix or ".csv"
        written = []
        for idx, state in enumerate(obj.states):
            m = state.metric
            F = log_det_ratio(obj, state.t).values
            lines = [f"# t={_fmt(state.t)}", "r,xi,h,f,F"]
            for vals in zip(m.grid.nodes, m.xi.values, m.h.values,
                            m.f.values, F):
                lines.append(",".join(_fmt(v) for v in vals))
            p = base.with_name(f"{stem}_{idx:03d}{suffix}")
            _write_text(p, "\n".join(lines) + "\n")
            written.append(p)
        return written

    raise TypeError(f"cannot export object of type {type(obj).__name__}")


# ------------------------------------------------------------- snapshots

def save_snapshot(state, path) -> None:
    """Write a FlowState as a text snapshot (bit-exact roundtrip)."""
    m = state.metric
    records = "\n".join(
        f"{_fmt(r)},{_fmt(xi)},{_fmt(h)},{_fmt(f)}"
        for r, xi, h, f in zip(m.grid.nodes, m.xi.values, m.h.values,
                               m.f.values)) + "\n"
    checksum = zlib.crc32(records.encode("utf-8")) & 0xFFFFFFFF
    header = (f"# {SNAPSHOT_VERSION}\n"
              f"# n={m.n}\n"
              f"# t={_fmt(state.t)}\n"
              f"# grid={_fmt(m.grid.r_min)},{_fmt(m.grid.r_max)},{m.grid.count}\n"
              f"# checksum={checksum:08x}\n")
    _write_text(path, header + records)


def _header_value(line: str, name: str) -> str:
    prefix = f"# {name}="
    if not line.startswith(prefix):
        raise CorruptSnapshot(f"expected header {prefix!r}, got {line!r}")
    return line[len(prefix):]


def load_snapshot(path):
    """Read a snapshot back into a FlowState."""
    from .metric import MetricProfile
    from .flow import FlowState, _extrapolate_origin, _slope_at_origin
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc
    lines = text.splitlines()
    if len(lines) < 6:
        raise CorruptSnapshot("snapshot truncated")
    if lines[0] != f"# {SNAPSHOT_VERSION}":
        raise VersionMismatch(f"unsupported snapshot header {lines[0]!r}")
    n = int(_header_value(lines[1], "n"))
    t = float(_header_value(lines[2], "t"))
    grid_spec = _header_value(lines[3], "grid").split(",")
    checksum = int(_header_value(lines[4], "checksum"), 16)
    records = "\n".join(lines[5:]) + "\n"
    if (zlib.crc32(records.encode("utf-8")) & 0xFFFFFFFF) != checksum:
        raise CorruptSnapshot("checksum mismatch")
    r_min, r_max, count = float(grid_spec[0]), float(grid_spec[1]), int(grid_spec[2])
    rows = [ln.split(",") for ln in lines[5:] if ln]
    if len(rows) != count:
        raise CorruptSnapshot(f"expected {count} records, found {len(rows)}")
    data = np.array([[float(v) for v in row] for row in rows])
    grid = RadialGrid.logspace(r_min, r_max, count)
    if not np.array_equal(grid.nodes, data[:, 0]):
        raise CorruptSnapshot("record radii do not match the grid header")
    h = data[:, 2]
    xi = data[:, 1]
    metric = MetricProfile(
        n=n, grid=grid, xi=Profile(grid, xi), h=Profile(grid, h),
        f=Profile(grid, data[:, 3]), c0=_extrapolate_origin(grid, h),
        xi_origin_slope=_slope_at_origin(grid, xi))
    return FlowState(t=t, metric=metric)


@contextmanager
def dir_lock(directory):
    """Exclusive lock on an output directory (one writer per directory)."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    lock = directory / LOCK_NAME
    try:
        fd = os.open(lock, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
    except FileExistsError:
        raise IoError(f"output directory {directory} is locked by another "
                      f"run (remove {lock} if stale)")
    try:
        os.write(fd, str(os.getpid()).encode())
        os.close(fd)
        yield directory
    finally:
        try:
            os.unlink(lock)
        except OSError:
            pass
