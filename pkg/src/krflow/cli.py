"""Command-line interface.

Subcommands: classify | curvature | flow | compare | check-theorems.
Each takes --config <path> (key = value text), --out <dir>, --seed <u64>.
Outputs are plot-ready CSV files plus a short stdout summary; runs against
the same output directory are serialized through a lock file.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import __version__
from ._stepper import backend_name
from .classify import classify_metric
from .config import RunConfig, parse_config
from .curvature import curvature_components
from .errors import KrflowError
from .flow import run_flow
from .io import export_records, save_snapshot, dir_lock
from .presets import xi_function
from .grid import Profile


def _load_config(path) -> RunConfig:
    if path is None:
        return RunConfig()
    return parse_config(Path(path).read_text(encoding="utf-8"))


def _cmd_classify(cfg: RunConfig, out: Path, seed: int) -> int:
    m = cfg.metric()
    report = classify_metric(m)
    export_records(report, out / "classification.csv")
    print(f"preset={cfg.preset} n={cfg.n}")
    print(f"c1 holds={report.c1.holds} alpha={report.c1.alpha:.4f} "
          f"beta={report.c1.beta:.4f} gamma={report.c1.gamma:.4f}")
    print(f"c2 holds={report.c2.holds} delta={report.c2.delta:.4f}")
    print(f"c3 holds={report.c3.holds} b={report.c3.b:.6f}")
    if report.growth:
        print(f"growth cigar={report.growth.cigar} conoid={report.growth.conoid}")
    return 0


def _cmd_curvature(cfg: RunConfig, out: Path, seed: int) -> int:
    m = cfg.metric()
    cc = curvature_components(m)
    export_records(cc, out / "curvature.csv")
    print(f"max A={float(np.max(cc.a.values)):.6g}")
    if cc.b is not None:
        print(f"max B={float(np.max(cc.b.values)):.6g} "
              f"max C={float(np.max(cc.c.values)):.6g}")
        print(f"C-route discrepancy={cc.c_route_discrepancy:.3g}")
    return 0


def _cmd_flow(cfg: RunConfig, out: Path, seed: int) -> int:
    grid = cfg.grid()
    fn, slope0 = xi_function(cfg.preset, cfg.preset_params())
    xi0 = Profile(grid, fn(grid.nodes))
    traj = run_flow(xi0, cfg.flow_config(grid), c0=cfg.c0, slope0=slope0,
                    output_times=cfg.output_times or None,
                    provenance=f"preset={cfg.preset}")
    export_records(traj, out / "flow.csv")
    save_snapshot(traj.states[-1], out / "final.snap")
    times = ", ".join(f"{t:g}" for t in traj.times)
    print(f"stored times: {times}")
    lo, hi = traj.equivalence[-1]
    print(f"equivalence to g0 at t_end: [{lo:.4g}, {hi:.4g}]")
    return 0


def _cmd_compare(cfg: RunConfig, out: Path, seed: int) -> int:
    from .comparison import assemble_comparison_metric
    m = cfg.metric()
    res = assemble_comparison_metric(m, cfg.epsilon)
    export_records(res.metric, out / "comparison_metric.csv")
    print(f"route={res.route} k={res.k} epsilon={res.epsilon}")
    print(f"h/h_tilde in [{res.lower:.6g}, {res.upper:.6g}] "
          f"(target lower bound {res.lower_target:.6g})")
    print(f"curvature sup={res.curvature_sup:.6g}")
    if res.bumps is not None:
        print(f"R_k={res.R_k:.6g} sign changes at {len(res.r_seq)} radii; "
              f"max|I|={res.bumps.max_abs_I():.4f}")
    return 0


def _cmd_check_theorems(cfg: RunConfig, out: Path, seed: int) -> int:
    from .acceptance import run_all
    results = run_all(seed=seed)
    lines = ["criterion,name,passed,detail"]
    failed = 0
    for res in results:
        status = "PASS" if res.passed else "FAIL"
        print(f"[{status}] criterion {res.number:2d}: {res.name} "
              f"({res.elapsed:.1f}s) {res.detail}")
        failed += 0 if res.passed else 1
        lines.append(f"{res.number},{res.name},{res.passed},\"{res.detail}\"")
    (out / "check_theorems.csv").write_text("\n".join(lines) + "\n",
                                            encoding="utf-8")
    print(f"{len(results) - failed}/{len(results)} criteria passed "
          f"(backend: {backend_name()})")
    return 1 if failed else 0


_COMMANDS = {
    "classify": _cmd_classify,
    "curvature": _cmd_curvature,
    "flow": _cmd_flow,
    "compare": _cmd_compare,
    "check-theorems": _cmd_check_theorems,
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="krflow",
        description="Radial Kahler-Ricci flow for U(n)-invariant metrics")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", default=None, help="key = value text file")
        p.add_argument("--out", default="out", help="output directory")
        p.add_argument("--seed", type=int, default=0, help="sweep seed (u64)")
    args = parser.parse_args(argv)
    try:
        cfg = _load_config(args.config)
        out = Path(args.out)
        with dir_lock(out):
            return _COMMANDS[args.command](cfg, out, args.seed)
    except KrflowError as exc:
        print(f"error [{type(exc).__name__}]: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
