"""Stepping-kernel benchmark: compiled extension vs numpy fallback.

Runs the same short flow segment through both kernels, reports steps per
second and the sup-norm disagreement of the final profiles.  The compiled
kernel is what makes the acceptance suite practical; expect a 15-30x gap.

    python benchmarks/bench_stepper.py [--count 192] [--t-end 0.05]
"""
import argparse
import sys
import time
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from krflow.grid import RadialGrid
from krflow.presets import preset_metric
from krflow import _kernels_py


def load_compiled():
    try:
        from krflow import _kernels
        return _kernels
    except ImportError:
        return None


def run(kernel, f0, nodes, dx, ndim, t_end, safety):
    ws = kernel.make_workspace(nodes, dx, ndim)
    h0 = ws.compute_h(f0)
    start = time.perf_counter()
    f, t, steps, status, lo, hi = ws.advance(
        f0.copy(), 0.0, t_end, safety, h0, 1e12, 20)
    elapsed = time.perf_counter() - start
    assert status == 0, f"kernel returned status {status}"
    return f, steps, elapsed


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--count", type=int, default=192)
    parser.add_argument("--t-end", type=float, default=0.05)
    parser.add_argument("--safety", type=float, default=0.45)
    args = parser.parse_args(argv)

    grid = RadialGrid.logspace(1e-2, 1e4, args.count)
    m = preset_metric("cigar", {}, grid, n=2)
    f0 = m.f.values.astype(np.float64)

    compiled = load_compiled()
    f_py, steps_py, dt_py = run(_kernels_py, f0, grid.nodes, grid.dx, 2,
                                args.t_end, args.safety)
    print(f"python fallback : {steps_py:7d} steps in {dt_py:7.2f}s "
          f"-> {steps_py / dt_py:10.0f} steps/s")
    if compiled is None:
        print("compiled kernel : not built (python setup.py build_ext --inplace)")
        return 1
    f_c, steps_c, dt_c = run(compiled, f0, grid.nodes, grid.dx, 2,
                             args.t_end, args.safety)
    print(f"compiled kernel : {steps_c:7d} steps in {dt_c:7.2f}s "
          f"-> {steps_c / dt_c:10.0f} steps/s")
    print(f"speedup         : {dt_py / dt_c * steps_c / steps_py:10.1f}x")
    gap = float(np.max(np.abs(f_py - f_c)))
    print(f"steps agree     : {steps_py == steps_c}")
    print(f"sup |f_py - f_c|: {gap:.3e}")
    return 0 if gap < 1e-11 and steps_py == steps_c else 1


if __name__ == "__main__":
    sys.exit(main())
