"""Runnable acceptance checks: closed forms, flow laws, constructions.

Each criterion is a method returning a CriterionResult; run_all executes
them in order and is what the check-theorems CLI subcommand (and the
acceptance test module) calls.  Runs are cached so criteria that share a
trajectory pay for it once.  Total runtime is a few minutes with the
compiled kernel; the pure-python fallback is roughly 20x slower here.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .classify import check_c3
from .comparison import (assemble_comparison_metric, c1_equivalence_bounds,
                         cigar_obstruction_bound, pullback_rescale,
                         rescale_to_unit_curvature)
from .config import parse_config
from .curvature import curvature_components
from .flow import (FlowConfig, run_flow, log_det_ratio, xi_radial_derivative,
                   rescaled_deviation, lyh_monotonicity, refinement_uniqueness,
                   existence_horizon, h_origin_history)
from .grid import RadialGrid, Profile, interp_linear
from .io import save_snapshot, load_snapshot
from .metric import MetricProfile
from .oracle import fd_curvature_oracle
from .presets import preset_metric, xi_function


@dataclass(frozen=True)
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: str
    elapsed: float


def _timed(number, name):
    def wrap(fn):
        def inner(self):
            t0 = time.time()
            passed, detail = fn(self)
            return CriterionResult(number=number, name=name, passed=passed,
                                   detail=detail, elapsed=time.time() - t0)
        inner._criterion = (number, name)
        return inner
    return wrap


def _flow_preset(preset, params, n, r_min, r_max, count, outs, safety,
                 t_end=None):
    grid = RadialGrid.logspace(r_min, r_max, count)
    fn, slope0 = xi_function(preset, params)
    xi0 = Profile(grid, fn(grid.nodes))
    cfg = FlowConfig(n=n, grid=grid, t_end=t_end or outs[-1],
                     dt_safety=safety)
    return run_flow(xi0, cfg, slope0=slope0, output_times=outs,
                    provenance=f"preset={preset}")


class AcceptanceSuite:
    """The acceptance criteria, with shared cached trajectories."""

    def __init__(self, seed: int = 0):
        self.seed = seed
        self._cache = {}

    def _cached(self, key, builder):
        if key not in self._cache:
            self._cache[key] = builder()
        return self._cache[key]

    # shared runs -------------------------------------------------------

    def cigar_run(self):
        return self._cached("cigar", lambda: _flow_preset(
            "cigar", {}, 2, 1e-1, 1e5, 160, (0.5, 1.0, 2.0, 4.0, 5.0), 0.5))

    def conoid_run(self):
        return self._cached("conoid", lambda: _flow_preset(
            "conoid", {"beta": 0.5}, 2, 1e-1, 1e5, 160,
            (0.5, 1.0, 2.0, 4.0, 5.0), 0.5))

    def c2log_run(self):
        return self._cached("c2log", lambda: _flow_preset(
            "c2_log", {}, 2, 1e-1, 1e5, 160, (0.5, 1.0, 2.0, 4.0), 0.5))

    def conoid_long_run(self):
        return self._cached("conoid40", lambda: _flow_preset(
            "conoid", {"beta": 0.5}, 2, 1e-1, 1e5, 128,
            (10.0, 20.0, 40.0), 0.45))

    def refinement_report(self):
        def build():
            fn, _ = xi_function("cigar", {})
            cfg = FlowConfig(n=2, grid=RadialGrid.logspace(1e-2, 1e4, 129),
                             t_end=1.0, dt_safety=0.45)
            return refinement_uniqueness(fn, cfg, levels=3)
        return self._cached("refinement", build)

    # criteria ----------------------------------------------------------

    @_timed(1, "closed-form reconstruction")
    def criterion_01(self):
        errs_h, errs_f = [], []
        for count in (512, 1024, 2048):
            grid = RadialGrid.logspace(1e-6, 1e6, count)
            m = preset_metric("cigar", {}, grid, n=2)
            h_exact = 1 / (1 + grid.nodes)
            f_exact = np.log1p(grid.nodes) / grid.nodes
            errs_h.append(float(np.max(np.abs(m.h.values / h_exact - 1))))
            errs_f.append(float(np.max(np.abs(m.f.values / f_exact - 1))))
        slopes = [math.log2(e[i] / e[i + 1])
                  for e in (errs_h, errs_f) for i in range(2)]
        ok = errs_h[-1] <= 1e-8 and errs_f[-1] <= 1e-8 and min(slopes) >= 1.9
        return ok, (f"h err {errs_h[-1]:.2e}, f err {errs_f[-1]:.2e} "
                    f"at 2048 nodes; refinement slopes "
                    f"{', '.join(f'{s:.2f}' for s in slopes)}")

    @_timed(2, "curvature oracle agreement")
    def criterion_02(self):
        grid = RadialGrid.logspace(1e-6, 1e6, 2048)
        worst_rel, worst_off = 0.0, 0.0
        targets = np.exp(np.linspace(np.log(0.05), np.log(20.0), 10))
        for preset, params in (("cigar", {}), ("conoid", {"beta": 0.5})):
            m = preset_metric(preset, params, grid, n=2)
            cc = curvature_components(m)
            for rt in targets:
                i = grid.index_at_or_above(rt)
                r = float(grid.nodes[i])
                o = fd_curvature_oracle(m, np.array([math.sqrt(r), 0.0],
                                                    dtype=complex))
                for mine, ora in ((cc.a.values[i], o.a),
                                  (cc.b.values[i], o.b),
                                  (cc.c.values[i], o.c)):
                    tol = max(1e-3 * max(abs(mine), abs(ora)), 1e-6)
                    worst_rel = max(worst_rel, abs(mine - ora) / tol)
                worst_off = max(worst_off, o.off_pattern_max)
        ok = worst_rel <= 1.0 and worst_off < 1e-6
        return ok, (f"worst component error {worst_rel:.3f}x tolerance; "
                    f"off-pattern max {worst_off:.2e}")

    @_timed(3, "exact flow solution (n=1)")
    def criterion_03(self):
        errs = []
        h_at_1 = None
        for count in (256, 512, 1024):
            traj = _flow_preset("cigar", {}, 1, 1e-2, 1e4, count, (1.0,), 0.45)
            m = traj.states[-1].metric
            h_exact = 1 / (math.e + m.grid.nodes)
            errs.append(float(np.max(np.abs(m.h.values - h_exact))))
            if count == 1024:
                h_at_1 = float(m.eval_h(1.0)[0])
        slopes = [math.log2(errs[i] / errs[i + 1]) for i in range(2)]
        target = 1 / (math.e + 1)
        ok = (errs[-1] <= 1e-4 and min(slopes) >= 1.9
              and abs(h_at_1 - target) <= 1e-4)
        return ok, (f"sup err {errs[-1]:.2e} at 1024 nodes; orders "
                    f"{slopes[0]:.2f}, {slopes[1]:.2f}; "
                    f"h(1,1)={h_at_1:.6f} vs {target:.6f}")

    @_timed(4, "flat fixed point")
    def criterion_04(self):
        traj = _flow_preset("euclidean", {}, 2, 1e-2, 1e4, 64,
                            (5.0, 10.0), 0.2)
        worst = 0.0
        for s in traj.states:
            worst = max(worst,
                        float(np.max(np.abs(s.metric.h.values - 1))),
                        float(np.max(np.abs(s.metric.f.values - 1))))
        return worst <= 1e-10, f"sup deviation from flat {worst:.2e} to t=10"

    @_timed(5, "preserved positivity")
    def criterion_05(self):
        details = []
        ok = True
        for name, traj in (("cigar", self.cigar_run()),
                           ("conoid", self.conoid_run())):
            min_xr, max_F = np.inf, -np.inf
            for t in traj.times[1:]:
                st = traj.state_at(t)
                min_xr = min(min_xr, float(np.min(xi_radial_derivative(st))))
                max_F = max(max_F, float(np.max(log_det_ratio(traj, t).values)))
            h0 = h_origin_history(traj)
            dec = bool(np.all(np.diff(h0) < 0))
            ok = ok and min_xr >= -1e-6 and max_F <= 1e-8 and dec
            details.append(f"{name}: min xi_r={min_xr:.1e}, "
                           f"max F={max_F:.1e}, h(0,t) dec={dec}")
        return ok, "; ".join(details)

    @_timed(6, "log-determinant lower bounds")
    def criterion_06(self):
        def fitted_constants(traj, use_log_r, coeff):
            grid = traj.config.grid
            n = traj.config.n
            cs = []
            for t in (1.0, 2.0, 4.0):
                F = log_det_ratio(traj, t).values
                F1 = float(interp_linear(0.0, grid.x, F)[0])
                mask = grid.nodes >= 1.0
                vals = F[mask] - coeff * F1
                if use_log_r:
                    vals = vals + n * np.log(grid.nodes[mask])
                cs.append(max(0.0, -float(np.min(vals))))
            return cs

        cs_cigar = fitted_constants(self.cigar_run(), False,
                                    self.cigar_run().config.n)
        cs_conoid = fitted_constants(self.conoid_run(), True, 1.0)
        def stable(cs):
            return (max(cs) - min(cs)) <= 0.2 * max(max(cs), 0.05)
        ok = stable(cs_cigar) and stable(cs_conoid)
        return ok, (f"required constants cigar={['%.3f' % c for c in cs_cigar]}, "
                    f"conoid={['%.3f' % c for c in cs_conoid]}")

    @_timed(7, "time-weighted scalar curvature monotonicity")
    def criterion_07(self):
        radii = np.exp(np.linspace(np.log(1.0), np.log(1e3), 20))
        pairs = [(0.5, 1.0), (1.0, 2.0), (2.0, 4.0)]
        details = []
        ok = True
        for name, traj in (("cigar", self.cigar_run()),
                           ("conoid", self.conoid_run()),
                           ("c2_log", self.c2log_run())):
            rep = lyh_monotonicity(traj, radii, time_pairs=pairs)
            good = rep.holds(1e-4 * rep.scalar_max)
            ok = ok and good
            details.append(f"{name}: worst={rep.worst:.2e} "
                           f"(tol {1e-4 * rep.scalar_max:.1e})")
        return ok, "; ".join(details)

    @_timed(8, "convergence after rescaling")
    def criterion_08(self):
        traj = self.conoid_long_run()
        devs = [rescaled_deviation(traj, t, 10.0) for t in (10.0, 20.0, 40.0)]
        ok = devs[0] > devs[1] > devs[2] and devs[2] < 0.2
        return ok, ("deviation at R=10: " +
                    ", ".join(f"{d:.4f}" for d in devs))

    @_timed(9, "uniqueness surrogate by refinement")
    def criterion_09(self):
        rep = self.refinement_report()
        ok = rep.passed and min(rep.orders) >= 1.5
        return ok, (f"diffs {', '.join(f'{d:.2e}' for d in rep.diffs)}; "
                    f"orders {', '.join(f'{o:.2f}' for o in rep.orders)}")

    @_timed(10, "comparison metric construction")
    def criterion_10(self):
        cases = [
            (0.1, 1e-6, 1e8, 2048, np.float64),
            (0.01, 1e-6, 1e300, 4096, np.float64),
            (0.001, 1e-6, np.longdouble("1e4800"), 16384, np.longdouble),
        ]
        sups, details = [], []
        ok = True
        for eps, r_min, r_max, count, dtype in cases:
            grid = RadialGrid.logspace(dtype(r_min), r_max, count, dtype=dtype)
            fn, slope0 = xi_function("c2_log", {})
            xi = Profile(grid, fn(grid.nodes))
            m = MetricProfile.from_xi(n=2, xi=xi, c0=1.0, slope0=slope0)
            res = assemble_comparison_metric(m, eps)
            b = res.bumps
            good = (res.lower >= res.lower_target
                    and b.max_abs_o() <= 1 / res.k * (1 + 1e-12)
                    and b.max_scaled_slope() <= 4 * (1 + 1e-12)
                    and b.max_abs_I() <= 2.3863)
            ok = ok and good
            sups.append(res.curvature_sup)
            details.append(f"eps={eps}: k={res.k} lower={res.lower:.3g} "
                           f"(target {res.lower_target:.3g}) "
                           f"|I|max={b.max_abs_I():.3f}")
        spread = max(sups) / min(sups)
        ok = ok and spread <= 2.0
        return ok, "; ".join(details) + f"; curvature spread {spread:.2f}x"

    @_timed(11, "cigar obstruction sweep")
    def criterion_11(self):
        grid = RadialGrid.logspace(1e-6, 1e6, 1024)
        m = preset_metric("cigar", {}, grid, n=2)
        rng = np.random.default_rng(self.seed or 12345)
        candidates = []
        for _ in range(20):
            beta = float(rng.uniform(0.1, 0.9))
            lam = float(rng.uniform(0.5, 2.0))
            cand = preset_metric("conoid", {"beta": beta}, grid, n=2,
                                 c0=lam)
            candidates.append(rescale_to_unit_curvature(cand))
        rep = cigar_obstruction_bound(m, candidates, slack=0.1,
                                      oracle_points=2)
        ok = rep.passed and rep.empirical_max <= 0.55
        return ok, (f"empirical max alpha {rep.empirical_max:.4f} "
                    f"vs bound {rep.bound:.4f}")

    @_timed(12, "formula checks")
    def criterion_12(self):
        t_h = existence_horizon(1.0, 1.0, 2)
        bounds = c1_equivalence_bounds(0.0, 0.0, 0.5, 4.0)
        grid = RadialGrid.logspace(1e-6, 1e6, 1024)
        m = preset_metric("cigar", {}, grid, n=2)
        b = check_c3(m).b
        ok = (t_h == 0.25 and bounds == (0.25, 0.5)
              and abs(b - math.log(2)) <= 1e-3)
        return ok, (f"horizon={t_h}, bounds={bounds}, "
                    f"b={b:.6f} vs log 2={math.log(2):.6f}")

    @_timed(13, "pullback equivariance of the flow")
    def criterion_13(self):
        fn, slope0 = xi_function("cigar", {})
        base = RadialGrid.logspace(1e-2, 1e4, 129)
        xi1 = Profile(base, fn(base.nodes))
        cfg1 = FlowConfig(n=2, grid=base, t_end=1.0, dt_safety=0.45)
        tr1 = run_flow(xi1, cfg1, slope0=slope0)
        h_final = tr1.states[-1].metric.h.values
        threshold = 10 * self.refinement_report().diffs[0]
        details, ok = [], True
        for k in (2, 5):
            m0 = pullback_rescale(
                MetricProfile.from_xi(n=2, xi=xi1, c0=1.0, slope0=slope0), k)
            cfg2 = FlowConfig(n=2, grid=m0.grid, t_end=1.0, dt_safety=0.45)
            tr2 = run_flow(m0.xi, cfg2, c0=m0.c0, slope0=m0.xi_origin_slope)
            diff = float(np.max(np.abs(tr2.states[-1].metric.h.values
                                       - h_final / k)))
            ok = ok and diff <= threshold
            details.append(f"k={k}: {diff:.2e}")
        return ok, "; ".join(details) + f" (allowance {threshold:.2e})"

    @_timed(14, "determinism and snapshot resume")
    def criterion_14(self):
        import contextlib
        import io
        import tempfile
        from pathlib import Path
        from .cli import main as cli_main

        cfg_text = ("xi.preset = cigar\nn = 2\n"
                    "grid.r_min = 0.01\ngrid.r_max = 10000.0\n"
                    "grid.count = 96\nflow.t_end = 0.2\n"
                    "flow.dt_safety = 0.45\nflow.output_times = 0.1,0.2\n")
        with tempfile.TemporaryDirectory() as tmp:
            tmp = Path(tmp)
            cfg_path = tmp / "run.cfg"
            cfg_path.write_text(cfg_text, encoding="utf-8")
            outs = []
            for sub in ("a", "b"):
                with contextlib.redirect_stdout(io.StringIO()):
                    rc = cli_main(["flow", "--config", str(cfg_path),
                                   "--out", str(tmp / sub)])
                if rc != 0:
                    return False, f"cli flow run failed with code {rc}"
                outs.append(sorted((tmp / sub).glob("*")))
            identical = all(
                p1.name == p2.name and p1.read_bytes() == p2.read_bytes()
                for p1, p2 in zip(*outs))

            cfg = parse_config(cfg_text)
            grid = cfg.grid()
            xi0 = Profile(grid, xi_function("cigar", {})[0](grid.nodes))
            full = run_flow(xi0, cfg.flow_config(grid), slope0=1.0,
                            output_times=(0.1, 0.2))
            snap_path = tmp / "mid.snap"
            save_snapshot(full.state_at(0.1), snap_path)
            resumed = run_flow(xi0, cfg.flow_config(grid), slope0=1.0,
                               output_times=(0.2,),
                               start_state=load_snapshot(snap_path))
            gap = float(np.max(np.abs(
                resumed.states[-1].metric.h.values
                - full.state_at(0.2).metric.h.values)))
        ok = identical and gap <= 1e-12
        return ok, f"identical outputs={identical}; resume gap={gap:.2e}"

    def run_all(self, numbers=None):
        methods = sorted(
            (getattr(self, name) for name in dir(self)
             if name.startswith("criterion_")),
            key=lambda fn: fn._criterion[0])
        results = []
        for fn in methods:
            num = fn._criterion[0]
            if numbers and num not in numbers:
                continue
            results.append(fn())
        return results


def run_all(seed: int = 0, numbers=None):
    return AcceptanceSuite(seed=seed).run_all(numbers=numbers)
