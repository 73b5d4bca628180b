"""Pure-numpy stepping kernel for the radial flow.

Reference implementation of the hot loop; the compiled extension in
_kernels.pyx mirrors this arithmetic operation for operation and is
selected by _stepper when available (force this module with
KRFLOW_FORCE_PYTHON=1).

The evolved state is the spherical coefficient f on the log grid.  Each
right-hand-side evaluation rebuilds h = f + df/dx and xi = -(dh/dx)/h.
Boundary closures:

* origin: two ghost nodes below r_min, filled from the quadratic-in-r
  Lagrange fit through the first three nodes.  The metric coefficients are
  smooth functions of r at the origin, so this encodes regularity there and
  keeps the closure error O((r_min dx)^2); plain one-sided stencils leave a
  non-convergent boundary error that diffusion smears into the bulk.
* tail: one-sided differences plus xi[-1] = xi[-2] (zero gradient of xi in
  log r, a power-law extension of h).
"""
from __future__ import annotations

import numpy as np

OK = 0
UNSTABLE = 1
BLOWUP = 2

_TINY = 1e-300


def _lagrange3(rs, rq):
    r0, r1, r2 = rs
    return np.array([
        (rq - r1) * (rq - r2) / ((r0 - r1) * (r0 - r2)),
        (rq - r0) * (rq - r2) / ((r1 - r0) * (r1 - r2)),
        (rq - r0) * (rq - r1) / ((r2 - r0) * (r2 - r1)),
    ])


class StepperWorkspace:
    """Grid-dependent constants for the stepping loop."""

    def __init__(self, r, dx, ndim):
        self.r = np.asarray(r, dtype=np.float64)
        self.dx = float(dx)
        self.ndim = int(ndim)
        r0 = self.r[0]
        self.wg1 = _lagrange3(self.r[:3], r0 * np.exp(-self.dx))
        self.wg2 = _lagrange3(self.r[:3], r0 * np.exp(-2 * self.dx))

    def fx(self, f):
        dx = self.dx
        g1 = self.wg1 @ f[:3]
        out = np.empty_like(f)
        out[0] = (f[1] - g1) / (2 * dx)
        out[1:-1] = (f[2:] - f[:-2]) / (2 * dx)
        out[-1] = (3 * f[-1] - 4 * f[-2] + f[-3]) / (2 * dx)
        return out

    def compute_h(self, f):
        return f + self.fx(f)

    def _h_and_xi(self, f):
        dx = self.dx
        g1 = self.wg1 @ f[:3]
        g2 = self.wg2 @ f[:3]
        h = f + self.fx(f)
        h_g1 = g1 + (f[0] - g2) / (2 * dx)
        xi = np.empty_like(f)
        xi[0] = (h[1] - h_g1) / (2 * dx)
        xi[1:-1] = (h[2:] - h[:-2]) / (2 * dx)
        xi[-1] = (3 * h[-1] - 4 * h[-2] + h[-3]) / (2 * dx)
        np.divide(xi, -h, out=xi)
        xi[-1] = xi[-2]
        return h, xi

    def compute_xi(self, f):
        return self._h_and_xi(f)[1]

    def rhs(self, f):
        h, xi = self._h_and_xi(f)
        return (-xi + (self.ndim - 1) * (h / f - 1)) / self.r

    def cfl_dt(self, f, dt_safety):
        h = self.compute_h(f)
        m = np.min(self.r * h / (1 + (self.ndim - 1) * (h / f)))
        return dt_safety * self.dx * self.dx * m

    def step_once(self, f, dt):
        """Single explicit RK4 step; returns (f_new, ok)."""
        k1 = self.rhs(f)
        k2 = self.rhs(f + (dt / 2) * k1)
        k3 = self.rhs(f + (dt / 2) * k2)
        k4 = self.rhs(f + dt * k3)
        f_new = f + (dt / 6) * (k1 + 2 * k2 + 2 * k3 + k4)
        if not np.all(np.isfinite(f_new)) or np.any(f_new <= 0):
            return f_new, False
        ok = bool(np.all(self.compute_h(f_new) > 0))
        return f_new, ok

    def advance(self, f, t, t_target, dt_safety, h0, blowup_ratio, max_halvings):
        """March f from t to t_target with the adaptive parabolic controller.

        Returns (f, t, steps, status, eq_lo, eq_hi); eq_lo/eq_hi are the
        extremes of h(., t)/h(., 0) seen along the way.  The step sequence
        is a pure function of (f, t, t_target), which is what makes
        snapshot resume bit-exact.
        """
        steps = 0
        eq_lo, eq_hi = np.inf, -np.inf
        while t < t_target and t_target - t > _TINY * max(1.0, t_target):
            dt = self.cfl_dt(f, dt_safety)
            if not np.isfinite(dt) or dt <= 0:
                return f, t, steps, UNSTABLE, eq_lo, eq_hi
            if dt > t_target - t:
                dt = t_target - t
            accepted = False
            for _ in range(max_halvings + 1):
                f_new, ok = self.step_once(f, dt)
                if ok:
                    accepted = True
                    break
                dt /= 2
            if not accepted:
                return f, t, steps, UNSTABLE, eq_lo, eq_hi
            f = f_new
            t = t_target if dt >= t_target - t else t + dt
            steps += 1
            ratio = self.compute_h(f) / h0
            lo = float(np.min(ratio))
            hi = float(np.max(ratio))
            eq_lo = min(eq_lo, lo)
            eq_hi = max(eq_hi, hi)
            if max(hi, 1 / max(lo, _TINY)) > blowup_ratio:
                return f, t, steps, BLOWUP, eq_lo, eq_hi
        return f, t, steps, OK, eq_lo, eq_hi


def make_workspace(r, dx, ndim):
    return StepperWorkspace(r, dx, ndim)
