# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled stepping kernel for the radial flow.

Mirrors _kernels_py.StepperWorkspace operation for operation; see that
module for the scheme documentation.  This version keeps the whole step
loop in C, which is what makes million-step runs practical.
"""

import numpy as np

from libc.math cimport isfinite, INFINITY

OK = 0
UNSTABLE = 1
BLOWUP = 2

cdef int _OK = 0
cdef int _UNSTABLE = 1
cdef int _BLOWUP = 2

cdef double _TINY = 1e-300


cdef class StepperWorkspace:
    """Grid-dependent constants plus scratch storage for the stepping loop."""

    cdef readonly double dx
    cdef readonly int ndim
    cdef int n
    cdef double[::1] r
    cdef double wg1[3]
    cdef double wg2[3]
    cdef double[::1] h, xi, k1, k2, k3, k4, ftmp, fnew, hnew

    def __init__(self, r, dx, ndim):
        self.r = np.ascontiguousarray(r, dtype=np.float64)
        self.dx = float(dx)
        self.ndim = int(ndim)
        self.n = self.r.shape[0]
        cdef double r0 = self.r[0], r1 = self.r[1], r2 = self.r[2]
        cdef double q1 = r0 * np.exp(-self.dx)
        cdef double q2 = r0 * np.exp(-2 * self.dx)
        self.wg1[0] = (q1 - r1) * (q1 - r2) / ((r0 - r1) * (r0 - r2))
        self.wg1[1] = (q1 - r0) * (q1 - r2) / ((r1 - r0) * (r1 - r2))
        self.wg1[2] = (q1 - r0) * (q1 - r1) / ((r2 - r0) * (r2 - r1))
        self.wg2[0] = (q2 - r1) * (q2 - r2) / ((r0 - r1) * (r0 - r2))
        self.wg2[1] = (q2 - r0) * (q2 - r2) / ((r1 - r0) * (r1 - r2))
        self.wg2[2] = (q2 - r0) * (q2 - r1) / ((r2 - r0) * (r2 - r1))
        self.h = np.zeros(self.n, dtype=np.float64)
        self.xi = np.zeros(self.n, dtype=np.float64)
        self.k1 = np.zeros(self.n, dtype=np.float64)
        self.k2 = np.zeros(self.n, dtype=np.float64)
        self.k3 = np.zeros(self.n, dtype=np.float64)
        self.k4 = np.zeros(self.n, dtype=np.float64)
        self.ftmp = np.zeros(self.n, dtype=np.float64)
        self.fnew = np.zeros(self.n, dtype=np.float64)
        self.hnew = np.zeros(self.n, dtype=np.float64)

    cdef void _h_of(self, double[::1] f, double[::1] h) nogil:
        cdef int i, n = self.n
        cdef double inv2dx = 1.0 / (2.0 * self.dx)
        cdef double g1 = self.wg1[0] * f[0] + self.wg1[1] * f[1] + self.wg1[2] * f[2]
        h[0] = f[0] + (f[1] - g1) * inv2dx
        for i in range(1, n - 1):
            h[i] = f[i] + (f[i + 1] - f[i - 1]) * inv2dx
        h[n - 1] = f[n - 1] + (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) * inv2dx

    cdef void _h_xi_of(self, double[::1] f, double[::1] h, double[::1] xi) nogil:
        cdef int i, n = self.n
        cdef double inv2dx = 1.0 / (2.0 * self.dx)
        cdef double g1 = self.wg1[0] * f[0] + self.wg1[1] * f[1] + self.wg1[2] * f[2]
        cdef double g2 = self.wg2[0] * f[0] + self.wg2[1] * f[1] + self.wg2[2] * f[2]
        self._h_of(f, h)
        cdef double h_g1 = g1 + (f[0] - g2) * inv2dx
        xi[0] = -((h[1] - h_g1) * inv2dx) / h[0]
        for i in range(1, n - 1):
            xi[i] = -((h[i + 1] - h[i - 1]) * inv2dx) / h[i]
        xi[n - 1] = xi[n - 2]

    cdef void _rhs(self, double[::1] f, double[::1] out) nogil:
        cdef int i, n = self.n
        cdef double nd1 = self.ndim - 1.0
        self._h_xi_of(f, self.h, self.xi)
        for i in range(n):
            out[i] = (-self.xi[i] + nd1 * (self.h[i] / f[i] - 1.0)) / self.r[i]

    cdef double _cfl(self, double[::1] f, double dt_safety) nogil:
        cdef int i, n = self.n
        cdef double nd1 = self.ndim - 1.0
        cdef double m = INFINITY
        cdef double v
        self._h_of(f, self.h)
        for i in range(n):
            v = self.r[i] * self.h[i] / (1.0 + nd1 * (self.h[i] / f[i]))
            if v < m:
                m = v
        return dt_safety * self.dx * self.dx * m

    cdef bint _rk4(self, double[::1] f, double dt, double[::1] out) nogil:
        cdef int i, n = self.n
        cdef double half = dt / 2.0, sixth = dt / 6.0
        cdef double v
        cdef bint ok = True
        self._rhs(f, self.k1)
        for i in range(n):
            self.ftmp[i] = f[i] + half * self.k1[i]
        self._rhs(self.ftmp, self.k2)
        for i in range(n):
            self.ftmp[i] = f[i] + half * self.k2[i]
        self._rhs(self.ftmp, self.k3)
        for i in range(n):
            self.ftmp[i] = f[i] + dt * self.k3[i]
        self._rhs(self.ftmp, self.k4)
        for i in range(n):
            v = f[i] + sixth * (self.k1[i] + 2.0 * self.k2[i] + 2.0 * self.k3[i] + self.k4[i])
            out[i] = v
            if not isfinite(v) or v <= 0.0:
                ok = False
        if not ok:
            return False
        self._h_of(out, self.hnew)
        for i in range(n):
            if not (self.hnew[i] > 0.0):
                return False
        return True

    # -- python-facing API, matching _kernels_py --

    def compute_h(self, f):
        cdef double[::1] fv = np.ascontiguousarray(f, dtype=np.float64)
        out = np.empty(self.n, dtype=np.float64)
        cdef double[::1] ov = out
        self._h_of(fv, ov)
        return out

    def compute_xi(self, f):
        cdef double[::1] fv = np.ascontiguousarray(f, dtype=np.float64)
        out = np.empty(self.n, dtype=np.float64)
        cdef double[::1] ov = out
        self._h_xi_of(fv, self.h, ov)
        return out

    def rhs(self, f):
        cdef double[::1] fv = np.ascontiguousarray(f, dtype=np.float64)
        out = np.empty(self.n, dtype=np.float64)
        cdef double[::1] ov = out
        self._rhs(fv, ov)
        return out

    def cfl_dt(self, f, dt_safety):
        cdef double[::1] fv = np.ascontiguousarray(f, dtype=np.float64)
        return self._cfl(fv, dt_safety)

    def step_once(self, f, dt):
        cdef double[::1] fv = np.ascontiguousarray(f, dtype=np.float64)
        out = np.empty(self.n, dtype=np.float64)
        cdef double[::1] ov = out
        cdef bint ok = self._rk4(fv, dt, ov)
        return out, bool(ok)

    def advance(self, f, t, t_target, dt_safety, h0, blowup_ratio, max_halvings):
        """Adaptive march to t_target; see _kernels_py.StepperWorkspace.advance."""
        fout = np.array(f, dtype=np.float64, copy=True)
        cdef double[::1] fv = fout
        cdef double[::1] h0v = np.ascontiguousarray(h0, dtype=np.float64)
        cdef double tc = t, tt = t_target, safety = dt_safety
        cdef double guard = blowup_ratio
        cdef double tstop = _TINY * (1.0 if tt < 1.0 else tt)
        cdef int max_h = max_halvings
        cdef long steps = 0
        cdef int status = _OK
        cdef double eq_lo = INFINITY, eq_hi = -INFINITY
        cdef double dt, lo, hi, ratio
        cdef int i, attempt, n = self.n
        cdef bint ok
        with nogil:
            while tc < tt and tt - tc > tstop:
                dt = self._cfl(fv, safety)
                if not isfinite(dt) or dt <= 0.0:
                    status = _UNSTABLE
                    break
                if dt > tt - tc:
                    dt = tt - tc
                ok = False
                for attempt in range(max_h + 1):
                    ok = self._rk4(fv, dt, self.fnew)
                    if ok:
                        break
                    dt = dt / 2.0
                if not ok:
                    status = _UNSTABLE
                    break
                for i in range(n):
                    fv[i] = self.fnew[i]
                if dt >= tt - tc:
                    tc = tt
                else:
                    tc = tc + dt
                steps = steps + 1
                self._h_of(fv, self.hnew)
                lo = INFINITY
                hi = -INFINITY
                for i in range(n):
                    ratio = self.hnew[i] / h0v[i]
                    if ratio < lo:
                        lo = ratio
                    if ratio > hi:
                        hi = ratio
                if lo < eq_lo:
                    eq_lo = lo
                if hi > eq_hi:
                    eq_hi = hi
                if hi > guard or 1.0 / (lo if lo > _TINY else _TINY) > guard:
                    status = _BLOWUP
                    break
        return fout, tc, steps, status, eq_lo, eq_hi


def make_workspace(r, dx, ndim):
    return StepperWorkspace(r, dx, ndim)
