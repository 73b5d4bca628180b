"""Curvature of a U(n)-invariant metric in the adapted unitary frame.

At z = (z1, 0, ..., 0) with unit frame e1 = h^{-1/2} d/dz1,
e_i = f^{-1/2} d/dz_i (i >= 2), the only independent curvature entries are

    A = R(e1, e1b, e1, e1b) = xi'/h
    B = R(e1, e1b, e_i, e_ib)
      = (1/(r f)^2) int_0^r xi'(t) (t f(t)) dt
    C = R(e_i, e_ib, e_i, e_ib) = 2 R(e_i, e_ib, e_j, e_jb)
      = (2/(r f)^2) int_0^r h(s) xi(s) ds

and C equals -2 f'/f^2 identically (int_0^r h xi ds = r (f - h)); both
routes are computed and their discrepancy reported.  The inner factor
t f(t) in B is the cumulative mass int_0^t h ds, the reading that makes
the printed C formula consistent with -2 f'/f^2.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DimensionTooSmall
from .grid import Profile, ddx, cumint
from .metric import MetricProfile

POSITIVE = "positive"
NONNEGATIVE = "nonnegative"
NONPOSITIVE = "nonpositive"
INDEFINITE = "indefinite"
FLAT = "flat"

BOUNDED = "bounded"
UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class CurvatureProfile:
    """Frame curvature components sampled on the metric grid.

    b and c are None for n = 1, where the spherical directions do not
    exist; accessing them through b_required/c_required raises.
    """

    n: int
    a: Profile
    b: Optional[Profile]
    c: Optional[Profile]
    scalar: Profile
    c_alt: Optional[Profile]
    c_route_discrepancy: float

    def b_required(self) -> Profile:
        if self.b is None:
            raise DimensionTooSmall("component B needs n >= 2")
        return self.b

    def c_required(self) -> Profile:
        if self.c is None:
            raise DimensionTooSmall("component C needs n >= 2")
        return self.c


def xi_derivative_r(m: MetricProfile) -> np.ndarray:
    """xi'(r) = (d xi / dx) / r by centered log-grid differences."""
    return ddx(m.xi.values, m.grid.dx) / m.grid.nodes


def curvature_components(m: MetricProfile) -> CurvatureProfile:
    grid = m.grid
    r = grid.nodes
    xi_r = xi_derivative_r(m)
    h = m.h.values
    f = m.f.values
    a_vals = xi_r / h
    a = Profile(grid, a_vals)

    if m.n < 2:
        scalar = Profile(grid, a_vals.copy())
        return CurvatureProfile(n=m.n, a=a, b=None, c=None, scalar=scalar,
                                c_alt=None, c_route_discrepancy=0.0)

    s0, c0 = m.xi_origin_slope, m.c0
    rf2 = (r * f) ** 2
    # B: integrand xi'(t) * (t f(t)) dt = (dxi/dx) * f * r dx
    xi_x = ddx(m.xi.values, grid.dx)
    origin_b = s0 * c0 * grid.r_min ** 2 / 2
    b_vals = (origin_b + cumint(xi_x * f * r, grid.dx)) / rf2
    # C, integral route: (2/(rf)^2) int h xi ds
    origin_c = c0 * s0 * grid.r_min ** 2 / 2
    c_vals = 2 * (origin_c + cumint(h * m.xi.values * r, grid.dx)) / rf2
    # C, derivative route: -2 f'/f^2 with f' = (h - f)/r
    c_alt_vals = 2 * (f - h) / (r * f * f)
    scale = np.maximum(np.abs(c_vals), np.abs(c_alt_vals))
    denom = np.maximum(scale, 1e-300)
    disc = float(np.max(np.abs(c_vals - c_alt_vals) /
                        np.where(scale > 1e-12, denom, 1.0)))

    scalar_vals = a_vals + 2 * (m.n - 1) * b_vals + m.n * (m.n - 1) / 2 * c_vals
    return CurvatureProfile(
        n=m.n, a=a, b=Profile(grid, b_vals), c=Profile(grid, c_vals),
        scalar=Profile(grid, scalar_vals), c_alt=Profile(grid, c_alt_vals),
        c_route_discrepancy=disc)


def scalar_curvature(m: MetricProfile) -> Profile:
    """Frame sum A + 2(n-1)B + n(n-1)C/2 (just A for n = 1)."""
    return curvature_components(m).scalar


def bisectional_sign(m: MetricProfile, tol=1e-10) -> str:
    """Sign verdict from xi' over the grid: positive iff xi' > 0."""
    xi_x = ddx(m.xi.values, m.grid.dx)
    scale = max(1.0, float(np.max(np.abs(m.xi.values))))
    lo = float(np.min(xi_x))
    hi = float(np.max(xi_x))
    cut = tol * scale
    if hi <= cut and lo >= -cut:
        return FLAT
    if lo > cut:
        return POSITIVE
    if hi < -cut:
        return NONPOSITIVE
    if lo >= -cut:
        return NONNEGATIVE
    if hi <= cut:
        return NONPOSITIVE
    return INDEFINITE


@dataclass(frozen=True)
class BoundedCurvatureReport:
    verdict: str
    sup_ratio: float
    tail_trend: float       # per-decade growth exponent of the tail envelope


def bounded_curvature_test(m: MetricProfile) -> BoundedCurvatureReport:
    """Bounded curvature iff |xi'/h| stays bounded.

    The tail trend is measured on decade envelopes (maxima per decade), so
    both smooth growth and families of narrowing spikes register; unbounded
    verdict when the envelope grows with per-decade exponent above 0.05.
    """
    ratio = np.abs(xi_derivative_r(m)) / m.h.values
    sup = float(np.max(ratio))
    x = np.asarray(m.grid.x, dtype=float)
    dec = math.log(10.0)
    last = ratio[x >= x[-1] - dec]
    prev = ratio[(x >= x[-1] - 2 * dec) & (x < x[-1] - dec)]
    # floor at discretization-noise level so exactly-flat stretches do not
    # fabricate trends against ulp-level neighbours
    floor = max(sup, 1e-290) * 1e-13
    m_last = max(float(np.max(last)), floor)
    m_prev = max(float(np.max(prev)), floor) if prev.size else floor
    trend = math.log10(m_last / m_prev)
    verdict = UNBOUNDED if trend > 0.05 else BOUNDED
    return BoundedCurvatureReport(verdict, sup, float(trend))
