"""Structural conditions on the generating function and volume growth.

The tail conditions are stated through the integral T(r) = int_1^r (1-xi)/s ds:

    c1: some band 0 <= alpha <= beta < 1 traps xi in integral mean,
        with both sup_{a<r} int (alpha-xi)/s and sup int (xi-beta)/s <= gamma;
    c2: xi -> 1, T diverges, and T never drops more than delta;
    c3: xi -> 1 and T converges to a finite limit b.

Any finite-grid verdict is a fit; each record carries the measured evidence
(sups, increments, extrapolated limits) next to the boolean.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import IncompleteMetric
from .grid import Profile, cumint, interp_linear
from .metric import (MetricProfile, completeness_test, tail_exponent,
                     _rho_profile, INCOMPLETE)

DECADE = math.log(10.0)

# Divergence detection: the absolute growth rule (>= 0.1 per decade over the
# last two decades), extended by a decade-increment ratio test so that slowly
# divergent tails are still recognized on very large grids where the absolute
# per-decade growth has fallen under 0.1.
GROWTH_PER_DECADE = 0.1
RATIO_DIVERGENT = 0.98
RATIO_CONVERGENT = 0.90
XI_LIMIT_TOL = 0.05


@dataclass(frozen=True)
class TailAnalysis:
    diverges: Optional[bool]        # None when inconclusive
    limit: Optional[float]          # extrapolated T(inf) when convergent
    delta: float                    # max drawdown of T (>= 0)
    increments: tuple               # (previous, last) decade increments
    xi_limit: float
    anchor_value: float             # T at the anchor r = 1


def _cumulative_from_one(m: MetricProfile):
    grid = m.grid
    one_minus_xi = 1.0 - m.xi.values
    w = cumint(one_minus_xi, grid.dx)
    if grid.r_min <= 1.0 <= grid.r_max:
        x_anchor = np.asarray(0.0, dtype=grid.dtype)
    else:
        x_anchor = grid.x[0]
    w_anchor = interp_linear(x_anchor, grid.x, w)[0]
    return w - w_anchor, float(w_anchor)


def tail_integral_analysis(m: MetricProfile) -> TailAnalysis:
    grid = m.grid
    t_vals = _cumulative_from_one(m)[0]
    x = grid.x
    # decade increments of T
    q = interp_linear(np.array([x[-1] - 2 * DECADE, x[-1] - DECADE, x[-1]],
                               dtype=grid.dtype), x, t_vals)
    d_prev = float(q[1] - q[0])
    d_last = float(q[2] - q[1])

    one_minus = 1.0 - m.xi.values
    floor = 1e-300
    trend = tail_exponent(np.maximum(np.abs(one_minus), floor), grid,
                          decades=1.0)
    mask = x >= x[-1] - DECADE
    tail_mean = float(np.mean(one_minus[mask]))
    if trend <= -0.005 and tail_mean > 0:
        xi_limit = 1.0
    elif abs(trend) <= 0.005:
        xi_limit = 1.0 - tail_mean
    else:
        xi_limit = 1.0 - float(one_minus[-1])

    diverges: Optional[bool]
    limit: Optional[float] = None
    positive = d_last > 0 and d_prev > 0
    if positive and (min(d_last, d_prev) >= GROWTH_PER_DECADE
                     or d_last / d_prev >= RATIO_DIVERGENT):
        diverges = True
    elif d_prev <= 0 or d_last <= 0 or d_last / d_prev <= RATIO_CONVERGENT:
        diverges = False
        ratio = 0.0 if d_prev <= 0 or d_last <= 0 else d_last / d_prev
        ratio = min(max(ratio, 0.0), RATIO_CONVERGENT)
        limit = float(t_vals[-1]) + d_last * ratio / (1 - ratio)
    else:
        diverges = None

    running_max = np.maximum.accumulate(t_vals)
    delta = float(np.max(running_max - t_vals))
    return TailAnalysis(diverges=diverges, limit=limit, delta=max(0.0, delta),
                        increments=(d_prev, d_last), xi_limit=float(xi_limit),
                        anchor_value=float(t_vals[-1]))


@dataclass(frozen=True)
class C1Result:
    holds: bool
    alpha: float
    beta: float
    gamma: float
    note: str = ""


@dataclass(frozen=True)
class C2Result:
    holds: bool
    delta: float
    note: str = ""


@dataclass(frozen=True)
class C3Result:
    holds: bool
    b: float
    note: str = ""


@dataclass(frozen=True)
class GrowthResult:
    cigar: bool
    conoid: bool
    limsup_2n: float
    limsup_n: float
    sandwich_low: float
    sandwich_high: float


@dataclass(frozen=True)
class ClassificationReport:
    c1: C1Result
    c2: C2Result
    c3: C3Result
    growth: Optional[GrowthResult]
    xi_limit: Optional[float]


def _pair_sup(values: np.ndarray, dx) -> float:
    """sup over grid pairs a < r of the cumulative integral of values dx."""
    s = cumint(values, dx)
    running_min = np.minimum.accumulate(s)
    return float(np.max(s - running_min))


def check_c1(m: MetricProfile) -> C1Result:
    grid = m.grid
    x = grid.x
    analysis = tail_integral_analysis(m)
    mask = x >= x[-1] - DECADE
    alpha = max(0.0, float(np.min(m.xi.values)))
    beta = float(np.quantile(np.asarray(m.xi.values[mask], dtype=float), 0.95))
    beta = max(alpha, beta)

    sup_lo = _pair_sup(alpha - m.xi.values, grid.dx)
    sup_hi = _pair_sup(m.xi.values - beta, grid.dx)
    # stability under tail extension: recompute without the last half decade
    cut = int(np.searchsorted(x, x[-1] - DECADE / 2))
    cut = max(cut, 16)
    sup_lo_cut = _pair_sup((alpha - m.xi.values)[:cut], grid.dx)
    sup_hi_cut = _pair_sup((m.xi.values - beta)[:cut], grid.dx)
    stable = (abs(sup_lo - sup_lo_cut) <= max(0.05, 0.02 * abs(sup_lo))
              and abs(sup_hi - sup_hi_cut) <= max(0.05, 0.02 * abs(sup_hi)))

    gamma = max(sup_lo, sup_hi, 0.0)
    band_ok = beta <= 0.98 and analysis.xi_limit <= beta + 0.02
    holds = bool(band_ok and stable)
    note = "" if holds else (
        "xi tail exceeds the admissible band" if not band_ok
        else "integral sups not stable under tail extension")
    return C1Result(holds=holds, alpha=alpha, beta=beta, gamma=gamma, note=note)


def check_c2(m: MetricProfile) -> C2Result:
    analysis = tail_integral_analysis(m)
    to_one = (1.0 - analysis.xi_limit) <= XI_LIMIT_TOL
    if analysis.diverges is None:
        return C2Result(holds=False, delta=analysis.delta,
                        note="inconclusive divergence test")
    holds = bool(to_one and analysis.diverges)
    note = "" if holds else ("xi does not tend to 1" if not to_one
                             else "tail integral converges")
    return C2Result(holds=holds, delta=analysis.delta, note=note)


def check_c3(m: MetricProfile) -> C3Result:
    analysis = tail_integral_analysis(m)
    to_one = (1.0 - analysis.xi_limit) <= XI_LIMIT_TOL
    if analysis.diverges is None:
        return C3Result(holds=False, b=float("nan"),
                        note="inconclusive divergence test")
    holds = bool(to_one and not analysis.diverges)
    b = analysis.limit if analysis.limit is not None else float("nan")
    note = "" if holds else ("xi does not tend to 1" if not to_one
                             else "tail integral diverges")
    return C3Result(holds=holds, b=float(b), note=note)


def volume_growth_class(m: MetricProfile) -> GrowthResult:
    """Cigar/conoid verdicts from the growth of v = (r f)^n against rho."""
    comp = completeness_test(m)
    if comp.verdict == INCOMPLETE:
        raise IncompleteMetric("volume growth classification needs completeness")
    grid = m.grid
    n = m.n
    v = (grid.nodes * m.f.values) ** n
    rho = _rho_profile(m)
    w2n = v / rho ** (2 * n)
    wn = v / rho ** n

    slope_2n = tail_exponent(w2n, grid, decades=2.0)
    slope_n = tail_exponent(wn, grid, decades=2.0)
    conoid = bool(slope_2n >= -0.05 and w2n[-1] > 0)
    cigar = bool(slope_n <= 0.05)

    # volume-growth sandwich constants, measured beyond unit distance
    mask = rho >= 1.0
    if np.any(mask):
        sandwich_low = float(np.max(rho[mask] ** n / v[mask]))
        sandwich_high = float(np.max(v[mask] / rho[mask] ** (2 * n)))
    else:
        sandwich_low = sandwich_high = float("nan")
    return GrowthResult(cigar=cigar, conoid=conoid,
                        limsup_2n=float(w2n[-1]), limsup_n=float(wn[-1]),
                        sandwich_low=sandwich_low, sandwich_high=sandwich_high)


def classify_metric(m: MetricProfile) -> ClassificationReport:
    """Full condition report; growth is omitted for incomplete metrics."""
    c1 = check_c1(m)
    c2 = check_c2(m)
    c3 = check_c3(m)
    analysis = tail_integral_analysis(m)
    try:
        growth = volume_growth_class(m)
    except IncompleteMetric:
        growth = None
    return ClassificationReport(c1=c1, c2=c2, c3=c3, growth=growth,
                                xi_limit=analysis.xi_limit)
