"""Built-in generating-function families and custom tables."""
from __future__ import annotations

import numpy as np

from .errors import UnknownPreset, InvalidParams
from .grid import RadialGrid, Profile
from .metric import MetricProfile

PRESET_NAMES = ("euclidean", "cigar", "conoid", "c2_log", "custom_table")


def _euclidean(r):
    return np.zeros_like(r)


def _cigar(r):
    return r / (1 + r)


def _conoid(r, beta):
    return beta * r / (1 + r)


def _c2_log(r):
    return 1 - 1 / (1 + np.log1p(r))


def xi_function(name, params=None):
    """Return (callable xi(r), slope xi'(0)) for a preset."""
    params = dict(params or {})
    if name == "euclidean":
        return _euclidean, 0.0
    if name == "cigar":
        return _cigar, 1.0
    if name == "conoid":
        beta = float(params.get("beta", 0.5))
        if not 0 < beta < 1:
            raise InvalidParams(f"conoid needs 0 < beta < 1, got {beta}")
        return lambda r: _conoid(r, beta), beta
    if name == "c2_log":
        return _c2_log, 1.0
    if name == "custom_table":
        return _table_function(params)
    raise UnknownPreset(f"unknown preset {name!r}; expected one of {PRESET_NAMES}")


def _table_function(params):
    points = params.get("points")
    if not points or len(points) < 2:
        raise InvalidParams("custom_table needs >= 2 (r, xi) pairs")
    pts = sorted((float(r), float(v)) for r, v in points)
    radii = np.array([p[0] for p in pts])
    vals = np.array([p[1] for p in pts])
    if np.any(np.diff(radii) <= 0):
        raise InvalidParams("custom_table radii must be strictly increasing")
    if radii[0] != 0.0 or vals[0] != 0.0:
        raise InvalidParams("custom_table must start at the pair (0, 0)")
    from scipy.interpolate import PchipInterpolator
    interp = PchipInterpolator(radii, vals, extrapolate=False)
    r_last, v_last = radii[-1], vals[-1]
    slope0 = float(interp.derivative()(0.0))

    def fn(r):
        r = np.asarray(r, dtype=float)
        out = np.where(r >= r_last, v_last, interp(np.clip(r, 0, r_last)))
        return out

    return fn, slope0


def preset_xi(name, params, grid: RadialGrid) -> Profile:
    """Sample a preset generating function on a grid."""
    fn, _ = xi_function(name, params)
    return Profile(grid, fn(grid.nodes))


def preset_metric(name, params, grid: RadialGrid, n=2, c0=1.0) -> MetricProfile:
    """Build the full metric for a preset."""
    fn, slope0 = xi_function(name, params)
    xi = Profile(grid, fn(grid.nodes))
    return MetricProfile.from_xi(n=n, xi=xi, c0=c0, slope0=slope0)
