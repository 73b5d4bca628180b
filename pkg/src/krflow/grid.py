"""Logarithmic radial grids and sampled profiles.

The shared discretization for everything in this package is a log-uniform
grid in r = |z|^2.  All quadrature and differentiation happens in the
coordinate x = log r, where integrals of the form int phi(s)/s ds become
plain sums of phi dx and power laws become straight lines.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import GridMismatch, OutOfDomain

MIN_COUNT = 16
SPAN_FACTOR = 1e-6          # r_min must not exceed SPAN_FACTOR * r_max
LOG_UNIFORM_RTOL = 1e-9


@dataclass(frozen=True)
class RadialGrid:
    """Strictly increasing, log-uniform radii r_i > 0.

    Nodes may be float64 (default) or longdouble; the wider type exists for
    comparison constructions whose radii overflow double precision.
    """

    nodes: np.ndarray
    r_min: float = field(init=False)
    r_max: float = field(init=False)
    count: int = field(init=False)
    x: np.ndarray = field(init=False, repr=False)   # log r
    dx: float = field(init=False)

    def __post_init__(self):
        nodes = np.asarray(self.nodes)
        if nodes.ndim != 1 or nodes.size < MIN_COUNT:
            raise ValueError(f"grid needs >= {MIN_COUNT} nodes, got {nodes.size}")
        if not np.all(nodes > 0):
            raise ValueError("grid radii must be positive")
        x = np.log(nodes)
        steps = np.diff(x)
        if np.any(steps <= 0):
            raise ValueError("grid radii must be strictly increasing")
        dx = (x[-1] - x[0]) / (nodes.size - 1)
        if np.max(np.abs(steps - dx)) > LOG_UNIFORM_RTOL * abs(dx):
            raise ValueError("grid is not log-uniform")
        if nodes[0] > SPAN_FACTOR * nodes[-1] * (1 + 1e-12):
            raise ValueError(
                f"r_min={nodes[0]:.3g} must be <= 1e-6 * r_max={nodes[-1]:.3g}")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "r_min", float(nodes[0]))
        object.__setattr__(self, "r_max", float(nodes[-1]))
        object.__setattr__(self, "count", int(nodes.size))
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "dx", float(dx))

    @classmethod
    def logspace(cls, r_min, r_max, count, dtype=np.float64) -> "RadialGrid":
        """Log-uniform grid from r_min to r_max inclusive."""
        lo = np.log(np.asarray(r_min, dtype=dtype))
        hi = np.log(np.asarray(r_max, dtype=dtype))
        x = np.linspace(lo, hi, count, dtype=dtype)
        return cls(np.exp(x))

    @property
    def dtype(self):
        return self.nodes.dtype

    def same_as(self, other: "RadialGrid") -> bool:
        return self is other or (
            self.count == other.count and np.array_equal(self.nodes, other.nodes))

    def require_radius(self, r) -> None:
        if r < 0 or r > self.r_max * (1 + 1e-12):
            raise OutOfDomain(f"radius {r} outside [0, {self.r_max}]")

    def index_at_or_above(self, r) -> int:
        """Smallest node index with r_i >= r."""
        self.require_radius(r)
        return int(np.searchsorted(self.nodes, r, side="left"))


@dataclass(frozen=True)
class Profile:
    """One real value per grid node."""

    grid: RadialGrid
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values)
        if values.shape != (self.grid.count,):
            raise ValueError(
                f"profile length {values.shape} != grid count {self.grid.count}")
        if not np.all(np.isfinite(values)):
            raise ValueError("profile values must be finite")
        object.__setattr__(self, "values", values)

    def require_same_grid(self, other: "Profile") -> None:
        if not self.grid.same_as(other.grid):
            raise GridMismatch("profiles live on different grids")

    def with_values(self, values) -> "Profile":
        return Profile(self.grid, values)


def ddx(values: np.ndarray, dx: float) -> np.ndarray:
    """d/dx by centered differences, one-sided second order at the ends."""
    v = np.asarray(values)
    out = np.empty_like(v)
    out[1:-1] = (v[2:] - v[:-2]) / (2 * dx)
    out[0] = (-3 * v[0] + 4 * v[1] - v[2]) / (2 * dx)
    out[-1] = (3 * v[-1] - 4 * v[-2] + v[-3]) / (2 * dx)
    return out


def cumint(values: np.ndarray, dx: float) -> np.ndarray:
    """Cumulative integral on a uniform grid, fourth order.

    Cell integrals come from the cubic through the four nearest samples
    (one-sided cubics in the first and last cell), so refinement studies
    see slope ~4.  Returns I with I[0] = 0.
    """
    v = np.asarray(values)
    n = v.size
    if n < 4:
        raise ValueError("cumint needs at least 4 samples")
    cells = np.empty(n - 1, dtype=v.dtype)
    cells[1:-1] = (-v[:-3] + 13 * v[1:-2] + 13 * v[2:-1] - v[3:]) * (dx / 24)
    cells[0] = (9 * v[0] + 19 * v[1] - 5 * v[2] + v[3]) * (dx / 24)
    cells[-1] = (9 * v[-1] + 19 * v[-2] - 5 * v[-3] + v[-4]) * (dx / 24)
    out = np.empty(n, dtype=v.dtype)
    out[0] = 0
    np.cumsum(cells, out=out[1:])
    return out


def interp_linear(xq, xs, ys):
    """Linear interpolation that preserves the input dtype (np.interp does not
    for longdouble).  xs must be increasing; xq is clipped to the range."""
    xq = np.atleast_1d(np.asarray(xq, dtype=ys.dtype))
    xq = np.clip(xq, xs[0], xs[-1])
    idx = np.clip(np.searchsorted(xs, xq, side="right") - 1, 0, xs.size - 2)
    x0 = xs[idx]
    w = (xq - x0) / (xs[idx + 1] - x0)
    return (1 - w) * ys[idx] + w * ys[idx + 1]
