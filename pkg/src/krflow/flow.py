"""Time integration of the radial flow and its diagnostics.

The evolution of g(t) reduces to a single radial PDE for the spherical
coefficient f:

    df/dt = d/dr log(h f^(n-1)) = [-xi + (n-1)(h/f - 1)] / r,

with h = (r f)' and xi = -r h'/h rebuilt from f at every stage.  The right
side is the radial form of minus the Ricci tensor: both eigenvalue equations
of dg/dt = -Ric collapse to this one relation, and it is regular at r = 0
(the bracket vanishes linearly).  Stepping is explicit RK4 under a parabolic
step bound, with halving retries; see _kernels_py for the scheme.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Sequence

import numpy as np

from ._stepper import make_workspace, UNSTABLE, BLOWUP, backend_name
from .errors import (StabilityViolation, BlowUp, TimeNotStored, OutOfDomain,
                     BallOutOfDomain, NonPositiveEpsilon)
from .grid import RadialGrid, Profile, interp_linear
from .metric import (MetricProfile, completeness_test, geodesic_radius,
                     _rho_profile, INCOMPLETE)


@dataclass(frozen=True)
class SolverTolerances:
    stability_retries: int = 20
    blowup_ratio: float = 1e12


@dataclass(frozen=True)
class FlowConfig:
    n: int
    grid: RadialGrid
    t_end: float
    dt_safety: float = 0.2
    boundary: str = "hold-xi-tail"
    tol: SolverTolerances = field(default_factory=SolverTolerances)

    def __post_init__(self):
        if not (0 < self.dt_safety <= 1):
            raise ValueError(f"dt_safety must be in (0, 1], got {self.dt_safety}")
        if not (math.isfinite(self.t_end) and self.t_end >= 0):
            raise ValueError(f"t_end must be finite and >= 0, got {self.t_end}")
        if self.boundary != "hold-xi-tail":
            raise ValueError(f"unknown tail rule {self.boundary!r}")


@dataclass(frozen=True)
class FlowState:
    t: float
    metric: MetricProfile


@dataclass(frozen=True)
class Trajectory:
    states: tuple
    config: FlowConfig
    provenance: str
    equivalence: tuple   # (inf, sup) of h(., t)/h(., 0) per stored state

    @property
    def times(self):
        return tuple(s.t for s in self.states)

    def state_at(self, t: float) -> FlowState:
        for s in self.states:
            if abs(s.t - t) <= 1e-9 * max(1.0, abs(t)):
                return s
        raise TimeNotStored(f"t={t} not among stored times {self.times}")


def _extrapolate_origin(grid: RadialGrid, values: np.ndarray) -> float:
    """Quadratic-in-r extrapolation of a smooth radial profile to r = 0."""
    r0, r1, r2 = grid.nodes[:3]
    w0 = r1 * r2 / ((r0 - r1) * (r0 - r2))
    w1 = r0 * r2 / ((r1 - r0) * (r1 - r2))
    w2 = r0 * r1 / ((r2 - r0) * (r2 - r1))
    return float(w0 * values[0] + w1 * values[1] + w2 * values[2])


def _slope_at_origin(grid: RadialGrid, xi: np.ndarray) -> float:
    r1, r2 = grid.nodes[0], grid.nodes[1]
    return float((xi[0] / r1 * r2 - xi[1] / r2 * r1) / (r2 - r1))


def materialize_state(grid: RadialGrid, n: int, f: np.ndarray, t: float,
                      workspace) -> FlowState:
    """Wrap an evolved f array as a FlowState, origin data by series."""
    h = workspace.compute_h(f)
    xi = workspace.compute_xi(f)
    c0 = _extrapolate_origin(grid, h)
    slope0 = _slope_at_origin(grid, xi)
    metric = MetricProfile(n=n, grid=grid, xi=Profile(grid, xi),
                           h=Profile(grid, h), f=Profile(grid, f.copy()),
                           c0=c0, xi_origin_slope=slope0)
    return FlowState(t=float(t), metric=metric)


def time_step(state: FlowState, dt: float, n: Optional[int] = None) -> FlowState:
    """One explicit RK4 step of the radial flow."""
    m = state.metric
    ndim = m.n if n is None else n
    if ndim != m.n:
        raise ValueError(f"dimension mismatch: state has n={m.n}, got {ndim}")
    ws = make_workspace(m.grid.nodes.astype(np.float64), m.grid.dx, ndim)
    f_new, ok = ws.step_once(m.f.values.astype(np.float64), dt)
    if not ok:
        raise StabilityViolation(
            f"step dt={dt:.3e} produced a non-positive metric; reduce dt")
    return materialize_state(m.grid, ndim, f_new, state.t + dt, ws)


def run_flow(xi0: Profile, config: FlowConfig, *, c0: float = 1.0,
             slope0: Optional[float] = None,
             output_times: Optional[Sequence[float]] = None,
             provenance: str = "", start_state: Optional[FlowState] = None,
             ) -> Trajectory:
    """Integrate to t_end, storing states at the requested output times.

    start_state resumes a run mid-trajectory (e.g. from a snapshot); the
    stepping decisions depend only on the current state, so a resumed run
    reproduces the uninterrupted one.
    """
    grid = config.grid
    if grid.dtype != np.float64:
        raise ValueError("flow integration requires a float64 grid")
    ws = make_workspace(grid.nodes, grid.dx, config.n)

    if start_state is not None:
        t = start_state.t
        f = start_state.metric.f.values.astype(np.float64).copy()
    else:
        t = 0.0
        m0 = MetricProfile.from_xi(n=config.n, xi=xi0, c0=c0, slope0=slope0)
        comp = completeness_test(m0)
        if comp.verdict == INCOMPLETE:
            warnings.warn("initial metric looks incomplete "
                          f"(tail exponent {comp.tail_exponent:.3f})")
        f = m0.f.values.astype(np.float64).copy()

    if output_times is None:
        outputs = [config.t_end] if config.t_end > t else []
    else:
        outputs = sorted({float(x) for x in output_times
                          if t < float(x) <= config.t_end})
        if config.t_end > t and (not outputs or outputs[-1] < config.t_end):
            outputs.append(config.t_end)

    h_base = ws.compute_h(f)
    states = [materialize_state(grid, config.n, f, t, ws)]
    equivalence = [(1.0, 1.0)]
    for t_out in outputs:
        f, t, steps, status, lo, hi = ws.advance(
            f, t, t_out, config.dt_safety, h_base,
            config.tol.blowup_ratio, config.tol.stability_retries)
        if status == UNSTABLE:
            raise StabilityViolation(
                f"no stable step found at t={t:.6g} after "
                f"{config.tol.stability_retries} halvings")
        if status == BLOWUP:
            raise BlowUp(f"equivalence constant exceeded "
                         f"{config.tol.blowup_ratio:.1e} at t={t:.6g}")
        states.append(materialize_state(grid, config.n, f, t, ws))
        ratio = states[-1].metric.h.values / h_base
        equivalence.append((float(np.min(ratio)), float(np.max(ratio))))
    return Trajectory(states=tuple(states), config=config,
                      provenance=provenance or f"backend={backend_name()}",
                      equivalence=tuple(equivalence))


def log_det_ratio(traj: Trajectory, t: float) -> Profile:
    """F(r, t) = log det g(t) - log det g(0) = delta log(h f^(n-1))."""
    s = traj.state_at(t)
    s0 = traj.states[0]
    if s is s0:
        return Profile(s.metric.grid, np.zeros(s.metric.grid.count))
    n = s.metric.n
    vals = (np.log(s.metric.h.values) + (n - 1) * np.log(s.metric.f.values)
            - np.log(s0.metric.h.values) - (n - 1) * np.log(s0.metric.f.values))
    return Profile(s.metric.grid, vals)


def rescaled_deviation(traj: Trajectory, t: float, R: float) -> float:
    """Sup over r <= R of the deviation of g(t)/h(0,t) from the flat metric."""
    s = traj.state_at(t)
    m = s.metric
    if R > m.grid.r_max * (1 + 1e-12):
        raise OutOfDomain(f"R={R} beyond r_max={m.grid.r_max}")
    mask = m.grid.nodes <= R
    if not np.any(mask):
        return 0.0
    dev_h = np.abs(m.h.values[mask] / m.c0 - 1)
    dev_f = np.abs(m.f.values[mask] / m.c0 - 1)
    return float(max(np.max(dev_h), np.max(dev_f)))


def h_origin_history(traj: Trajectory) -> np.ndarray:
    return np.array([s.metric.c0 for s in traj.states])


def xi_radial_derivative(state: FlowState) -> np.ndarray:
    """xi'(r) of an evolved state, consistent with the tail closure.

    The scheme holds xi at its last-node value (zero gradient in log r), so
    the derivative at the final node is 0 by construction; a one-sided
    stencil there would read through the copied value and report a spurious
    negative.
    """
    from .grid import ddx
    m = state.metric
    xi_x = ddx(m.xi.values, m.grid.dx)
    xi_x[-1] = (m.xi.values[-1] - m.xi.values[-2]) / m.grid.dx
    return xi_x / m.grid.nodes


@dataclass(frozen=True)
class LyhReport:
    """Margins of time-weighted scalar-curvature monotonicity.

    For each sample radius and consecutive stored times t1 < t2 the margin is
    t2 R(z, t2) - t1 R(z, t1); nonnegative-curvature solutions keep every
    margin >= 0 up to discretization noise.
    """
    radii: np.ndarray
    time_pairs: tuple
    margins: np.ndarray       # shape (len(time_pairs), len(radii))
    worst: float
    scalar_max: float

    def holds(self, tol: float) -> bool:
        return bool(self.worst >= -tol)


def lyh_monotonicity(traj: Trajectory, sample_radii,
                     time_pairs: Optional[Sequence] = None) -> LyhReport:
    from .curvature import scalar_curvature
    radii = np.asarray(sample_radii, dtype=float)
    times = [t for t in traj.times if t > 0]
    if time_pairs is None:
        time_pairs = list(zip(times[:-1], times[1:]))
    scal = {}
    for t in sorted({t for pair in time_pairs for t in pair}):
        m = traj.state_at(t).metric
        prof = scalar_curvature(m)
        scal[t] = interp_linear(np.log(radii), m.grid.x, prof.values)
    margins = np.empty((len(time_pairs), radii.size))
    for i, (t1, t2) in enumerate(time_pairs):
        margins[i] = t2 * scal[t2] - t1 * scal[t1]
    scalar_max = max(float(np.max(np.abs(v))) for v in scal.values())
    return LyhReport(radii=radii, time_pairs=tuple(time_pairs),
                     margins=margins, worst=float(np.min(margins)),
                     scalar_max=scalar_max)


@dataclass(frozen=True)
class FBoundReport:
    rhs: float
    m_inf: float
    curvature_integral: float
    F_at_x0: float


def _radius_from_distance(m: MetricProfile, dist: float) -> float:
    """Inverse of the geodesic radius profile (clipped to the grid)."""
    rho = _rho_profile(m)
    if dist <= 0:
        return 0.0
    if dist >= rho[-1]:
        raise BallOutOfDomain(f"distance {dist:.3g} beyond rho(r_max)={rho[-1]:.3g}")
    i = int(np.searchsorted(rho, dist))
    if i == 0:
        return float(m.grid.nodes[0] * dist ** 2 / max(rho[0], 1e-300) ** 2)
    x = np.interp(dist, rho[i - 1:i + 1], m.grid.x[i - 1:i + 1])
    return float(np.exp(x))


def _ball_average_scalar(m0: MetricProfile, scal0: np.ndarray, center_rho: float,
                         s: float) -> float:
    """Volume-weighted mean of the initial scalar curvature over B_0(x0, s)."""
    rho = _rho_profile(m0)
    lo = max(0.0, center_rho - s)
    hi = center_rho + s
    v = (m0.grid.nodes * m0.f.values) ** m0.n
    mask = (rho >= lo) & (rho <= hi)
    if not np.any(mask):
        i = int(np.argmin(np.abs(rho - center_rho)))
        return float(scal0[i])
    idx = np.where(mask)[0]
    vcum = np.concatenate(([0.0 if lo == 0.0 else v[idx[0]]], v[idx]))
    dv = np.diff(vcum)
    w = np.sum(dv)
    if w <= 0:
        return float(scal0[idx[0]])
    return float(np.sum(scal0[idx] * dv) / w)


def f_lower_bound_rhs(traj: Trajectory, t: float, rho: float,
                      x0_radius: float = 0.0) -> FBoundReport:
    """Right side of the local lower bound on -F at x0.

    Evaluates m(rho, x0, t) = inf_{B_0(x0, rho)} F and the average-curvature
    integral int_0^{2 rho} s k(x0, s) ds, and returns
    (1 + t (1 - m)/rho^2) * integral - t m (1 - m)/rho^2 (the modulus
    constant is left at 1; consumers fit one constant per family).
    """
    from .curvature import scalar_curvature
    m0 = traj.states[0].metric
    center_rho = geodesic_radius(m0, x0_radius)
    rho_profile = _rho_profile(m0)
    if center_rho + 2 * rho > rho_profile[-1]:
        raise BallOutOfDomain(
            f"ball of radius 2*{rho:.3g} around rho={center_rho:.3g} "
            f"leaves the resolved region (rho_max={rho_profile[-1]:.3g})")
    F = log_det_ratio(traj, t).values
    lo = max(0.0, center_rho - rho)
    hi = center_rho + rho
    mask = (rho_profile >= lo) & (rho_profile <= hi)
    if not np.any(mask):
        mask = np.zeros_like(rho_profile, dtype=bool)
        mask[int(np.argmin(np.abs(rho_profile - center_rho)))] = True
    m_inf = float(np.min(F[mask]))
    if lo == 0.0:
        m_inf = min(m_inf, float(F[0]))

    scal0 = scalar_curvature(m0).values
    s_grid = np.linspace(0.0, 2 * rho, 129)
    k_vals = np.array([0.0 if s == 0 else
                       _ball_average_scalar(m0, scal0, center_rho, s)
                       for s in s_grid])
    integral = float(np.trapezoid(s_grid * k_vals, s_grid))

    x0_F = float(interp_linear(
        np.log(max(x0_radius, m0.grid.r_min)), m0.grid.x, F)[0]) \
        if x0_radius > 0 else float(F[0])
    rhs = (1 + t * (1 - m_inf) / rho ** 2) * integral \
        - t * m_inf * (1 - m_inf) / rho ** 2
    return FBoundReport(rhs=float(rhs), m_inf=m_inf,
                        curvature_integral=integral, F_at_x0=x0_F)


@dataclass(frozen=True)
class RefinementReport:
    counts: tuple
    diffs: tuple              # sup differences between consecutive levels
    orders: tuple             # observed convergence orders
    passed: bool


def refinement_uniqueness(xi_fn: Callable, config: FlowConfig,
                          levels: int = 3) -> RefinementReport:
    """Empirical uniqueness surrogate: the flow converges under refinement.

    Runs the same initial data (xi_fn sampled per level) at nested grid
    resolutions and reports pairwise sup differences of h(., t_end) on the
    shared nodes plus the observed order; passes when the differences
    contract at order >= 1.
    """
    if levels < 2:
        raise ValueError("refinement study needs at least 2 levels")
    base = config.grid
    counts = [(base.count - 1) * 2 ** j + 1 for j in range(levels)]
    finals = []
    for count in counts:
        grid = RadialGrid.logspace(base.r_min, base.r_max, count)
        xi = Profile(grid, xi_fn(grid.nodes))
        cfg = replace(config, grid=grid)
        traj = run_flow(xi, cfg)
        finals.append(traj.states[-1].metric.h.values)
    diffs = []
    for j in range(levels - 1):
        stride = 2 ** (j + 1) // 2
        coarse = finals[j]
        fine = finals[j + 1][::2]
        diffs.append(float(np.max(np.abs(coarse - fine))))
    orders = tuple(float(np.log2(diffs[j] / diffs[j + 1]))
                   for j in range(len(diffs) - 1))
    passed = all(o >= 1.0 for o in orders) and \
        all(diffs[j + 1] < diffs[j] for j in range(len(diffs) - 1))
    return RefinementReport(counts=tuple(counts), diffs=tuple(diffs),
                            orders=orders, passed=bool(passed))


def existence_horizon(K: float, epsilon: float, n: int):
    """T = 1/(2 n K epsilon) for K > 0, otherwise infinity."""
    if epsilon <= 0:
        raise NonPositiveEpsilon(f"epsilon must be positive, got {epsilon}")
    if n < 1:
        raise ValueError(f"dimension must be >= 1, got {n}")
    if K > 0:
        return 1.0 / (2 * n * K * epsilon)
    return math.inf


@dataclass(frozen=True)
class FlowDiagnostics:
    """Bundle of the standard monitors for a stored trajectory."""

    trajectory: Trajectory
    h_origin: np.ndarray
    scalar_max: np.ndarray

    def F(self, t: float) -> Profile:
        return log_det_ratio(self.trajectory, t)

    def m_inf(self, rho: float, t: float, x0_radius: float = 0.0) -> float:
        return f_lower_bound_rhs(self.trajectory, t, rho, x0_radius).m_inf


def flow_diagnostics(traj: Trajectory) -> FlowDiagnostics:
    from .curvature import scalar_curvature
    scal_max = np.array([float(np.max(np.abs(
        scalar_curvature(s.metric).values))) for s in traj.states])
    return FlowDiagnostics(trajectory=traj, h_origin=h_origin_history(traj),
                           scalar_max=scal_max)
