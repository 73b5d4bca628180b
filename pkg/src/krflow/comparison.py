"""Constructive comparison machinery: pullbacks, bump metrics, truncation.

The pullback z -> z/sqrt(k) sends a metric with data (xi, h) to the
isometric copy xi_k(r) = xi(r/k), h_k(r) = h(r/k)/k.  Everything here
builds on the h-ratio comparison principle: h1 >= h2 pointwise orders the
metrics as quadratic forms.

The bump construction turns a metric whose xi tends to 1 with divergent
tail integral into an epsilon-comparison partner with curvature bounded
independently of epsilon: beyond a radius R_k where |xi - 1| <= 1/k, a
zero-mean sequence of +-1/k plateaus in o_k(r) keeps the running integral
I(r) = int_{R_k}^r (1 + o_k - xi)/s ds inside [-(1 + 2 log 2), 1 + 2 log 2],
so the h-ratio drifts by at most a fixed factor.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .classify import check_c1, check_c2, tail_integral_analysis
from .errors import (InvalidK, InvalidC1Parameters, NotC2, NoKFound,
                     DomainTooShort, XiAtOne, NotC1OrC2, HypothesisViolated,
                     CandidateCurvatureTooLarge, InvalidParams, GridMismatch)
from .grid import RadialGrid, Profile, ddx, interp_linear
from .metric import MetricProfile, f_from_h

K_SEARCH_LIMIT = 2 ** 60
AUX_RISE_SCALE = 1e-8        # default radius scale of the auxiliary cap


# ---------------------------------------------------------------- pullback

def pullback_rescale(m: MetricProfile, k: float) -> MetricProfile:
    """Metric of the pullback z -> z/sqrt(k), sampled exactly on k * grid."""
    if k < 1:
        raise InvalidK(f"pullback factor must be >= 1, got {k}")
    grid = RadialGrid(m.grid.nodes * m.grid.dtype.type(k))
    return MetricProfile(
        n=m.n, grid=grid,
        xi=Profile(grid, m.xi.values.copy()),
        h=Profile(grid, m.h.values / k),
        f=Profile(grid, m.f.values / k),
        c0=m.c0 / k, xi_origin_slope=m.xi_origin_slope / k)


def measured_pullback_ratio_range(m: MetricProfile, k: float):
    """(inf, sup) over the grid of h_k(r)/h(r) with h_k(r) = h(r/k)/k."""
    if k < 1:
        raise InvalidK(f"pullback factor must be >= 1, got {k}")
    hk = m.eval_h(m.grid.nodes / m.grid.dtype.type(k)) / k
    ratio = hk / m.h.values
    return float(np.min(ratio)), float(np.max(ratio))


def c1_equivalence_bounds(gamma: float, alpha: float, beta: float, k: float):
    """(e^-gamma k^(alpha-1), e^gamma k^(beta-1)) bracketing h_k/h."""
    if not (0 <= alpha <= beta < 1) or gamma < 0 or k < 1:
        raise InvalidC1Parameters(
            f"need 0 <= alpha <= beta < 1, gamma >= 0, k >= 1; "
            f"got alpha={alpha}, beta={beta}, gamma={gamma}, k={k}")
    return (math.exp(-gamma) * k ** (alpha - 1),
            math.exp(gamma) * k ** (beta - 1))


def scale_metric(m: MetricProfile, lam: float) -> MetricProfile:
    """Homothety g -> lam g; curvature scales by 1/lam, xi is unchanged."""
    if lam <= 0:
        raise InvalidParams(f"scale factor must be positive, got {lam}")
    return MetricProfile(
        n=m.n, grid=m.grid, xi=m.xi,
        h=Profile(m.grid, m.h.values * lam),
        f=Profile(m.grid, m.f.values * lam),
        c0=m.c0 * lam, xi_origin_slope=m.xi_origin_slope)


# ----------------------------------------------------- auxiliary cap metric

def aux_xi(r, a=AUX_RISE_SCALE):
    """Steep capped generating function: u(2-u) for u = r/a <= 1, then 1."""
    u = np.minimum(np.asarray(r) / a, 1.0)
    return u * (2.0 - u)


def aux_xi_prime(r, a=AUX_RISE_SCALE):
    r = np.asarray(r)
    u = r / a
    return np.where(u < 1.0, (2.0 / a) * (1.0 - u), 0.0 * u)


def aux_h(r, a=AUX_RISE_SCALE):
    """Closed form of h for aux_xi, normalized to h(0) = 1.

    int_0^r xi/s ds = 2u - u^2/2 below the cap, so h = exp(u^2/2 - 2u)
    there and h = e^{-3/2} a/r beyond it.
    """
    r = np.asarray(r)
    u = np.minimum(r / a, 1.0)
    inner = np.exp(u * u / 2 - 2 * u)
    outer_scale = math.exp(-1.5) * a
    return np.where(r <= a, inner, outer_scale / np.maximum(r, a * 1e-30))


def make_auxiliary_metric(r_max, a=AUX_RISE_SCALE, count=4096,
                          dtype=np.float64, n=2) -> MetricProfile:
    """Comparison partner with xi = 1 beyond r = a and h(0) = 1."""
    r_min = a * 1e-4
    grid = RadialGrid.logspace(r_min, r_max, count, dtype=dtype)
    xi = Profile(grid, aux_xi(grid.nodes, a))
    m = MetricProfile.from_xi(n=n, xi=xi, c0=1.0, slope0=2.0 / a)
    # closed forms are exact; replace the quadrature h to avoid drift on
    # coarse wide-span grids
    h = Profile(grid, aux_h(grid.nodes, a).astype(grid.dtype))
    f = f_from_h(h, 1.0)
    return MetricProfile(n=n, grid=grid, xi=xi, h=h, f=f, c0=1.0,
                         xi_origin_slope=2.0 / a)


# --------------------------------------------------------------- select k

def select_k_for_epsilon(m: MetricProfile, aux: MetricProfile,
                         epsilon: float) -> int:
    """Smallest integer k with aux_k = (1/k) aux(./k) <= epsilon * h everywhere.

    The grid condition is checked nodewise; beyond the grid the comparison
    holds when the fitted tail exponent of h is no steeper than the
    auxiliary's exact 1/r decay (xi <= 1 at the tail).
    """
    if epsilon <= 0:
        raise InvalidParams(f"epsilon must be positive, got {epsilon}")
    if not check_c2(m).holds:
        raise NotC2("metric does not satisfy condition (c2)")
    tail = np.asarray(aux.xi.values[aux.grid.nodes >= 1.0], dtype=float)
    if tail.size == 0 or np.max(np.abs(tail - 1.0)) > 1e-9:
        raise InvalidParams("auxiliary must have xi = 1 for r >= 1")
    if abs(aux.c0 - 1.0) > 1e-9:
        raise InvalidParams("auxiliary must be normalized to h(0) = 1")
    if float(m.xi.values[-1]) > 1 + 1e-6:
        raise InvalidParams("tail comparison needs xi <= 1 at r_max")

    nodes = m.grid.nodes
    h_vals = m.h.values

    def ok(k: int) -> bool:
        if 1.0 / k > epsilon * m.c0 * (1 + 1e-12):   # origin limit h_k(0) = 1/k
            return False
        hk = aux.eval_h(nodes / m.grid.dtype.type(k)) / k
        return bool(np.all(hk <= epsilon * h_vals * (1 + 1e-12)))

    if not ok(K_SEARCH_LIMIT):
        raise NoKFound(f"no k <= 2^60 achieves the epsilon={epsilon} comparison")
    lo, hi = 1, K_SEARCH_LIMIT
    if ok(lo):
        return 1
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return hi


# ------------------------------------------------------- bump construction

_SHOULDER = 0.25          # fraction of the ramp spent in each smooth shoulder
_RAMP_PEAK = 1.0 / (1.0 - _SHOULDER)   # max of the normalized ramp rate


def _ramp_base(w):
    """Smooth ramp B: [0,1] -> [0,1], B' <= 4/3, B'(0) = B'(1) = 0."""
    w = np.clip(w, 0.0, 1.0)
    b = _SHOULDER
    u_lo = np.clip(w / b, 0.0, 1.0)
    u_hi = np.clip((1.0 - w) / b, 0.0, 1.0)
    area_lo = b * (u_lo ** 3 - u_lo ** 4 / 2)
    area_hi = b * (u_hi ** 3 - u_hi ** 4 / 2)
    mid = np.clip(w - b, 0.0, 1.0 - 2 * b) + b / 2
    full = np.where(w <= b, area_lo, np.where(w >= 1 - b, 1 - b - area_hi, mid))
    return _RAMP_PEAK * full


def _ramp_base_prime(w):
    w = np.clip(w, 0.0, 1.0)
    b = _SHOULDER
    u_lo = np.clip(w / b, 0.0, 1.0)
    u_hi = np.clip((1.0 - w) / b, 0.0, 1.0)
    s_lo = 3 * u_lo ** 2 - 2 * u_lo ** 3
    s_hi = 3 * u_hi ** 2 - 2 * u_hi ** 3
    t = np.where(w <= b, s_lo, np.where(w >= 1 - b, s_hi, 1.0))
    return _RAMP_PEAK * t


@dataclass(frozen=True)
class BumpSequence:
    """Bump profile o_k with the radii where its integral hits +-1.

    Radii can exceed float64 range on wide grids, so r_seq/R_k are stored
    in the grid dtype and all derivative data is kept in the scale-free
    combination k * r * o_k'(r) (the claim bound for it is 4).
    """

    k: int
    R_k: object               # grid-dtype scalar
    r_seq: np.ndarray         # grid-dtype radii r_1 < r_2 < ...
    o_k: Profile
    o_k_prime_scaled: np.ndarray    # k * r * o_k'(r) at the nodes
    I: Profile                # int_{R_k}^r (1 + o_k - xi)/s ds (0 below R_k)

    def max_abs_o(self) -> float:
        return float(np.max(np.abs(self.o_k.values)))

    def max_scaled_slope(self) -> float:
        return float(np.max(np.abs(self.o_k_prime_scaled)))

    def max_abs_I(self) -> float:
        return float(np.max(np.abs(self.I.values)))


def _o_k_eval_log(x, k, x0, xseq):
    """Bump values and scaled slopes k r o' at log-radii x (all float64)."""
    x = np.asarray(x, dtype=np.float64)
    ln2 = math.log(2.0)
    o = np.zeros(x.shape)
    osc = np.zeros(x.shape)          # k * r * o'

    # leading ramp on [x0, x0 + ln 2]: 0 -> 1/k
    w = (x - x0) / ln2
    in_ramp = (w >= 0.0) & (w < 1.0)
    o = np.where(in_ramp, _ramp_base(w) / k, o)
    osc = np.where(in_ramp, _ramp_base_prime(w) / ln2, osc)
    o = np.where(w >= 1.0, 1.0 / k, o)

    for i, xi_b in enumerate(xseq):
        sign = 1.0 if i % 2 == 0 else -1.0     # plateau level before the ramp
        w = (x - xi_b) / ln2
        in_ramp = (w >= 0.0) & (w < 1.0)
        o = np.where(in_ramp, sign / k - 2 * sign * _ramp_base(w) / k, o)
        osc = np.where(in_ramp, -2 * sign * _ramp_base_prime(w) / ln2, osc)
        o = np.where(w >= 1.0, -sign / k, o)
        osc = np.where(w >= 1.0, 0.0, osc)
    return o, osc


def build_bump_sequence(m: MetricProfile, k: int, R_k) -> BumpSequence:
    """Construct o_k on the grid of m, targeting I(r_i) = +1, -1, +1, ...

    The r_i are grid-quantized: each is the smallest node at which the
    running integral reaches its target.  Raises DomainTooShort when the
    tail cannot fit the first sign change.
    """
    grid = m.grid
    x = np.asarray(grid.x, dtype=np.float64)
    x_rk = float(np.log(grid.dtype.type(R_k)))
    if x_rk <= math.log(k):
        raise InvalidParams(f"need R_k > k, got R_k={R_k}, k={k}")
    i0 = int(np.searchsorted(x, x_rk * (1 - 1e-12) if x_rk > 0 else
                             x_rk * (1 + 1e-12)))
    if i0 >= grid.count:
        raise InvalidParams("R_k beyond the grid")
    xi = np.asarray(m.xi.values, dtype=np.float64)
    window = np.max(np.abs(xi[i0:] - 1.0))
    if window > 1.0 / k + 1e-12:
        raise InvalidParams(
            f"|xi - 1| <= 1/k fails beyond R_k: max deviation {window:.3g}")
    x0 = float(x[i0])
    dx = grid.dx

    # march the running integral J = int_{2 r0}^r (1 + o_k - xi)/s ds,
    # choosing each r_{i+1} as the first node where J hits the target
    xseq = []
    j_start = int(np.searchsorted(x, x0 + math.log(2.0)))
    if j_start >= grid.count - 2:
        raise DomainTooShort("tail cannot fit the leading ramp; "
                             "increase r_max")
    target = 1.0
    J = 0.0
    prev_integrand = (1.0 + 1.0 / k) - xi[j_start]
    j = j_start
    while j + 1 < grid.count:
        j += 1
        o_here, _ = _o_k_eval_log(x[j:j + 1], k, x0, xseq)
        integrand = (1.0 + float(o_here[0])) - xi[j]
        J += 0.5 * (prev_integrand + integrand) * dx
        prev_integrand = integrand
        if (target > 0 and J >= target) or (target < 0 and J <= target):
            if xseq and x[j] <= xseq[-1] + math.log(2.0):
                continue            # still inside the previous ramp
            xseq.append(float(x[j]))
            target = -target
    if not xseq:
        rate = max(abs(prev_integrand), 1e-12)
        needed_log10 = (float(x[-1]) + (1.0 - J) / rate) / math.log(10.0)
        raise DomainTooShort(
            f"running integral only reached {J:.3f} < 1 by r_max; "
            f"r_max of roughly 1e{needed_log10:.0f} would fit the first "
            "sign change")

    o_vals, o_scaled = _o_k_eval_log(x, k, x0, xseq)

    integrand = (1.0 + o_vals - xi)
    contrib = 0.5 * (integrand[:-1] + integrand[1:]) * dx
    I_vals = np.zeros(grid.count)
    I_vals[i0 + 1:] = np.cumsum(contrib[i0:])
    return BumpSequence(k=k, R_k=grid.nodes[i0],
                        r_seq=np.exp(np.asarray(xseq, dtype=grid.dtype)),
                        o_k=Profile(grid, o_vals.astype(grid.dtype)),
                        o_k_prime_scaled=o_scaled,
                        I=Profile(grid, I_vals.astype(grid.dtype)))


def _choose_R_k(m: MetricProfile, k: int):
    """Smallest grid node > k with |xi - 1| <= 1/k on the remaining tail."""
    xi = np.asarray(m.xi.values, dtype=np.float64)
    dev = np.abs(xi - 1.0)
    suffix_ok = (np.maximum.accumulate(dev[::-1])[::-1] <= 1.0 / k + 1e-12)
    beyond_k = np.asarray(m.grid.x, dtype=np.float64) > math.log(k)
    candidates = np.where(suffix_ok & beyond_k)[0]
    if candidates.size == 0 or candidates[0] >= m.grid.count - 4:
        raise DomainTooShort(
            f"no admissible R_k on the grid for k={k}; xi reaches the "
            f"1/k-window of 1 only beyond r_max")
    return m.grid.nodes[candidates[0]]


# --------------------------------------------------------------- assembly

@dataclass(frozen=True)
class ComparisonResult:
    route: str                       # "c1" or "c2"
    xi_tilde: Profile
    k: int
    R_k: Optional[float]
    r_seq: np.ndarray
    epsilon: float
    lower: float                     # inf over nodes of h / h_tilde
    upper: float                     # sup over nodes of h / h_tilde
    curvature_sup: float             # sup |xi_tilde' / h_tilde|
    metric: MetricProfile
    bumps: Optional[BumpSequence]
    lower_target: float              # the guaranteed lower bound
    curvature_cap: Optional[float]   # 16 e^(1+delta) / aux_h(1) on c2 route


def assemble_comparison_metric(m: MetricProfile, epsilon: float,
                               aux_a: float = AUX_RISE_SCALE,
                               ) -> ComparisonResult:
    """epsilon-comparison partner with epsilon-independent curvature bound.

    c1 route: a pullback with k = ceil((e^gamma / epsilon)^(1/(1-beta))),
    which is isometric to m, so its curvature sup equals m's.
    c2 route: pullback of the auxiliary cap plus the bump profile o_k,
    normalized to h(0) = 1/k; the guaranteed lower bound is 1/(4 e epsilon).
    """
    if epsilon <= 0:
        raise InvalidParams(f"epsilon must be positive, got {epsilon}")
    c1 = check_c1(m)
    if c1.holds:
        k = max(1, math.ceil((math.exp(c1.gamma) / epsilon)
                             ** (1.0 / (1.0 - c1.beta))))
        gk = pullback_rescale(m, k)
        hk = m.eval_h(m.grid.nodes / m.grid.dtype.type(k)) / k
        ratio = m.h.values / hk
        xi_x = ddx(np.asarray(gk.xi.values, dtype=float), gk.grid.dx)
        curv = np.abs(xi_x / np.asarray(gk.grid.nodes, dtype=float)
                      / np.asarray(gk.h.values, dtype=float))
        return ComparisonResult(
            route="c1", xi_tilde=gk.xi, k=k, R_k=None,
            r_seq=np.empty(0), epsilon=epsilon,
            lower=float(np.min(ratio)), upper=float(np.max(ratio)),
            curvature_sup=float(np.max(curv)), metric=gk, bumps=None,
            lower_target=1.0 / epsilon, curvature_cap=None)

    c2 = check_c2(m)
    if not c2.holds:
        raise NotC1OrC2("metric satisfies neither (c1) nor (c2)")

    aux = make_auxiliary_metric(m.grid.nodes[-1], a=aux_a,
                                dtype=m.grid.dtype, n=m.n)
    k = select_k_for_epsilon(m, aux, epsilon)
    R_k = _choose_R_k(m, k)
    bumps = build_bump_sequence(m, k, R_k)

    grid = m.grid
    dtype = grid.dtype
    rise = aux_a * k
    if rise * 1e-4 < grid.r_min * 0.99:
        lo = min(grid.r_min, rise * 1e-4)
        count = max(grid.count, int(math.ceil(
            (float(grid.x[-1]) - math.log(float(lo))) / grid.dx)) + 1)
        agrid = RadialGrid.logspace(dtype.type(lo), grid.nodes[-1], count,
                                    dtype=dtype)
    else:
        agrid = grid
    x_rk = float(np.log(dtype.type(bumps.R_k)))
    xseq = np.log(bumps.r_seq).astype(np.float64)
    o_vals, o_scaled = _o_k_eval_log(agrid.x, k, x_rk, xseq)
    xi_tilde = (aux_xi(agrid.nodes / dtype.type(k), aux_a)
                + o_vals.astype(dtype))

    # h_tilde: closed form (1/k) aux_h(r/k) below R_k (o_k = 0 there),
    # anchored quadrature continuation beyond
    h_tilde = (aux_h(agrid.nodes / dtype.type(k), aux_a) / k).astype(dtype)
    i_rk = int(np.searchsorted(np.asarray(agrid.x, dtype=np.float64),
                               x_rk - 1e-9))
    x = agrid.x
    integ = np.asarray(xi_tilde, dtype=dtype)
    seg = 0.5 * (integ[i_rk:-1] + integ[i_rk + 1:]) * dtype.type(agrid.dx)
    log_tail = np.cumsum(seg)
    h_anchor = h_tilde[i_rk]
    h_tilde[i_rk + 1:] = h_anchor * np.exp(-log_tail)

    f_tilde = f_from_h(Profile(agrid, h_tilde), 1.0 / k)
    g_tilde = MetricProfile(n=m.n, grid=agrid,
                            xi=Profile(agrid, xi_tilde),
                            h=Profile(agrid, h_tilde), f=f_tilde,
                            c0=1.0 / k,
                            xi_origin_slope=2.0 / (aux_a * k))

    # ratio h/h_tilde on the nodes of m, plus the origin limit c0 * k
    h_tilde_at_m = np.exp(interp_linear(grid.x, agrid.x,
                                        np.log(h_tilde)))
    ratio = m.h.values / h_tilde_at_m
    lower = min(float(np.min(ratio)), m.c0 * k)
    upper = float(np.max(ratio))

    # curvature sup: aux part (k cancels) and bump part, disjoint supports.
    # |o'|/h = (k r o')/(k r h); r h stays O(a) however large r gets.
    u = np.exp(np.linspace(np.log(1e-6), 0.0, 4001))
    sup_aux = float(np.max(aux_xi_prime(u * aux_a, aux_a)
                           / aux_h(u * aux_a, aux_a)))
    mask = o_scaled != 0
    if np.any(mask):
        r_h = np.asarray(agrid.nodes[mask] * h_tilde[mask], dtype=np.float64)
        sup_bump = float(np.max(np.abs(o_scaled[mask]) / (k * r_h)))
    else:
        sup_bump = 0.0
    curvature_sup = max(sup_aux, sup_bump)

    cap = 16 * math.exp(1 + c2.delta) / float(aux.eval_h(1.0)[0])
    return ComparisonResult(
        route="c2", xi_tilde=g_tilde.xi, k=k, R_k=bumps.R_k,
        r_seq=bumps.r_seq, epsilon=epsilon, lower=lower, upper=upper,
        curvature_sup=curvature_sup, metric=g_tilde, bumps=bumps,
        lower_target=1.0 / (4 * math.e * epsilon), curvature_cap=cap)


# -------------------------------------------------------------- truncation

def truncate_xi(m: MetricProfile, r_k: float) -> MetricProfile:
    """Hold xi constant at xi(r_k) beyond r_k, smoothly blended below it.

    The blend window is shrunk until the distortion factor
    exp(int |xi - xi_k|/s ds) is <= 2, so the truncated metric is uniformly
    equivalent to m below r_k; the constant tail gives bounded curvature.
    """
    grid = m.grid
    i_k = grid.index_at_or_above(r_k * 0.999999)
    if abs(float(grid.nodes[i_k]) - r_k) > 1e-9 * r_k:
        raise InvalidParams(f"r_k={r_k} is not a grid node")
    xi_cut = float(m.xi.values[i_k])
    if xi_cut >= 1.0:
        raise XiAtOne(f"xi(r_k) = {xi_cut:.6f} >= 1")
    x = np.asarray(grid.x, dtype=np.float64)
    xi = np.asarray(m.xi.values, dtype=np.float64)
    x_k = float(x[i_k])
    width = min(0.3, max(3 * grid.dx, 1e-9))
    for _ in range(30):
        w = np.clip((x_k - x) / width, 0.0, 1.0)
        s = 3 * w ** 2 - 2 * w ** 3
        xi_new = np.where(x >= x_k, xi_cut, s * xi + (1 - s) * xi_cut)
        diff = np.abs(xi - xi_new)
        distortion = math.exp(float(np.trapezoid(diff, x)))
        if distortion <= 2.0:
            break
        width /= 2
    return MetricProfile.from_xi(n=m.n, xi=Profile(grid, xi_new.astype(grid.dtype)),
                                 c0=m.c0, slope0=m.xi_origin_slope)


# ------------------------------------------------------------- obstruction

def curvature_component_sup(m: MetricProfile) -> float:
    """max over the grid of the frame components A, B, C."""
    from .curvature import curvature_components
    cc = curvature_components(m)
    sup = float(np.max(np.asarray(cc.a.values, dtype=float)))
    if cc.b is not None:
        sup = max(sup, float(np.max(np.asarray(cc.b.values, dtype=float))),
                  float(np.max(np.asarray(cc.c.values, dtype=float))))
    return sup


def rescale_to_unit_curvature(cand: MetricProfile) -> MetricProfile:
    """Homothety making the candidate's curvature sup exactly 1."""
    sup = curvature_component_sup(cand)
    if sup <= 0:
        raise InvalidParams("candidate is flat; unit-curvature scaling "
                            "is undefined")
    return scale_metric(cand, sup)


@dataclass(frozen=True)
class ObstructionReport:
    alphas: np.ndarray
    empirical_max: float
    bound: float              # h(1) * (1 + slack)
    h_at_one: float
    passed: bool


def cigar_obstruction_bound(m: MetricProfile,
                            candidates: Sequence[MetricProfile],
                            slack: float = 0.1,
                            oracle_points: int = 3) -> ObstructionReport:
    """Largest alpha with g >= alpha g_tilde over unit-curvature candidates.

    For metrics with a convergent tail integral, no candidate of bisectional
    curvature <= 1 can be dominated with a factor above about h(1).
    """
    analysis = tail_integral_analysis(m)
    if analysis.diverges is not False:
        raise HypothesisViolated(
            "obstruction bound needs a convergent tail integral (c3-type)")
    from .oracle import fd_curvature_oracle
    alphas = []
    for cand in candidates:
        if not cand.grid.same_as(m.grid):
            raise GridMismatch("candidates must share the metric grid")
        sup = curvature_component_sup(cand)
        if sup > 1 + 1e-6:
            raise CandidateCurvatureTooLarge(
                f"candidate curvature sup {sup:.3g} exceeds 1")
        if oracle_points and cand.grid.dtype == np.float64:
            radii = np.exp(np.linspace(np.log(cand.grid.r_min * 100),
                                       np.log(cand.grid.r_max / 100),
                                       oracle_points))
            for r in radii:
                z = np.zeros(cand.n, dtype=complex)
                z[0] = math.sqrt(r)
                o = fd_curvature_oracle(cand, z)
                comps = [o.a] + ([o.b, o.c] if cand.n >= 2 else [])
                if max(comps) > 1 + 1e-3:
                    raise CandidateCurvatureTooLarge(
                        f"oracle curvature {max(comps):.3g} at r={r:.3g} "
                        "exceeds 1")
        alphas.append(float(np.min(m.h.values / cand.h.values)))
    alphas = np.asarray(alphas)
    h1 = float(m.eval_h(1.0)[0])
    bound = h1 * (1 + slack)
    emp = float(np.max(alphas)) if alphas.size else 0.0
    return ObstructionReport(alphas=alphas, empirical_max=emp, bound=bound,
                             h_at_one=h1, passed=bool(emp <= bound))
