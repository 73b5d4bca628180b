import math

import numpy as np
import pytest

from krflow.curvature import (curvature_components, scalar_curvature,
                              bisectional_sign, bounded_curvature_test,
                              POSITIVE, INDEFINITE, FLAT, BOUNDED, UNBOUNDED)
from krflow.errors import DimensionTooSmall, StencilOutOfDomain
from krflow.grid import RadialGrid, Profile
from krflow.metric import MetricProfile
from krflow.oracle import fd_curvature_oracle
from krflow.presets import preset_metric


def cigar_abc_exact(r):
    lg = np.log1p(r)
    f = lg / r
    h = 1 / (1 + r)
    a = 1 / (1 + r)
    b = (1 - (1 + lg) / (1 + r)) / lg ** 2
    c = 2 * (f - h) / (r * f ** 2)
    return a, b, c


def test_flat_components_exact_zero(euclidean):
    cc = curvature_components(euclidean)
    assert np.all(cc.a.values == 0.0)
    assert np.all(cc.b.values == 0.0)
    assert np.all(cc.c.values == 0.0)
    assert np.all(cc.scalar.values == 0.0)


def test_cigar_component_a(cigar):
    i = cigar.grid.index_at_or_above(1.0)
    r = cigar.grid.nodes[i]
    cc = curvature_components(cigar)
    # xi' comes from second-order log-grid differences
    assert cc.a.values[i] == pytest.approx(1 / (1 + r), rel=1e-4)


def test_c_routes_agree(conoid):
    cc = curvature_components(conoid)
    r = conoid.grid.nodes
    rel = np.abs(cc.c.values - cc.c_alt.values) / np.maximum(
        np.abs(cc.c.values), 1e-300)
    # where f - h is resolved the identity holds to quadrature tolerance;
    # below that the direct difference loses digits to cancellation
    assert np.max(rel[r >= 1e-2]) < 1e-6
    assert np.max(rel) < 1e-3
    assert cc.c_route_discrepancy < 1e-3


def test_scalar_cigar_n1(grid_2048):
    xi = Profile(grid_2048, grid_2048.nodes / (1 + grid_2048.nodes))
    m = MetricProfile.from_xi(n=1, xi=xi, c0=1.0, slope0=1.0)
    scal = scalar_curvature(m)
    # scalar = A = 1/(1+r); at the first node this is 1 - r_min
    assert scal.values[0] == pytest.approx(1.0, abs=1e-4)
    cc = curvature_components(m)
    assert cc.b is None and cc.c is None
    with pytest.raises(DimensionTooSmall):
        cc.b_required()
    with pytest.raises(DimensionTooSmall):
        cc.c_required()


def test_scalar_matches_oracle(cigar, rng):
    scal = scalar_curvature(cigar)
    for r in np.exp(rng.uniform(np.log(0.05), np.log(20), 10)):
        i = cigar.grid.index_at_or_above(r)
        rr = float(cigar.grid.nodes[i])
        o = fd_curvature_oracle(cigar, np.array([math.sqrt(rr), 0], dtype=complex))
        expected = o.a + 2 * o.b + o.c
        assert scal.values[i] == pytest.approx(expected, rel=1e-3)


def test_components_match_oracle_everywhere(conoid):
    cc = curvature_components(conoid)
    for rt in np.exp(np.linspace(np.log(0.1), np.log(50), 6)):
        i = conoid.grid.index_at_or_above(rt)
        r = float(conoid.grid.nodes[i])
        o = fd_curvature_oracle(conoid, np.array([math.sqrt(r), 0], dtype=complex))
        for mine, theirs in ((cc.a.values[i], o.a), (cc.b.values[i], o.b),
                             (cc.c.values[i], o.c)):
            assert abs(mine - theirs) <= max(1e-2 * abs(theirs), 1e-6)


def _exact_flat(n=2):
    g = RadialGrid.logspace(1e-6, 1e6, 512)
    ones = np.ones(g.count)
    return MetricProfile(n=n, grid=g, xi=Profile(g, np.zeros(g.count)),
                         h=Profile(g, ones), f=Profile(g, ones.copy()),
                         c0=1.0, xi_origin_slope=0.0)


def test_oracle_flat_zero():
    o = fd_curvature_oracle(_exact_flat(), np.array([1.0, 0.5j], dtype=complex))
    assert abs(o.a) < 1e-10 and abs(o.b) < 1e-10 and abs(o.c) < 1e-10
    assert o.off_pattern_max < 1e-10


def test_oracle_cigar_value(cigar):
    o = fd_curvature_oracle(cigar, np.array([1.0, 0.0], dtype=complex))
    assert o.a == pytest.approx(0.5, abs=1e-4)


def test_oracle_pattern_vanishing(cigar, conoid):
    # every component not generated by A, B, C vanishes, on and off axis
    pts = [np.array([2.0, 0.0], dtype=complex),
           np.array([0.6 + 0.3j, -0.2 + 0.7j]),
           np.array([0.1 + 0.1j, 0.05 - 0.2j]),
           np.array([3.0j, 1.0], dtype=complex),
           np.array([0.5, 0.5j], dtype=complex)]
    for m in (cigar, conoid):
        for z in pts:
            o = fd_curvature_oracle(m, z)
            assert o.off_pattern_max < 1e-6
            assert o.max_imag < 1e-6


def test_oracle_stencil_domain(cigar):
    with pytest.raises(StencilOutOfDomain):
        fd_curvature_oracle(cigar, np.array([1e-3, 0], dtype=complex))
    with pytest.raises(StencilOutOfDomain):
        fd_curvature_oracle(cigar, np.array([1e3, 0], dtype=complex))


def test_bisectional_sign_cases(grid_1024, euclidean, cigar):
    assert bisectional_sign(euclidean) == FLAT
    g = grid_1024
    m_cigar = preset_metric("cigar", {}, g, n=2)
    assert bisectional_sign(m_cigar) == POSITIVE
    r = g.nodes
    # the subtracted slope peaks above the cigar slope near r = 1,
    # so xi' changes sign there
    xi = Profile(g, r / (1 + r) - 0.6 * r ** 2 / (1 + r ** 2))
    m_mixed = MetricProfile.from_xi(n=2, xi=xi, c0=1.0, slope0=1.0)
    assert bisectional_sign(m_mixed) == INDEFINITE


def test_sign_criterion_against_oracle(grid_1024):
    presets = [("euclidean", {}, False), ("cigar", {}, True),
               ("conoid", {"beta": 0.5}, True), ("c2_log", {}, True)]
    for name, params, expect_positive in presets:
        m = preset_metric(name, params, grid_1024, n=2)
        verdict = bisectional_sign(m)
        radii = np.exp(np.linspace(np.log(0.1), np.log(10), 4))
        mins = []
        for r in radii:
            o = fd_curvature_oracle(m, np.array([math.sqrt(r), 0], dtype=complex))
            mins.append(min(o.a, o.b, o.c / 2))
        if expect_positive:
            assert verdict == POSITIVE
            assert min(mins) > 0
        else:
            assert verdict == FLAT
            assert abs(min(mins)) < 1e-7   # quadrature noise level in f


def test_bounded_curvature_flat_and_cigar(euclidean, cigar):
    rep = bounded_curvature_test(euclidean)
    assert rep.verdict == BOUNDED and rep.sup_ratio < 1e-12
    rep = bounded_curvature_test(cigar)
    assert rep.verdict == BOUNDED
    # sup of xi'/h = 1/(1+r) is attained at the origin end
    assert rep.sup_ratio == pytest.approx(1.0, abs=1e-3)


def _spiked_metric():
    # narrowing steps riding on a cigar: |xi'|/h at the j-th bump scales
    # like the inverse bump width, so the envelope grows down the tail
    g = RadialGrid.logspace(1e-6, 1e6, 4096)
    x = g.x
    xi = g.nodes / (1 + g.nodes)
    for center, width in [(math.log(10 ** 2.5), 0.3),
                          (math.log(10 ** 3.5), 0.1),
                          (math.log(10 ** 4.5), 0.033),
                          (math.log(10 ** 5.5), 0.011)]:
        xi = xi - 0.4 * np.exp(-0.5 * ((x - center) / width) ** 2)
    return MetricProfile.from_xi(n=2, xi=Profile(g, xi), c0=1.0, slope0=1.0)


def test_bounded_curvature_spiked_family():
    m = _spiked_metric()
    rep = bounded_curvature_test(m)
    assert rep.verdict == UNBOUNDED
    assert rep.sup_ratio > 10.0


def test_bounded_verdict_consistent_with_oracle(grid_1024):
    # bounded presets keep oracle components bounded along the tail
    for name, params in [("cigar", {}), ("conoid", {"beta": 0.5}),
                         ("c2_log", {})]:
        m = preset_metric(name, params, grid_1024, n=2)
        assert bounded_curvature_test(m).verdict == BOUNDED
        vals = []
        for r in (1e2, 1e3, 1e4):
            o = fd_curvature_oracle(m, np.array([math.sqrt(r), 0], dtype=complex))
            vals.append(max(abs(o.a), abs(o.b), abs(o.c)))
        assert max(vals) < 10
