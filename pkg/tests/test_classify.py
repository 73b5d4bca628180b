import math

import numpy as np
import pytest

from krflow.classify import (check_c1, check_c2, check_c3, volume_growth_class,
                             classify_metric, tail_integral_analysis)
from krflow.comparison import pullback_rescale
from krflow.errors import IncompleteMetric
from krflow.grid import Profile
from krflow.metric import MetricProfile
from krflow.presets import preset_metric


def test_c1_euclidean(euclidean):
    rep = check_c1(euclidean)
    assert rep.holds
    assert rep.alpha == pytest.approx(0.0, abs=1e-9)
    assert rep.beta == pytest.approx(0.0, abs=1e-9)
    assert rep.gamma == pytest.approx(0.0, abs=1e-9)


def test_c1_conoid(conoid):
    rep = check_c1(conoid)
    assert rep.holds
    assert rep.alpha == pytest.approx(0.0, abs=0.01)
    assert rep.beta == pytest.approx(0.5, abs=0.01)
    assert math.isfinite(rep.gamma)


def test_c1_fails_on_cigar(cigar):
    assert not check_c1(cigar).holds


def test_c2_log_preset(grid_1024):
    m = preset_metric("c2_log", {}, grid_1024, n=2)
    rep = check_c2(m)
    assert rep.holds
    assert rep.delta == pytest.approx(0.0, abs=1e-9)  # integrand positive
    assert not check_c3(m).holds


def test_c2_fails_on_cigar_and_flat(cigar, euclidean):
    assert not check_c2(cigar).holds     # partial integrals saturate at log 2
    assert not check_c2(euclidean).holds  # xi does not tend to 1


def test_c3_cigar_limit(cigar):
    rep = check_c3(cigar)
    assert rep.holds
    assert rep.b == pytest.approx(math.log(2), abs=1e-3)


def test_c3_fails_on_divergent(grid_1024, euclidean):
    m = preset_metric("c2_log", {}, grid_1024, n=2)
    assert not check_c3(m).holds
    assert not check_c3(euclidean).holds


@pytest.mark.parametrize("preset,params", [
    ("euclidean", {}), ("cigar", {}), ("conoid", {"beta": 0.5}),
    ("c2_log", {}),
])
def test_condition_exclusivity(preset, params, grid_1024):
    m = preset_metric(preset, params, grid_1024, n=2)
    rep = classify_metric(m)
    assert not (rep.c2.holds and rep.c3.holds)
    tends_to_one = (1 - (rep.xi_limit or 0)) <= 0.05
    if tends_to_one:
        assert rep.c2.holds != rep.c3.holds
    else:
        assert rep.c1.holds
        assert not rep.c2.holds and not rep.c3.holds


def test_growth_euclidean(euclidean):
    rep = volume_growth_class(euclidean)
    assert rep.conoid and not rep.cigar
    assert rep.limsup_2n == pytest.approx(1.0, rel=1e-4)


def test_growth_cigar(cigar):
    rep = volume_growth_class(cigar)
    assert rep.cigar and not rep.conoid


def test_growth_conoid(conoid):
    rep = volume_growth_class(conoid)
    assert rep.conoid and not rep.cigar
    assert rep.limsup_2n > 0


def test_growth_requires_completeness(grid_1024):
    r = grid_1024.nodes
    xi = Profile(grid_1024, 3 * r / (1 + r))
    m = MetricProfile.from_xi(n=2, xi=xi, c0=1.0, slope0=3.0)
    with pytest.raises(IncompleteMetric):
        volume_growth_class(m)


def test_growth_regime_table(cigar, conoid):
    # xi' >= 0 with convergent tail integral is the cigar regime,
    # condition (c1) the conoid regime
    assert check_c3(cigar).holds and volume_growth_class(cigar).cigar
    assert check_c1(conoid).holds and volume_growth_class(conoid).conoid


def test_chen_zhu_sandwich(cigar, conoid):
    for m in (cigar, conoid):
        rep = volume_growth_class(m)
        assert math.isfinite(rep.sandwich_low) and rep.sandwich_low > 0
        assert math.isfinite(rep.sandwich_high) and rep.sandwich_high > 0


@pytest.mark.parametrize("k", [2, 10])
def test_rescaling_invariance(k, grid_1024):
    for preset, params in [("cigar", {}), ("conoid", {"beta": 0.5}),
                           ("c2_log", {})]:
        m = preset_metric(preset, params, grid_1024, n=2)
        mk = pullback_rescale(m, k)
        a, b = classify_metric(m), classify_metric(mk)
        assert a.c1.holds == b.c1.holds
        assert a.c2.holds == b.c2.holds
        assert a.c3.holds == b.c3.holds
        if a.growth and b.growth:
            assert a.growth.cigar == b.growth.cigar
            assert a.growth.conoid == b.growth.conoid


def test_tail_analysis_delta_for_oscillating(grid_1024):
    # a dip of xi above 1 makes the tail integral drop; delta tracks it
    x = grid_1024.x
    xi = grid_1024.nodes / (1 + grid_1024.nodes) \
        + 0.5 * np.exp(-0.5 * ((x - math.log(100.0)) / 0.4) ** 2)
    m = MetricProfile.from_xi(n=2, xi=Profile(grid_1024, xi), c0=1.0,
                              slope0=1.0)
    analysis = tail_integral_analysis(m)
    assert analysis.delta > 0.1
