"""Acceptance criteria, one test per criterion.

Each test prints a PASS/FAIL line (visible with -s or in captured output on
failure) and asserts the criterion at its stated tolerance.  Shared flow
runs are cached on the session-scoped suite, so the whole module costs a
few minutes with the compiled kernel.
"""
import pytest

from krflow._stepper import backend_name
from krflow.acceptance import AcceptanceSuite


@pytest.fixture(scope="session")
def suite():
    return AcceptanceSuite(seed=0)


def _check(result):
    status = "PASS" if result.passed else "FAIL"
    print(f"[{status}] criterion {result.number:2d}: {result.name} "
          f"({result.elapsed:.1f}s, backend={backend_name()}) "
          f"-- {result.detail}")
    assert result.passed, f"criterion {result.number}: {result.detail}"


def test_criterion_01_closed_form_reconstruction(suite):
    _check(suite.criterion_01())


def test_criterion_02_curvature_oracle_agreement(suite):
    _check(suite.criterion_02())


def test_criterion_03_exact_flow_solution(suite):
    _check(suite.criterion_03())


def test_criterion_04_flat_fixed_point(suite):
    _check(suite.criterion_04())


def test_criterion_05_preserved_positivity(suite):
    _check(suite.criterion_05())


def test_criterion_06_log_det_lower_bounds(suite):
    _check(suite.criterion_06())


def test_criterion_07_lyh_monotonicity(suite):
    _check(suite.criterion_07())


def test_criterion_08_rescaled_convergence(suite):
    _check(suite.criterion_08())


def test_criterion_09_uniqueness_surrogate(suite):
    _check(suite.criterion_09())


def test_criterion_10_comparison_construction(suite):
    _check(suite.criterion_10())


def test_criterion_11_obstruction_sweep(suite):
    _check(suite.criterion_11())


def test_criterion_12_formula_checks(suite):
    _check(suite.criterion_12())


def test_criterion_13_pullback_equivariance(suite):
    _check(suite.criterion_13())


def test_criterion_14_determinism_and_persistence(suite):
    _check(suite.criterion_14())
