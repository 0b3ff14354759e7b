import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from frht_lab.errors import ArgumentError, CapabilityError, CoverageError, DomainError
from frht_lab.functions import catalog, gaussian_bessel, laguerre_bessel, power_cutoff, zero
from frht_lab.seminorms import (EvalGrid, MontelFunction, MontelSequenceParams, b_space_seminorm,
                                beta_mk, beta_order_check, beta_seminorm, bump, bump_mass,
                                double_factorial, expansion_coefficients, gamma_seminorm, montel_report,
                                montel_sequence, phi_n, recursion_check, weighted_xinvd, x_inv_d)

GRID = EvalGrid(1e-4, 40, 1500)


@pytest.mark.parametrize("mu", [0, 1, 2])
def test_gamma_of_gaussian_closed_forms(mu):
    # x^(-mu-1/2) f = exp(-x^2/2); (x^-1 D)^k of it = (-1)^k exp(-x^2/2)
    f = gaussian_bessel(mu)
    for k in range(3):
        assert abs(gamma_seminorm(mu, 0, k, f, GRID).value - 1.0) < 1e-6
        # a grid sup is a lower bound that tightens as the grid is refined
        s = gamma_seminorm(mu, 1, k, f, GRID)
        s2 = gamma_seminorm(mu, 1, k, f, GRID.doubled())
        exact = math.exp(-0.5)
        assert s.value <= s2.value <= exact + 1e-15
        assert exact - s2.value < 1e-5
        assert abs(s.argmax_x - 1.0) < 0.01


def test_gamma_divergence_sentinel():
    with pytest.warns(RuntimeWarning, match="unbounded towards 0"):
        s = gamma_seminorm(0.5, 0, 0, gaussian_bessel(0), GRID)
    assert s.value == math.inf and not s.finite
    with pytest.warns(RuntimeWarning, match="unbounded towards infinity"):
        s = gamma_seminorm(0, 0, 0, _growing(), EvalGrid(1, 40, 200))
    assert s.value == math.inf


def _growing():
    from frht_lab.functions import TestFunction
    from frht_lab import jets
    return TestFunction("sqrt_x_times_x", lambda x: jets.power(x, 1.5))


def test_zero_function_seminorms_vanish():
    for m in range(3):
        for k in range(3):
            assert beta_mk(1, m, k, zero(), GRID).value == 0.0


def test_beta_is_sum_of_gammas():
    f = gaussian_bessel(3)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        b = beta_mk(1, 1, 2, f, GRID).value
        g = gamma_seminorm(1.5, 1, 2, f, GRID).value + gamma_seminorm(2.5, 1, 2, f, GRID).value
    assert b == g


def test_beta_seminorm_takes_max():
    f = gaussian_bessel(7)
    b = beta_seminorm(1, f, GRID)
    assert all(beta_mk(1, m, k, f, GRID).value <= b.value for m in range(3) for k in range(3))


@settings(max_examples=25, deadline=None)
@given(st.floats(0.2, 3.0), st.integers(1, 3))
def test_xinvd_against_finite_difference(x0, k):
    f = laguerre_bessel(1, 2)
    g = x_inv_d(f, k - 1)
    h = 1e-5
    fd = (g(np.array(x0 + h)) - g(np.array(x0 - h))) / (2 * h) / x0
    exact = x_inv_d(f, k)(np.array(x0))
    assert abs(exact - fd) <= 1e-6 * max(1.0, abs(fd))


def test_t_route_matches_x_route():
    from frht_lab.functions import TestFunction
    f = catalog(1)[1]
    bare = TestFunction("no_t_form", f.expr)
    x = np.linspace(0.2, 4, 25)
    for k in range(4):
        np.testing.assert_allclose(weighted_xinvd(f, 1.5, k, x), weighted_xinvd(bare, 1.5, k, x),
                                   rtol=1e-9, atol=1e-12)


def test_expansion_coefficients_k2():
    # (x^-1 D)^2 = x^-2 D^2 - x^-3 D
    c = expansion_coefficients(2)
    assert len(c) >= 2


def test_recursion_on_catalog():
    x = np.linspace(0.3, 3, 10)
    for f in catalog(1):
        for k in (0, 2, 4):
            assert recursion_check(f, 2, k, 1, x).deviation <= 1e-9


def test_double_factorial():
    assert [double_factorial(n) for n in (0, 1, 4, 5, 8)] == [1, 1, 8, 15, 384]


def test_order_check_on_regular_function():
    c = beta_order_check(0, gaussian_bessel(7), GRID)
    assert c.factor == 1
    assert math.isfinite(c.beta_mu) and math.isfinite(c.beta_next)
    assert c.monotone


def test_order_check_undecided_when_both_infinite():
    c = beta_order_check(1, gaussian_bessel(0), GRID)
    assert not c.passed and "undecided" in c.note


def test_b_space():
    s = b_space_seminorm(1, 4.0, power_cutoff(7.5), GRID)
    assert math.isfinite(s.value) and s.value > 0
    with pytest.warns(RuntimeWarning):
        assert beta_mk(1, 0, 2, power_cutoff(3.5), GRID).value == math.inf
    with pytest.raises(DomainError):
        b_space_seminorm(1, 1.0, gaussian_bessel(3), GRID)


def test_capability_and_argument_errors():
    with pytest.raises(CapabilityError):
        x_inv_d(gaussian_bessel(0), 99)
    with pytest.raises(ArgumentError):
        gamma_seminorm(0, -1, 0, gaussian_bessel(0), GRID)
    with pytest.raises(ArgumentError):
        MontelSequenceParams(0)


def test_bump_is_normalised_and_supported():
    t = np.array([-0.6, -0.5, 0.0, 0.5, 0.7])
    v = bump(t)
    assert v[0] == v[1] == v[3] == v[4] == 0.0
    assert bump_mass() > 0


def test_phi_n_pieces():
    t = np.array([0.1, 0.5, 0.99, 2.0, 3.5])
    v = phi_n(4, t)
    assert v[0] == 0.0 and v[1] == 0.5 ** 8
    assert v[2] == 1.0 and v[3] == 1.0 and v[4] == 0.0


def test_montel_function_is_mollified_ramp():
    kap = MontelFunction(MontelSequenceParams(4))
    # away from the jumps kappa equals t^(1/2) phi_n up to the mollifier width
    # mollifier width w = 1/64: second-order smoothing error about w^2 |h''|
    assert abs(kap(np.array(2.0)) - math.sqrt(2.0)) < 1e-5
    assert kap(np.array(5.0)) == 0.0
    # derivative against finite differences
    x0, h = 0.8, 1e-5
    d1 = kap.derivs(np.array([x0]), 1)[1, 0]
    fd = (kap(np.array(x0 + h)) - kap(np.array(x0 - h))) / (2 * h)
    assert abs(d1 - fd) < 1e-5 * abs(fd)


def test_montel_grid_too_narrow():
    with pytest.raises(CoverageError):
        montel_sequence(MontelSequenceParams(2), EvalGrid(0.5, 2, 100))


def test_montel_single_n_trivial():
    r = montel_report([1], 0, GRID)
    assert all(v == 1.0 for v in r.spread.values())
    assert r.separation == {} and r.bounded and r.separated


def test_montel_separation():
    r = montel_report([2, 4], 0, GRID)
    assert r.separation[(2, 4)] >= 0.1
