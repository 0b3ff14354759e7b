import math

import numpy as np
import pytest
from scipy import special

from frht_lab.errors import ArgumentError
from frht_lab.functions import (GridFunction, catalog, gaussian_bessel, laguerre_bessel, parse_function,
                                power_cutoff, zero)


def test_catalog_shape():
    for mu0 in (0, 1, 2):
        cat = catalog(mu0)
        assert len(cat) == 6
        assert len({f.name for f in cat}) == 6


def test_laguerre_bessel_closed_form():
    x = np.linspace(0.1, 4, 30)
    for mu in (0, 1, 2):
        for n in (0, 1, 2):
            f = laguerre_bessel(mu, n)
            ref = x ** (mu + 0.5) * special.eval_genlaguerre(n, mu, x * x) * np.exp(-x * x / 2)
            np.testing.assert_allclose(f(x), ref, rtol=1e-13, atol=1e-15)


def test_gaussian_bessel_matches_laguerre_n0():
    x = np.linspace(0.1, 3, 10)
    np.testing.assert_allclose(gaussian_bessel(1)(x), laguerre_bessel(1, 0)(x), rtol=1e-14)


@pytest.mark.parametrize("f", catalog(1), ids=lambda f: f.name)
def test_jets_against_finite_differences(f):
    x0 = np.array([0.3, 0.9, 1.7])
    d = f.jet(x0, 2).derivatives()
    h = 1e-5
    fd1 = (f(x0 + h) - f(x0 - h)) / (2 * h)
    fd2 = (f(x0 + h) - 2 * f(x0) + f(x0 - h)) / h ** 2
    np.testing.assert_allclose(d[1], fd1, rtol=1e-6, atol=1e-9)
    np.testing.assert_allclose(d[2], fd2, rtol=1e-3, atol=1e-5)


@pytest.mark.parametrize("f", catalog(0), ids=lambda f: f.name)
def test_tjet_consistent_with_xjet(f):
    # F(t) = f(sqrt t): F'(t) = f'(x) / (2x)
    x0 = np.array([0.5, 1.2])
    dx = f.jet(x0, 1).derivatives()[1]
    dt = f.tjet(x0 ** 2, 1).derivatives()[1]
    np.testing.assert_allclose(dt, dx / (2 * x0), rtol=1e-11)


def test_power_cutoff_vanishes_beyond_support():
    f = power_cutoff(1.0)
    x = np.array([0.1, 0.5, 50.0])
    v = f(x)
    assert abs(v[0] - 0.1) < 1e-14
    assert v[2] == 0.0


def test_parse_function():
    f = parse_function("laguerre_bessel:1,2")
    np.testing.assert_allclose(f(np.array([0.7])), laguerre_bessel(1, 2)(np.array([0.7])))
    assert parse_function("zero")(np.array([1.0]))[0] == 0.0
    assert parse_function("wide_gaussian:2").name == catalog(2)[5].name
    with pytest.raises(ArgumentError):
        parse_function("nope:1")
    with pytest.raises(ArgumentError):
        parse_function("gaussian_bessel:1,2,3")
    with pytest.raises(ArgumentError):
        parse_function("gaussian_bessel:abc")


def test_linear_combination():
    f = 2.0 * gaussian_bessel(0) + zero()
    x = np.array([0.5, 1.0])
    np.testing.assert_allclose(f(x), 2 * gaussian_bessel(0)(x))


def test_grid_function_validation():
    with pytest.raises(ArgumentError):
        GridFunction([0.0, 1.0], [1.0, 2.0])
    with pytest.raises(ArgumentError):
        GridFunction([1.0, 0.5], [1.0, 2.0])
    g = GridFunction(np.linspace(0.1, 3, 50), np.sin(np.linspace(0.1, 3, 50)))
    assert abs(g.interpolant()(1.0) - math.sin(1.0)) < 1e-5
