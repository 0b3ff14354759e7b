import numpy as np
import pytest
from scipy import special

from frht_lab.bessel import (asymptotic_threshold, bessel_j, bessel_j_prime, bessel_zeros,
                             bessel_zeros_upto)
from frht_lab.errors import DomainError


@pytest.mark.parametrize("nu", [0, 0.5, 1, 2, 3.5, 6])
def test_bessel_against_scipy_all_regimes(nu):
    x = np.concatenate([np.linspace(1e-3, 8, 200), np.linspace(8, 60, 300), np.linspace(60, 400, 200)])
    np.testing.assert_allclose(bessel_j(nu, x), special.jv(nu, x), atol=1e-13, rtol=0)


def test_bessel_at_zero():
    assert bessel_j(0, 0.0) == 1.0
    assert bessel_j(2, 0.0) == 0.0


def test_bessel_prime_against_scipy():
    x = np.linspace(0.05, 80, 500)
    for nu in (0, 1, 2.5):
        np.testing.assert_allclose(bessel_j_prime(nu, x), special.jvp(nu, x), atol=1e-12)


@pytest.mark.parametrize("nu", [0, 1, 2, 5])
def test_zeros_against_scipy(nu):
    np.testing.assert_allclose(bessel_zeros(nu, 30), special.jn_zeros(nu, 30), rtol=1e-13)


def test_zeros_upto():
    z = bessel_zeros_upto(0, 50.0)
    ref = special.jn_zeros(0, 40)
    np.testing.assert_allclose(z, ref[ref <= 50.0], rtol=1e-13)


def test_asymptotic_threshold_grows_with_order():
    assert asymptotic_threshold(0) >= 40
    assert asymptotic_threshold(10) > asymptotic_threshold(1)


def test_negative_order_rejected():
    with pytest.raises(DomainError):
        bessel_j(-1, 1.0)
