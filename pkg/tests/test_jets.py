import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from frht_lab import jets
from frht_lab.jets import Jet


def test_variable_derivatives():
    j = Jet.variable(np.array([0.5, 2.0]), 3)
    d = j.derivatives()
    np.testing.assert_allclose(d[0], [0.5, 2.0])
    np.testing.assert_allclose(d[1], [1.0, 1.0])
    np.testing.assert_allclose(d[2:], 0.0)


def test_exp_of_square_matches_closed_form():
    x0 = np.array([0.3, 1.1, 2.4])
    x = Jet.variable(x0, 4)
    d = jets.exp(-x * x).derivatives()
    e = np.exp(-x0 ** 2)
    np.testing.assert_allclose(d[1], -2 * x0 * e, rtol=1e-13)
    np.testing.assert_allclose(d[2], (4 * x0 ** 2 - 2) * e, rtol=1e-13)
    np.testing.assert_allclose(d[3], (-8 * x0 ** 3 + 12 * x0) * e, rtol=1e-12)
    np.testing.assert_allclose(d[4], (16 * x0 ** 4 - 48 * x0 ** 2 + 12) * e, rtol=1e-12)


@pytest.mark.parametrize("p", [0.5, -1.5, 2.0, 3.25])
def test_power_derivatives(p):
    x0 = np.array([0.7, 1.9])
    d = jets.power(Jet.variable(x0, 3), p).derivatives()
    for k in range(4):
        coef = math.prod(p - i for i in range(k))
        np.testing.assert_allclose(d[k], coef * x0 ** (p - k), rtol=1e-12)


def test_log_and_sqrt():
    x0 = np.array([0.4, 3.0])
    x = Jet.variable(x0, 2)
    np.testing.assert_allclose(jets.log(x).derivatives()[2], -1 / x0 ** 2, rtol=1e-13)
    np.testing.assert_allclose(jets.sqrt(x).derivatives()[1], 0.5 / np.sqrt(x0), rtol=1e-13)


@settings(max_examples=40, deadline=None)
@given(st.floats(0.2, 3.0), st.floats(-2.0, 2.0))
def test_product_rule_against_finite_difference(x0, a):
    f = lambda x: jets.exp(a * x) * jets.power(x, 1.5)
    d1 = f(Jet.variable(x0, 1)).derivatives()[1]
    h = 1e-6
    fd = (f(np.array(x0 + h)) - f(np.array(x0 - h))) / (2 * h)
    assert abs(d1 - fd) <= 1e-6 * max(1.0, abs(fd))


def test_smooth_step_limits():
    x = np.array([-1.0, 0.0, 0.5, 1.0, 2.0])
    s = jets.value_of(jets.smooth_step(x, 0.0, 1.0))
    assert s[0] == 1.0 and s[1] == 1.0
    assert s[3] == 0.0 and s[4] == 0.0
    assert 0.0 < s[2] < 1.0


def test_where_selects_coefficients():
    x = Jet.variable(np.array([-1.0, 1.0]), 2)
    out = jets.where(np.array([True, False]), x * x, x)
    d = out.derivatives()
    np.testing.assert_allclose(d[0], [1.0, 1.0])
    np.testing.assert_allclose(d[1], [-2.0, 1.0])
