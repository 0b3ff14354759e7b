import math

import numpy as np
import pytest
from scipy.special import gamma

from frht_lab.asymptotics import (QuasiAsymptoticSpec, SlowlyVaryingFn, abelian_lhs, abelian_rhs,
                                  abelian_sweep, default_eps_grid, fit_slope, hankel_image, pairing,
                                  parse_sv, phase_lemma_check, power_law_limit, qa_behavior_check,
                                  rhs_degree_window, scaled_pairing, sv_check, sv_eval, tauberian_check)
from frht_lab.errors import ArgumentError, DomainError
from frht_lab.frht import hankel, make_params
from frht_lab.functions import gaussian_bessel, laguerre_bessel, power, power_cutoff


def test_default_eps_grid():
    e = default_eps_grid()
    assert e.size == 9 and e[0] == 1.0 and abs(e[-1] - 1e-4) < 1e-18
    np.testing.assert_allclose(default_eps_grid(2, 6, 2), [0.1, 0.01, 0.001])
    with pytest.raises(ArgumentError):
        default_eps_grid(3, 1)


def test_slowly_varying_values_and_clamp():
    L = parse_sv("log")
    assert abs(L(1e-3) - math.log(1e3)) < 1e-12
    assert L(0.9) == L(L.A) == 1.0
    assert parse_sv("iterated_log")(1e-6) == pytest.approx(math.log(math.log(1e6)))
    assert parse_sv("constant")(0.3) == 1.0
    with pytest.raises(DomainError):
        sv_eval(L, 0.0)
    with pytest.raises(ArgumentError):
        parse_sv("nope")


def test_sv_check_log_and_control():
    eps = default_eps_grid(2, 12, 2)
    r = sv_check(parse_sv("log"), [0.5, 2.0], eps)
    # |log(1/(a eps)) / log(1/eps) - 1| = |log a| / log(1/eps)
    np.testing.assert_allclose(r.deviations[1], math.log(2) / np.log(1 / eps), rtol=1e-12)
    assert r.passed
    c = sv_check(SlowlyVaryingFn("power", 0.1), [2.0], eps)
    assert not c.slowly_varying
    assert abs(c.deviations[0, -1] - (2 ** 0.1 - 1)) < 1e-12


def test_fit_slope_exact_power():
    eps = default_eps_grid()
    s, err = fit_slope(eps, 3 * eps ** 2.5)
    assert abs(s - 2.5) < 1e-12 and err < 1e-10
    assert math.isnan(fit_slope([0.1], [1.0])[0])


def test_pairing_gaussian_moment():
    # <x, x^(1/2) e^(-x^2/2)> = 2^(1/4) Gamma(5/4)
    v = pairing(power_cutoff(1.0), gaussian_bessel(0))
    ref_full = 2 ** 0.25 * gamma(1.25)
    assert v.real < ref_full  # the cutoff removes mass
    from frht_lab.functions import TestFunction
    from frht_lab import jets
    x_rapid = TestFunction("x", lambda x: x, decay=power(1.0).decay)
    assert abs(pairing(x_rapid, gaussian_bessel(0)) - ref_full) < 1e-10


def test_scaled_pairing_homogeneous_limit():
    # f = x near 0: <f(eps x), phi> / eps -> <x, phi>
    phi = gaussian_bessel(0)
    v = scaled_pairing(power_cutoff(1.0), phi, 1e-3, 1.0)
    assert abs(v - 2 ** 0.25 * gamma(1.25)) < 1e-9


def test_qa_behavior_at_zero():
    spec = QuasiAsymptoticSpec(1.0)
    assert spec.homogeneity_defect() < 1e-12
    reps = qa_behavior_check(power_cutoff(1.0), spec, [gaussian_bessel(0), laguerre_bessel(0, 1)],
                             default_eps_grid(2, 6, 2))
    for r in reps:
        assert r.passed and abs(r.final_ratio - 1) < 1e-6


def test_abelian_rhs_closed_form():
    p = make_params(math.pi / 4, 0)
    rhs = abelian_rhs(p, power(1.0), gaussian_bessel(0), 1.0)
    ref = p.C_alpha_mu / p.c2 ** 2 * 2 ** 0.25 * gamma(1.25)
    assert abs(rhs - ref) < 1e-8 * abs(ref)


def test_abelian_rhs_degree_window():
    p = make_params(math.pi / 4, 1)
    lo, hi = rhs_degree_window(1)
    assert lo == -2.5
    with pytest.raises(DomainError):
        abelian_rhs(p, power(-3.0), gaussian_bessel(1), -3.0)


def test_hankel_image_matches_hankel():
    img = hankel_image(1, laguerre_bessel(1, 1))
    y = np.linspace(0.1, 6, 13)
    np.testing.assert_allclose(img(y), hankel(1, laguerre_bessel(1, 1), y).values, atol=1e-8)


def test_abelian_routes_agree():
    p = make_params(math.pi / 3, 0)
    f, phi = power_cutoff(1.0), gaussian_bessel(0)
    a = abelian_lhs(p, f, phi, 0.1, 1.0, route="substitution")
    b = abelian_lhs(p, f, phi, 0.1, 1.0, route="direct")
    assert abs(a - b) < 1e-6 * abs(a)
    with pytest.raises(DomainError):
        abelian_lhs(p, f, phi, 0.0, 1.0)


def test_abelian_sweep_slope_and_ratio():
    p = make_params(math.pi / 4, 0)
    rep = abelian_sweep(p, power_cutoff(2.0), QuasiAsymptoticSpec(2.0), [gaussian_bessel(0)],
                        default_eps_grid(2, 8, 1))[0]
    assert rep.passed
    assert abs(rep.fitted_slope - 3.0) < 0.05
    single = abelian_sweep(p, power_cutoff(2.0), QuasiAsymptoticSpec(2.0), [gaussian_bessel(0)], [1e-2])[0]
    assert math.isnan(single.fitted_slope) and single.warnings


def test_abelian_wrong_L_fails():
    p = make_params(math.pi / 4, 0)
    rep = abelian_sweep(p, power_cutoff(1.0), QuasiAsymptoticSpec(1.0, parse_sv("log")),
                        [gaussian_bessel(0)], default_eps_grid(2, 6, 2))[0]
    assert not rep.passed


def test_phase_factor_decay():
    g, phi = power_cutoff(1.0), gaussian_bessel(0)
    r = phase_lemma_check(g, phi, make_params(math.pi / 3, 0), default_eps_grid())
    assert abs(r.fitted_slope - 2.0) < 0.1 and r.monotone
    z = phase_lemma_check(g, phi, make_params(math.pi / 2, 0), default_eps_grid())
    assert z.identically_zero and np.all(z.values == 0)


@pytest.mark.parametrize("a", [0.5, 1.0, 2.0])
def test_tauberian_limit_matches_closed_form(a):
    p = make_params(math.pi / 4, 0)
    xi = np.array([0.7, 1.5, 3.0])
    rep = tauberian_check(p, power_cutoff(a), a, SlowlyVaryingFn(), xi, default_eps_grid(2, 6, 1))
    assert rep.passed_i and rep.passed_ii
    ref = power_law_limit(p, a, xi)
    # the limit vanishes identically for a = 1/2, mu0 = 0; compare on the sweep's zero level then
    scale = max(np.max(np.abs(ref)), rep.zero_level / 1e-2)
    assert np.max(np.abs(rep.M_xi_estimates - ref)) <= 1e-2 * scale


def test_tauberian_errors():
    p = make_params(math.pi / 4, 0)
    with pytest.raises(ArgumentError):
        tauberian_check(p, power_cutoff(1.0), 1.0, SlowlyVaryingFn(), [], default_eps_grid(2, 6, 1))
    with pytest.raises(ArgumentError):
        tauberian_check(p, power_cutoff(1.0), 1.0, SlowlyVaryingFn(), [1.0], [0.1, 0.01])
    rep = tauberian_check(p, power_cutoff(1.0), 1.0, SlowlyVaryingFn(), [1.0], default_eps_grid(2, 6, 2),
                          C_max=0.0)
    assert not rep.passed_ii
