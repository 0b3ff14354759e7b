"""Quasi-asymptotic behaviour of regular distributions under the FrHT.

Covers slowly varying factors and the Abelian and Tauberian directions.

A regular distribution is a locally integrable :class:`TestFunction` ``f``;
its pairing with a test function is ``<f, phi> = int_0^inf f phi dx``.
``f`` has quasi-asymptotic behaviour of degree ``m`` at 0 with respect to a
slowly varying ``L`` when ``<f(eps x), phi(x)> / (eps^m L(eps)) -> <u, phi>``
for a ``u`` homogeneous of degree ``m``.

For the FrHT the Abelian direction reads

    <exp(i c1 (xi/eps)^2/2) H^alpha f(xi/eps), phi(xi)> / (eps^(m+1) L(eps))
        -> C / c2^(m+1) <u, H_mu0 phi>.

The left side is computed through the substitution ``xi = eps c2 x``:
``C eps^-m / L(eps) int f(eps x) exp(-i c1 (eps x)^2/2) H_mu0 phi(c2 x) dx``,
so only one Hankel transform (of ``phi``) is needed.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import ArgumentError, ConvergenceError, DomainError
from .frht import FrhtParams, frht_dechirped, hankel
from .functions import TestFunction, power
from .oscint import DEFAULT_TOL_ABS, DEFAULT_TOL_REL, Decay, Integrand, integrate_halfline

SV_KINDS = ("constant", "log_power", "iterated_log", "power")


def default_eps_grid(j0: int = 0, j1: int = 8, step: int = 1) -> np.ndarray:
    """eps = 10^(-j/2) for j = j0, j0+step, ..., j1 (descending)."""
    if step <= 0 or j1 < j0:
        raise ArgumentError("eps grid needs j0 <= j1 and a positive step")
    return 10.0 ** (-np.arange(j0, j1 + 1, step) / 2.0)


# ---------------------------------------------------------------------------
# slowly varying functions

@dataclass(frozen=True)
class SlowlyVaryingFn:
    """L on (0, A].  ``power`` (eps^p) is not slowly varying; it is kept as a control."""

    kind: str = "constant"
    p: float = 1.0

    def __post_init__(self):
        if self.kind not in SV_KINDS:
            raise ArgumentError(f"unknown slowly varying kind {self.kind!r}; known: {', '.join(SV_KINDS)}")

    @property
    def A(self) -> float:
        return {"constant": 1.0, "log_power": math.exp(-1.0),
                "iterated_log": math.exp(-math.e), "power": 1.0}[self.kind]

    @property
    def name(self) -> str:
        return self.kind if self.kind in ("constant", "iterated_log") else f"{self.kind}({self.p:g})"

    def __call__(self, eps):
        return sv_eval(self, eps)


def sv_eval(L: SlowlyVaryingFn, eps):
    """L(eps); arguments above the domain end A are clamped to A."""
    e = np.asarray(eps, dtype=float)
    if np.any(~np.isfinite(e)) or np.any(e <= 0):
        raise DomainError("slowly varying functions are defined for 0 < eps")
    e = np.minimum(e, L.A)
    if L.kind == "constant":
        out = np.ones_like(e)
    elif L.kind == "log_power":
        out = np.log(1.0 / e) ** L.p
    elif L.kind == "iterated_log":
        out = np.log(np.log(1.0 / e))
    else:
        out = e ** L.p
    return float(out) if out.ndim == 0 else out


def parse_sv(spec: str) -> SlowlyVaryingFn:
    """``constant``, ``log``, ``log_power:P``, ``iterated_log`` or ``power:P``."""
    name, _, arg = spec.strip().partition(":")
    if name == "log":
        return SlowlyVaryingFn("log_power", 1.0)
    try:
        return SlowlyVaryingFn(name, float(arg)) if arg else SlowlyVaryingFn(name)
    except ValueError as exc:
        raise ArgumentError(f"bad slowly varying spec {spec!r}") from exc


@dataclass
class SvReport:
    L: str
    a_values: list
    eps_values: np.ndarray
    deviations: np.ndarray          # shape (len(a), len(eps))
    tol: float
    within_tol: list                # per a, at the smallest eps
    decreasing: list                # per a, deviations shrink along the grid
    slowly_varying: bool

    @property
    def passed(self) -> bool:
        return all(self.within_tol) and self.slowly_varying


def sv_check(L: SlowlyVaryingFn, a_set: Sequence[float], eps_grid, tol: float = 0.06) -> SvReport:
    """|L(a eps)/L(eps) - 1| over the grid.

    ``within_tol`` applies ``tol`` at the smallest eps.  ``slowly_varying``
    asks for a trend: deviations must shrink by at least 10% from the
    largest to the smallest eps for every ``a``.
    """
    eps = np.sort(np.asarray(eps_grid, dtype=float))[::-1]
    a_list = [float(a) for a in a_set]
    if any(a <= 0 for a in a_list):
        raise DomainError("a must be positive")
    if np.any(np.outer(a_list, eps) > L.A * (1 + 1e-12)) or np.any(eps > L.A):
        warnings.warn("some a*eps exceed the domain end A; values are clamped", RuntimeWarning)
    dev = np.array([np.abs(sv_eval(L, a * eps) / sv_eval(L, eps) - 1.0) for a in a_list])
    within = [bool(row[-1] <= tol) for row in dev]
    if eps.size >= 2:
        decreasing = [bool(row[-1] <= 0.9 * row[0] or row[0] == 0.0) for row in dev]
    else:
        decreasing = [bool(row[-1] == 0.0) for row in dev]
    return SvReport(L.name, a_list, eps, dev, tol, within, decreasing, all(decreasing))


# ---------------------------------------------------------------------------
# pairings

def _pair_end(f_decay: Decay, f, phi_decay: Decay, phi, scale: float, tol_abs: float) -> float:
    ends = []
    for dec, fn, s in ((f_decay, f, scale), (phi_decay, phi, 1.0)):
        if dec.kind == "compact":
            ends.append(dec.param / s)
        elif dec.kind == "rapid":
            ends.append(fn.truncation(max(1e-2 * tol_abs, 1e-300)) / s)
    if not ends:
        raise DomainError("pairing needs at least one factor with rapid decay or compact support")
    return min(ends)


def pairing(f: TestFunction, phi: TestFunction, tol_abs=DEFAULT_TOL_ABS, tol_rel=DEFAULT_TOL_REL) -> complex:
    """<f, phi> = int_0^inf f(x) phi(x) dx."""
    end = _pair_end(f.decay, f, phi.decay, phi, 1.0, tol_abs)
    res = integrate_halfline(Integrand(lambda x: f(x) * phi(x), Decay.compact(end)), (), tol_abs, tol_rel)
    return res.value


def _scaled_integral(f, phi, eps, tol_abs, tol_rel, weight=None) -> complex:
    # int_0^inf f(eps x) phi(x) w(x) dx on the x side
    end = _pair_end(f.decay, f, phi.decay, phi, eps, tol_abs)
    if weight is None:
        fn = lambda x: f(eps * x) * phi(x)
    else:
        fn = lambda x: f(eps * x) * phi(x) * weight(x)
    bps = ()
    if f.decay.kind == "compact" and f.decay.param / eps < end:
        bps = (f.decay.param / eps,)
    return integrate_halfline(Integrand(fn, Decay.compact(end)), bps, tol_abs, tol_rel).value


def scaled_pairing(f: TestFunction, phi: TestFunction, eps: float, m: float,
                   L: SlowlyVaryingFn = SlowlyVaryingFn(), tol_abs=DEFAULT_TOL_ABS,
                   tol_rel=DEFAULT_TOL_REL) -> complex:
    """<f(eps x), phi(x)> / (eps^m L(eps))."""
    if eps <= 0:
        raise DomainError("eps must be positive")
    norm = eps ** m * sv_eval(L, eps)
    return _scaled_integral(f, phi, eps, tol_abs * norm, tol_rel) / norm


# ---------------------------------------------------------------------------
# sweeps

def fit_slope(eps, values):
    """Least-squares slope of log|values| against log eps, with its standard error."""
    eps = np.asarray(eps, dtype=float)
    mag = np.abs(np.asarray(values))
    ok = np.isfinite(mag) & (mag > 0)
    if ok.sum() < 2:
        return math.nan, math.nan
    lx, ly = np.log(eps[ok]), np.log(mag[ok])
    if ok.sum() == 2:
        return float((ly[1] - ly[0]) / (lx[1] - lx[0])), 0.0
    (slope, icpt), cov = np.polyfit(lx, ly, 1, cov=True)
    return float(slope), float(math.sqrt(max(cov[0, 0], 0.0)))


@dataclass
class SweepReport:
    eps_values: np.ndarray
    lhs_values: np.ndarray
    reference: complex
    ratios: np.ndarray
    fitted_slope: float
    slope_stderr: float
    raw_values: np.ndarray = None      # unnormalised pairings
    failures: dict = field(default_factory=dict)   # eps -> message
    label: str = ""
    tol: float = 1e-2
    warnings: list = field(default_factory=list)

    def __post_init__(self):
        self.eps_values = np.asarray(self.eps_values, dtype=float)
        if self.eps_values.size > 1 and np.any(np.diff(self.eps_values) >= 0):
            raise ArgumentError("eps_values must be strictly decreasing")

    @property
    def final_ratio(self) -> complex:
        good = np.isfinite(self.ratios)
        return complex(self.ratios[good][-1]) if good.any() else complex(math.nan)

    @property
    def cauchy_spread(self) -> float:
        """Largest pairwise distance among the last three finite ratios."""
        r = self.ratios[np.isfinite(self.ratios)][-3:]
        if r.size < 2:
            return math.nan
        return float(np.max(np.abs(r[:, None] - r[None, :])))

    @property
    def passed(self) -> bool:
        return bool(abs(self.final_ratio - 1.0) <= self.tol)


def _check_eps(eps_grid) -> np.ndarray:
    eps = np.asarray(eps_grid, dtype=float).ravel()
    if eps.size == 0:
        raise ArgumentError("eps grid is empty")
    if np.any(eps <= 0):
        raise DomainError("eps values must be positive")
    return np.sort(np.unique(eps))[::-1]


def _sweep(compute, eps, norm, reference, label, tol) -> SweepReport:
    raw = np.full(eps.size, complex(math.nan))
    failures = {}
    for i, e in enumerate(eps):
        try:
            raw[i] = compute(e)
        except (ConvergenceError, FloatingPointError) as exc:
            failures[float(e)] = str(exc)
    normed = raw / norm
    with np.errstate(invalid="ignore", divide="ignore"):
        ratios = normed / reference if reference != 0 else np.full(eps.size, complex(math.nan))
    notes = []
    if eps.size < 2:
        notes.append("single eps value: no slope fitted")
    slope, err = fit_slope(eps, raw)
    return SweepReport(eps, normed, reference, ratios, slope, err, raw, failures, label, tol, notes)


@dataclass
class QuasiAsymptoticSpec:
    degree_m: float
    L: SlowlyVaryingFn = field(default_factory=SlowlyVaryingFn)
    site: str = "zero"
    limit_u: Optional[TestFunction] = None

    def __post_init__(self):
        if self.site not in ("zero", "infinity"):
            raise ArgumentError("site must be 'zero' or 'infinity'")
        if self.limit_u is None:
            self.limit_u = power(self.degree_m)

    def homogeneity_defect(self, samples: int = 100, seed: int = 0) -> float:
        """max |u(a x) - a^m u(x)| / |a^m u(x)| over random (a, x)."""
        rng = np.random.default_rng(seed)
        a = rng.uniform(0.1, 10.0, samples)
        x = rng.uniform(0.1, 10.0, samples)
        lhs = self.limit_u(a * x)
        rhs = a ** self.degree_m * self.limit_u(x)
        return float(np.max(np.abs(lhs - rhs) / np.maximum(np.abs(rhs), 1e-300)))


def qa_behavior_check(f: TestFunction, spec: QuasiAsymptoticSpec, phi_set, eps_grid,
                      tol_abs=DEFAULT_TOL_ABS, tol_rel=DEFAULT_TOL_REL, tol: float = 1e-2) -> list:
    """One :class:`SweepReport` per phi: scaled pairings against <u, phi>.

    At infinity the sweep parameter is ``lam`` (ascending input) and the
    pairing is ``<f(lam x), phi> / (lam^m L(1/lam))``; the report stores
    ``eps = 1/lam``.
    """
    out = []
    for phi in phi_set:
        ref = pairing(spec.limit_u, phi, tol_abs, tol_rel)
        if spec.site == "zero":
            eps = _check_eps(eps_grid)
            scale = eps
        else:
            lam = np.sort(np.asarray(eps_grid, dtype=float))
            if np.any(lam <= 0):
                raise DomainError("lambda values must be positive")
            eps = 1.0 / lam
            scale = lam
        norm = scale ** spec.degree_m * sv_eval(spec.L, eps)
        compute = lambda e: _scaled_integral(f, phi, e if spec.site == "zero" else 1.0 / e,
                                             tol_abs * min(1.0, e ** spec.degree_m), tol_rel)
        out.append(_sweep(compute, eps, norm, ref, phi.name, tol))
    return out


@dataclass
class BoundedReport:
    label: str
    eps_values: np.ndarray
    normalized: np.ndarray
    C_hat: float
    tail_slope: float
    bounded: bool


def qa_bounded_check(f: TestFunction, m: float, L: SlowlyVaryingFn, phi_set, eps_grid,
                     tol_abs=DEFAULT_TOL_ABS, tol_rel=DEFAULT_TOL_REL, growth: float = 0.05) -> list:
    """C_hat = max |<f(eps x), phi>| / (eps^m L(eps)) and a no-growth flag.

    The flag fails when, over the smallest decade of eps, the normalised
    values grow like eps^(-s) with ``s > growth``.
    """
    eps = _check_eps(eps_grid)
    out = []
    for phi in phi_set:
        vals = np.array([abs(scaled_pairing(f, phi, e, m, L, tol_abs, tol_rel)) for e in eps])
        tail = eps <= 10 * eps[-1]
        slope, _ = fit_slope(eps[tail], vals[tail]) if tail.sum() >= 2 else (0.0, 0.0)
        if not math.isfinite(slope):
            slope = 0.0
        out.append(BoundedReport(phi.name, eps, vals, float(np.max(vals)), slope, bool(slope >= -growth)))
    return out


# ---------------------------------------------------------------------------
# Abelian direction

class HankelImage:
    """H_mu phi as a callable: spline of samples on a uniform grid.

    The samples are divided by ``y^(mu+1/2)`` and mirrored to an even
    spline, which matches the small-argument form of a transform of
    ``x^(mu+1/2)`` times a smooth function of ``x^2``.  Beyond the last
    sample (where ``|H phi|`` is below ``1e-13`` of its sup) the image is 0.
    """

    def __init__(self, mu: float, phi: TestFunction, step: float = 0.02, y_cap: float = 60.0,
                 tol_abs: float = 1e-13, tol_rel: float = 1e-11):
        self.mu = mu
        self.phi = phi
        y = np.arange(step, y_cap + 0.5 * step, step)
        vals = hankel(mu, phi, y, tol_abs, tol_rel).values
        mag = np.abs(vals)
        live = np.nonzero(mag > 1e-13 * mag.max())[0]
        last = min(int(live[-1]) + 8, y.size - 1) if live.size else 8
        self.y_max = float(y[last])
        y, vals = y[: last + 1], vals[: last + 1]
        self.expo = mu + 0.5
        red = vals / y ** self.expo
        self.spline = CubicSpline(np.concatenate([-y[::-1], y]), np.concatenate([red[::-1], red]))
        self.decay = Decay.compact(self.y_max)
        self.name = f"H{mu:g}[{phi.name}]"

    def __call__(self, y):
        y = np.asarray(y, dtype=float)
        out = self.spline(np.minimum(y, self.y_max)) * y ** self.expo
        return np.where(y <= self.y_max, out, 0.0)


_IMAGE_CACHE = {}


def hankel_image(mu: float, phi: TestFunction) -> HankelImage:
    key = (float(mu), phi.name)
    if key not in _IMAGE_CACHE:
        _IMAGE_CACHE[key] = HankelImage(mu, phi)
    return _IMAGE_CACHE[key]


def _as_test_function(h: HankelImage, scale: float = 1.0) -> TestFunction:
    return TestFunction(f"{h.name}({scale:g}x)", lambda x: h(scale * np.asarray(x, dtype=float)),
                        decay=Decay.compact(h.y_max / scale))


def abelian_lhs(p: FrhtParams, f: TestFunction, phi: TestFunction, eps: float, m: float,
                L: SlowlyVaryingFn = SlowlyVaryingFn(), route: str = "substitution",
                tol_abs=DEFAULT_TOL_ABS, tol_rel=DEFAULT_TOL_REL) -> complex:
    """<exp(i c1 (xi/eps)^2/2) H^alpha f(xi/eps), phi(xi)> / (eps^(m+1) L(eps)).

    ``route="substitution"`` (default) pairs ``f(eps x)`` with the chirp and
    ``H_mu0 phi(c2 x)``; ``route="direct"`` samples the transform of ``f`` on
    ``xi/eps`` and pairs it with ``phi``.
    """
    if eps <= 0:
        raise DomainError("eps must be positive")
    norm = eps ** m * sv_eval(L, eps)
    if route == "substitution":
        img = _as_test_function(hankel_image(p.mu0, phi), p.c2)
        chirp = None
        if p.c1 != 0:
            chirp = lambda x: np.exp(-0.5j * p.c1 * (eps * x) ** 2)
        val = _scaled_integral(f, img, eps, tol_abs * norm, tol_rel, weight=chirp)
        return p.C_alpha_mu * val / norm
    if route == "direct":
        return _abelian_direct(p, f, phi, eps, tol_abs, tol_rel) / (eps * norm)
    raise ArgumentError(f"unknown route {route!r}")


def _abelian_direct(p, f, phi, eps, tol_abs, tol_rel, step: Optional[float] = None) -> complex:
    # dechirped transform sampled on xi/eps and paired with phi; the samples
    # are divided by xi^(mu0+1/2) and mirrored so the spline is even at 0
    end = phi.truncation(1e-14)
    if step is None:
        step = min(0.05, 0.5 * eps / (2.0 * p.c2 * f.truncation(1e-14)))
    xi = np.arange(step, end + 0.5 * step, step)
    vals = np.array([frht_dechirped(p, f, s / eps, 1e-3 * tol_abs, tol_rel)[0] for s in xi])
    expo = p.mu0 + 0.5
    red = vals / xi ** expo
    spline = CubicSpline(np.concatenate([-xi[::-1], xi]), np.concatenate([red[::-1], red]))
    res = integrate_halfline(Integrand(lambda s: spline(s) * s ** expo * phi(s), Decay.compact(xi[-1])),
                             (), tol_abs, tol_rel)
    return res.value


def rhs_degree_window(mu0: int) -> tuple:
    """Open lower bound and closed upper bound of degrees accepted by :func:`abelian_rhs`."""
    return (-mu0 - 1.5, 12.0)


def abelian_rhs(p: FrhtParams, u: TestFunction, phi: TestFunction, m: float,
                tol_abs=DEFAULT_TOL_ABS, tol_rel=DEFAULT_TOL_REL) -> complex:
    """C / c2^(m+1) <u, H_mu0 phi>."""
    lo, hi = rhs_degree_window(p.mu0)
    if not (lo < m <= hi):
        raise DomainError(f"degree m = {m:g} outside the convergent window ({lo:g}, {hi:g}] "
                          f"for <x^m, H_mu0 phi> with mu0 = {p.mu0}")
    img = _as_test_function(hankel_image(p.mu0, phi))
    return p.C_alpha_mu / p.c2 ** (m + 1) * pairing(u, img, tol_abs, tol_rel)


def abelian_sweep(p: FrhtParams, f: TestFunction, spec: QuasiAsymptoticSpec, phi_set, eps_grid,
                  tol_abs=DEFAULT_TOL_ABS, tol_rel=DEFAULT_TOL_REL, tol: float = 1e-2) -> list:
    """One :class:`SweepReport` per phi; the slope is fitted to the unnormalised pairing
    ``eps^(m+1) L(eps) * LHS`` (expected ``m + 1`` when L is constant)."""
    if spec.site != "zero":
        raise ArgumentError("the Abelian sweep is stated at 0")
    eps = _check_eps(eps_grid)
    out = []
    for phi in phi_set:
        ref = abelian_rhs(p, spec.limit_u, phi, spec.degree_m, tol_abs, tol_rel)
        norm = eps ** (spec.degree_m + 1) * sv_eval(spec.L, eps)
        compute = lambda e: abelian_lhs(p, f, phi, e, spec.degree_m, SlowlyVaryingFn(), "substitution",
                                        tol_abs, tol_rel) * e ** (spec.degree_m + 1)
        out.append(_sweep(compute, eps, norm, ref, phi.name, tol))
    return out


@dataclass
class PhaseReport:
    eps_values: np.ndarray
    values: np.ndarray
    fitted_slope: float
    slope_stderr: float
    identically_zero: bool
    monotone: bool


def phase_lemma_check(g: TestFunction, phi: TestFunction, p: FrhtParams, eps_grid,
                      tol_abs=DEFAULT_TOL_ABS, tol_rel=DEFAULT_TOL_REL) -> PhaseReport:
    """|<g, (exp(i c1 (eps x / c2)^2 / 2) - 1) phi>| over eps and its log-log slope."""
    eps = _check_eps(eps_grid)
    if p.c1 == 0:
        z = np.zeros(eps.size)
        return PhaseReport(eps, z, math.nan, math.nan, True, True)
    vals = np.empty(eps.size)
    for i, e in enumerate(eps):
        half = 0.25 * p.c1 * (e / p.c2) ** 2
        # exp(2i h x^2) - 1 written without cancellation
        w = lambda x, h=half: 2j * np.sin(h * x * x) * np.exp(1j * h * x * x)
        end = _pair_end(g.decay, g, phi.decay, phi, 1.0, tol_abs)
        res = integrate_halfline(Integrand(lambda x: g(x) * phi(x) * w(x), Decay.compact(end)), (),
                                 tol_abs * e * e, tol_rel)
        vals[i] = abs(res.value)
    slope, err = fit_slope(eps, vals)
    monotone = bool(np.all(np.diff(vals) <= 0))
    return PhaseReport(eps, vals, slope, err, bool(np.all(vals == 0)), monotone)


# ---------------------------------------------------------------------------
# Tauberian hypotheses

@dataclass
class TauberianReport:
    xi_grid: np.ndarray
    eps_values: np.ndarray
    values: np.ndarray            # (len(xi), len(eps)) normalised transform values
    M_xi_estimates: np.ndarray
    stabilization: np.ndarray
    bound_C: float
    bound_N: float
    eps0: float
    passed_i: bool
    passed_ii: bool
    stab_tol: float
    C_max: float
    zero_level: float
    settled: np.ndarray = None
    failures: dict = field(default_factory=dict)

    def __post_init__(self):
        if not (0 < self.eps0 <= 1):
            raise ArgumentError("eps0 must lie in (0, 1]")


def tauberian_values(p: FrhtParams, f: TestFunction, m: float, L: SlowlyVaryingFn, xi_grid, eps,
                     rel_tol: float = 1e-7, abs_floor: float = 5e-14):
    """exp(i c1 (xi/eps)^2/2) H^alpha f(xi/eps) / (eps^(m+1) L(eps)) on the (xi, eps) grid.

    The absolute quadrature tolerance shrinks with ``eps^(m+1)`` because the
    transform at ``xi/eps`` is small and arises from heavy cancellation; it
    never goes below ``abs_floor``, the roundoff level of such integrals.
    """
    xi = np.asarray(xi_grid, dtype=float)
    out = np.full((xi.size, eps.size), complex(math.nan))
    failures = {}
    for j, e in enumerate(eps):
        norm = e ** (m + 1) * sv_eval(L, e)
        tol_abs = max(rel_tol * norm, abs_floor)
        for i, s in enumerate(xi):
            try:
                v, _ = frht_dechirped(p, f, s / e, tol_abs, 1e-10)
                out[i, j] = v / norm
            except ConvergenceError as exc:
                failures[(float(s), float(e))] = str(exc)
    return out, failures


def tauberian_check(p: FrhtParams, f: TestFunction, m: float, L: SlowlyVaryingFn, xi_grid, eps_grid,
                    N: float = 1.0, C_max: float = 1e6, eps0: float = 1e-1, stab_tol: float = 1e-2,
                    zero_rel: float = 1e-6) -> TauberianReport:
    """Condition (i): the normalised transform settles as eps -> 0 (relative
    change between the two smallest eps <= 1e-2 within ``stab_tol``).
    Condition (ii): ``|value| <= C xi^(N + mu0 + 1/2)`` for all eps <= eps0;
    the smallest such C is reported and compared with ``C_max``.

    A point also counts as settled when the absolute change is below
    ``zero_rel`` times the largest value in the sweep: a limit that is
    numerically zero has no meaningful relative change.
    """
    xi = np.asarray(xi_grid, dtype=float).ravel()
    if xi.size == 0:
        raise ArgumentError("xi grid is empty")
    if np.any(xi <= 0):
        raise DomainError("xi values must be positive")
    eps = _check_eps(eps_grid)
    vals, failures = tauberian_values(p, f, m, L, xi, eps)
    small = np.nonzero(eps <= 1e-2 * (1 + 1e-12))[0]
    if small.size < 2:
        raise ArgumentError("condition (i) needs at least two eps values <= 1e-2")
    i1, i2 = small[-2], small[-1]
    scale = float(np.nanmax(np.abs(vals))) if np.isfinite(vals).any() else 0.0
    zero_level = zero_rel * scale
    m_est = vals[:, i2]
    change = np.abs(vals[:, i2] - vals[:, i1])
    with np.errstate(invalid="ignore", divide="ignore"):
        stab = np.where(change > 0, change / np.abs(m_est), 0.0)
    settled = (stab <= stab_tol) | (change <= zero_level)
    passed_i = bool(np.all(np.isfinite(change)) and np.all(settled))
    use = eps <= eps0 * (1 + 1e-12)
    weight = xi[:, None] ** (N + p.mu0 + 0.5)
    ratios = np.abs(vals[:, use]) / weight
    C = float(np.nanmax(ratios)) if use.any() and np.isfinite(ratios).any() else 0.0
    passed_ii = bool(np.isfinite(ratios).all() and C <= C_max) if use.any() else False
    return TauberianReport(xi, eps, vals, m_est, stab, C, float(N), float(eps0), passed_i, passed_ii,
                           stab_tol, float(C_max), zero_level, settled, failures)


def power_law_limit(p: FrhtParams, a: float, xi) -> np.ndarray:
    """Closed-form limit of the normalised transform for ``f = x^a`` near 0.

    ``C c2^(-a-1) M_a xi^(-a-1)`` with
    ``M_a = 2^(a+1/2) Gamma((mu0+a+3/2)/2) / Gamma((mu0-a+1/2)/2)``
    (zero when ``a - mu0 - 1/2`` is an even nonnegative integer).
    """
    from scipy.special import gamma, rgamma
    mu = p.mu0
    M = 2.0 ** (a + 0.5) * gamma((mu + a + 1.5) / 2) * rgamma((mu - a + 0.5) / 2)
    return p.C_alpha_mu * p.c2 ** (-a - 1) * M * np.asarray(xi, dtype=float) ** (-a - 1)
