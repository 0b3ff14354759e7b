"""Weighted sup seminorms on (0, inf) with their order inequalities.

Also the bounded-but-not-compact sequence kappa_n.

``gamma(mu, m, k)(f) = sup_x |x^m (x^-1 D)^k (x^(-mu-1/2) f(x))|``

``beta_mk(mu, m, k)(f) = gamma(2mu - 1/2, m, k)(f) + gamma(2mu + 1/2, m, k)(f)``

``beta(mu)(f) = max over m, k <= 2mu of beta_mk(mu, m, k)(f)``

Suprema are maxima over a logarithmic :class:`EvalGrid`.  Values that grow
without bound at an end of the grid are reported as ``+inf`` with a warning
instead of a large finite number.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

import numpy as np

from . import jets
from .errors import ArgumentError, CapabilityError, CoverageError, DomainError
from .functions import GridFunction, TestFunction
from .oscint import Decay, adaptive_panels

# log-log slope at a grid end beyond which growth counts as divergence
DIVERGENCE_SLOPE = 0.05


@dataclass(frozen=True)
class EvalGrid:
    x_min: float = 1e-4
    x_max: float = 40.0
    n: int = 2000
    # additional points merged into the grid (local refinement)
    extra: tuple = ()

    def __post_init__(self):
        if not (0 < self.x_min < self.x_max) or self.n < 2:
            raise ArgumentError("EvalGrid needs 0 < x_min < x_max and n >= 2")

    def points(self) -> np.ndarray:
        pts = np.geomspace(self.x_min, self.x_max, self.n)
        if self.extra:
            e = np.asarray(self.extra, dtype=float)
            pts = np.union1d(pts, e[(e >= self.x_min) & (e <= self.x_max)])
        return pts

    def doubled(self) -> "EvalGrid":
        return EvalGrid(self.x_min, self.x_max, 2 * self.n, self.extra)

    def refined(self, centers, halfwidth: float, count: int = 401) -> "EvalGrid":
        """A copy with ``count`` uniform points on each ``[c - halfwidth, c + halfwidth]``."""
        pts = [np.linspace(c - halfwidth, c + halfwidth, count) for c in centers]
        extra = tuple(np.concatenate([np.asarray(self.extra, dtype=float)] + pts).tolist())
        return EvalGrid(self.x_min, self.x_max, self.n, extra)


@dataclass
class SeminormValue:
    mu: float
    m: int
    k: int
    value: float
    argmax_x: float
    warning: Optional[str] = None

    @property
    def finite(self) -> bool:
        return math.isfinite(self.value)


# ---------------------------------------------------------------------------
# the operator (x^-1 D)^k

@lru_cache(maxsize=None)
def expansion_coefficients(k: int) -> tuple:
    """Integers a_j with (x^-1 D)^k f = sum_j a_j x^(j - 2k) f^(j), j = 1..k (j = 0 for k = 0)."""
    a = {0: 1}
    for kk in range(k):
        nxt = {}
        for j, c in a.items():
            # D(x^(j-2kk) f^(j)) / x
            if j - 2 * kk != 0:
                nxt[j] = nxt.get(j, 0) + c * (j - 2 * kk)
            nxt[j + 1] = nxt.get(j + 1, 0) + c
        a = nxt
    return tuple(a.get(j, 0) for j in range(k + 1))


def _apply_expansion(derivs: np.ndarray, x: np.ndarray, k: int) -> np.ndarray:
    coeffs = expansion_coefficients(k)
    out = np.zeros(np.broadcast_shapes(derivs.shape[1:], x.shape), dtype=derivs.dtype)
    for j, c in enumerate(coeffs):
        if c:
            out = out + c * x ** (j - 2 * k) * derivs[j]
    return out


def _jet_xinvd(jet: jets.Jet, xjet: jets.Jet) -> jets.Jet:
    # one application of x^-1 D on a jet; the order drops by one
    c = jet.c
    n = c.shape[0] - 1
    scale = np.arange(1, n + 1).reshape((-1,) + (1,) * (c.ndim - 1))
    d = jets.Jet(c[1:] * scale)
    return d * jets.Jet(xjet.c[:n]).reciprocal()


def _jet_tderiv(jet: jets.Jet) -> jets.Jet:
    c = jet.c
    n = c.shape[0] - 1
    scale = np.arange(1, n + 1).reshape((-1,) + (1,) * (c.ndim - 1))
    return jets.Jet(2.0 * c[1:] * scale)


def _variable_point(xj: jets.Jet):
    c = xj.c
    if c.shape[0] > 1 and not (np.all(c[1] == 1) and not np.any(c[2:])):
        raise ArgumentError("operator results accept only the plain variable jet")
    return c[0]


def x_inv_d(f: TestFunction, k: int) -> TestFunction:
    """The function ``(x^-1 D)^k f`` with exact derivatives (order drops by ``k``)."""
    if k < 0:
        raise ArgumentError("k must be nonnegative")
    if k > f.max_order:
        raise CapabilityError(f"{f.name} has derivatives only up to order {f.max_order}, asked for {k}")
    if k == 0:
        return f

    def expr(x):
        if isinstance(x, jets.Jet):
            x0 = _variable_point(x)
            order = x.order
            xj = jets.Jet.variable(x0, order + k)
            g = f.jet(x0, order + k)
            for _ in range(k):
                g = _jet_xinvd(g, xj)
                xj = jets.Jet(xj.c[:-1])
            return g
        x = np.asarray(x, dtype=float)
        return _apply_expansion(f.jet(x, k).derivatives(), x, k)

    texpr = None
    if f.texpr is not None:
        def texpr(t):
            if isinstance(t, jets.Jet):
                t0 = _variable_point(t)
                g = f.tjet(t0, t.order + k)
            else:
                g = f.tjet(np.asarray(t, dtype=float), k)
            for _ in range(k):
                g = _jet_tderiv(g)
            return g if isinstance(t, jets.Jet) else g.value

    return TestFunction(f"xinvd{k}({f.name})", expr, texpr=texpr, max_order=f.max_order - k,
                        decay=f.decay)


def weighted_xinvd(f: TestFunction, shift: float, k: int, x) -> np.ndarray:
    """``(x^-1 D)^k (x^-shift f)`` on ``x``, exact derivatives throughout.

    Uses ``(x^-1 D)^k = 2^k (d/dt)^k`` in ``t = x^2`` when ``f`` has a t-form,
    which avoids cancellation between terms near the origin.
    """
    x = np.asarray(x, dtype=float)
    if k > f.max_order:
        raise CapabilityError(f"{f.name} has derivatives only up to order {f.max_order}, asked for {k}")
    with np.errstate(all="ignore"):
        if f.texpr is not None:
            return 2.0 ** k * f.weighted_tjet(x * x, shift, k).derivative(k)
        xj = jets.Jet.variable(x, k)
        g = jets.power(xj, -shift) * f.jet(x, k)
        return _apply_expansion(g.derivatives(), x, k)


# ---------------------------------------------------------------------------
# seminorms

def _sup(values: np.ndarray, x: np.ndarray):
    mag = np.abs(values)
    if not np.all(np.isfinite(mag)):
        return math.inf, float(x[np.argmax(~np.isfinite(mag))]), "non-finite value on the grid"
    i = int(np.argmax(mag))
    value = float(mag[i])
    if value == 0.0:
        return 0.0, float(x[0]), None
    for end, nxt in ((0, 1), (x.size - 1, x.size - 2)):
        if i == end and mag[nxt] > 0:
            slope = math.log(mag[end] / mag[nxt]) / math.log(x[end] / x[nxt])
            growing = slope < -DIVERGENCE_SLOPE if end == 0 else slope > DIVERGENCE_SLOPE
            if growing:
                where = "0" if end == 0 else "infinity"
                return math.inf, float(x[end]), f"unbounded towards {where} (log-log slope {slope:.3g})"
    return value, float(x[i]), None


def gamma_seminorm(mu: float, m: int, k: int, f: TestFunction, grid: EvalGrid = EvalGrid()) -> SeminormValue:
    """gamma^mu_{m,k}(f) as a grid maximum, ``+inf`` when the sup diverges."""
    if m < 0 or k < 0:
        raise ArgumentError("m and k must be nonnegative")
    x = grid.points()
    vals = x ** m * weighted_xinvd(f, mu + 0.5, k, x)
    value, where, warn = _sup(vals, x)
    if warn:
        warnings.warn(f"gamma^{mu:g}_{m},{k}({f.name}): {warn}", RuntimeWarning, stacklevel=2)
    return SeminormValue(mu, m, k, value, where, warn)


def beta_mk(mu: int, m: int, k: int, f: TestFunction, grid: EvalGrid = EvalGrid()) -> SeminormValue:
    """beta^mu_{m,k} = gamma^{2mu-1/2}_{m,k} + gamma^{2mu+1/2}_{m,k}."""
    lo = gamma_seminorm(2 * mu - 0.5, m, k, f, grid)
    hi = gamma_seminorm(2 * mu + 0.5, m, k, f, grid)
    wit = lo if lo.value >= hi.value else hi
    return SeminormValue(mu, m, k, lo.value + hi.value, wit.argmax_x, lo.warning or hi.warning)


def beta_table(mu: int, f: TestFunction, grid: EvalGrid = EvalGrid()) -> list:
    """All beta^mu_{m,k} with m, k <= 2mu, row-major in (m, k)."""
    if 2 * mu > f.max_order:
        raise CapabilityError(f"{f.name} has derivatives only up to order {f.max_order}")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        return [beta_mk(mu, m, k, f, grid) for m in range(2 * mu + 1) for k in range(2 * mu + 1)]


def beta_seminorm(mu: int, f: TestFunction, grid: EvalGrid = EvalGrid()) -> SeminormValue:
    """beta^mu(f): the largest beta^mu_{m,k} over m, k <= 2mu."""
    table = beta_table(mu, f, grid)
    best = max(table, key=lambda s: s.value)
    warn = next((s.warning for s in table if s.warning), None)
    return SeminormValue(mu, best.m, best.k, best.value, best.argmax_x, warn)


@dataclass
class OrderCheck:
    mu: int
    function: str
    lhs: float
    factor: float
    rhs: float
    passed: bool
    beta_mu: float
    beta_next: float
    monotone: bool
    note: Optional[str] = None
    intermediate: Optional[bool] = None   # the two gamma-level bounds behind the fixed-index form


def _leq(a: float, b: float) -> Optional[bool]:
    if math.isinf(a) and math.isinf(b):
        return None
    return a <= b * (1 + 1e-12)


def beta_order_check(mu: int, f: TestFunction, grid: EvalGrid = EvalGrid()) -> OrderCheck:
    """Both fixed-index sides ``beta^mu_{2mu,2mu} <= (4mu+1) beta^{mu+1}_{2mu+2,2mu+2}``
    and the sup form ``beta^mu <= beta^{mu+1}``.

    A comparison between two infinite values is reported as undecided
    (``passed = False`` with a note).
    """
    if 2 * (mu + 1) > f.max_order:
        raise CapabilityError(f"{f.name} has derivatives only up to order {f.max_order}")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        lhs = beta_mk(mu, 2 * mu, 2 * mu, f, grid).value
        rhs = beta_mk(mu + 1, 2 * mu + 2, 2 * mu + 2, f, grid).value
    factor = 4 * mu + 1
    b0 = beta_seminorm(mu, f, grid).value
    b1 = beta_seminorm(mu + 1, f, grid).value
    fixed = _leq(lhs, factor * rhs)
    mono = _leq(b0, b1)
    inter = _intermediate_bounds(mu, f, grid)
    note = None
    if fixed is None or mono is None:
        note = "both sides infinite: undecided on this function"
    return OrderCheck(mu, f.name, lhs, factor, factor * rhs, bool(fixed), b0, b1, bool(mono), note,
                      None if inter is None else bool(inter))


def _intermediate_bounds(mu: int, f: TestFunction, grid: EvalGrid) -> Optional[bool]:
    """gamma^{2mu+s}_{2mu,2mu} <= 4mu gamma^{2mu+2+s}_{2mu,2mu-1} + gamma^{2mu+2+s}_{2mu+2,2mu}, s = -1/2, 1/2."""
    results = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        for s in (-0.5, 0.5):
            lhs = gamma_seminorm(2 * mu + s, 2 * mu, 2 * mu, f, grid).value
            rhs = gamma_seminorm(2 * mu + 2 + s, 2 * mu + 2, 2 * mu, f, grid).value
            if mu > 0:
                rhs += 4 * mu * gamma_seminorm(2 * mu + 2 + s, 2 * mu, 2 * mu - 1, f, grid).value
            results.append(_leq(lhs, rhs))
    if any(r is None for r in results):
        return None
    return all(results)


@dataclass
class RecursionReport:
    function: str
    m: int
    k: int
    mu: int
    x: np.ndarray
    lhs: np.ndarray
    rhs: np.ndarray
    deviation: float


def double_factorial(n: int) -> int:
    return math.prod(range(n, 0, -2)) if n > 0 else 1


def recursion_check(f: TestFunction, m: int, k: int, mu: int, x_samples) -> RecursionReport:
    """Both sides of the recursion for ``x^m (x^-1 D)^k (x^-2mu f)``.

    ``RHS = (2k)!! x^(m-2mu-2k) f + x^(m+2) sum_{j<k} C_j (x^-1 D)^(k-j) (x^(-2mu-2(j+1)) f)``
    with ``C_0 = 1`` and ``C_j = 2k (2k-2) ...`` (j factors).  The deviation is
    ``max |LHS - RHS| / max(|LHS|, sum of |RHS terms|)`` over the samples.
    """
    if k > f.max_order - 2:
        raise CapabilityError(f"recursion check needs derivatives up to k + 2 = {k + 2}")
    x = np.asarray(x_samples, dtype=float)
    lhs = x ** m * weighted_xinvd(f, 2 * mu, k, x)
    terms = [double_factorial(2 * k) * x ** (m - 2 * mu - 2 * k) * f(x)]
    for j in range(k):
        cj = math.prod(2 * k - 2 * i for i in range(j))
        terms.append(cj * x ** (m + 2) * weighted_xinvd(f, 2 * mu + 2 * (j + 1), k - j, x))
    rhs = np.sum(terms, axis=0)
    scale = np.maximum(np.abs(lhs), np.sum(np.abs(terms), axis=0))
    with np.errstate(invalid="ignore", divide="ignore"):
        dev = np.where(scale > 0, np.abs(lhs - rhs) / scale, 0.0)
    return RecursionReport(f.name, m, k, mu, x, lhs, rhs, float(np.max(dev)))


def b_space_seminorm(mu: int, b: float, f: TestFunction, grid: EvalGrid = EvalGrid()) -> SeminormValue:
    """Seminorm of the compact-support subspace: max over k <= 2mu of beta^mu_{0,k}."""
    x = grid.points()
    outside = x > b
    if np.any(outside) and np.max(np.abs(f(x[outside]))) > 1e-12:
        raise DomainError(f"{f.name} does not vanish beyond b = {b:g}")
    if 2 * mu > f.max_order:
        raise CapabilityError(f"{f.name} has derivatives only up to order {f.max_order}")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        table = [beta_mk(mu, 0, k, f, grid) for k in range(2 * mu + 1)]
    best = max(table, key=lambda s: s.value)
    return SeminormValue(mu, 0, best.k, best.value, best.argmax_x, best.warning)


# ---------------------------------------------------------------------------
# the sequence kappa_n = delta_n * (t^(mu+1/2) phi_n)

def bump(t):
    """Unnormalised bump exp(-1/(1 - 4t^2)) on |t| < 1/2 (jets accepted)."""
    t0 = jets.value_of(t)
    inside = np.abs(t0) < 0.5
    u = 1.0 - 4.0 * t * t
    safe = jets.where(inside, u, 1.0)
    return jets.where(inside, jets.exp(-1.0 / safe), 0.0)


@lru_cache(maxsize=1)
def bump_mass() -> float:
    val, _, _ = adaptive_panels(lambda s: np.asarray(jets.value_of(bump(s))), np.linspace(-0.5, 0.5, 9),
                                1e-15, 1e-14)
    return float(val.real)


def default_theta() -> TestFunction:
    """Even, nonnegative, unit-mass bump supported in [-1/2, 1/2]."""
    c = 1.0 / bump_mass()
    return TestFunction("bump", lambda t: c * bump(t), decay=Decay.compact(0.5))


@dataclass
class MontelSequenceParams:
    n: int
    mu: int = 0
    theta: TestFunction = field(default_factory=default_theta)

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ArgumentError("n must be a positive integer")


def phi_n(n: int, t):
    """The ramp: 0 below 1/(2n), t^(2n) up to 1 - 1/(4n), 1 up to 3, 0 beyond."""
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    ramp = (t > 1 / (2 * n)) & (t < 1 - 1 / (4 * n))
    out[ramp] = t[ramp] ** (2 * n)
    out[(t >= 1 - 1 / (4 * n)) & (t < 3)] = 1.0
    return out


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(40)
_SUBPANELS = 8


class MontelFunction(TestFunction):
    """kappa_n with exact derivatives, computed piece by piece.

    Each smooth piece ``[a, b]`` of ``h = t^(mu+1/2) phi_n`` contributes
    ``int_a^b delta_n^(j)(x - s) h(s) ds`` to the j-th derivative, so jumps of
    ``h`` never sit inside a quadrature panel.
    """

    def __init__(self, params: MontelSequenceParams, max_order: int = 6):
        self.params = params
        n, mu = params.n, params.mu
        self.width = 1.0 / (16 * n)
        p = mu + 0.5
        self.pieces = [
            (1 / (2 * n), 1 - 1 / (4 * n), lambda s: s ** (p + 2 * n)),
            (1 - 1 / (4 * n), 3.0, lambda s: s ** p),
        ]
        super().__init__(f"kappa:{n},{mu}", self._expr, max_order=max_order,
                         decay=Decay.compact(3.0 + self.width))

    def _delta_derivs(self, u: np.ndarray, order: int) -> np.ndarray:
        s = 8 * self.params.n
        jet = self.params.theta.jet(s * u, order)
        return np.stack([s ** (j + 1) * jet.derivative(j) for j in range(order + 1)])

    def derivs(self, x, order: int) -> np.ndarray:
        """kappa_n^(j)(x) for j = 0..order, stacked on axis 0."""
        x = np.asarray(x, dtype=float)
        flat = x.ravel()
        out = np.zeros((order + 1, flat.size))
        w = self.width
        for a, b, h in self.pieces:
            lo = np.maximum(a, flat - w)
            hi = np.minimum(b, flat + w)
            live = hi > lo
            if not live.any():
                continue
            xl, lo, hi = flat[live], lo[live], hi[live]
            edges = lo[:, None] + (hi - lo)[:, None] * np.linspace(0, 1, _SUBPANELS + 1)[None, :]
            half = 0.5 * np.diff(edges, axis=1)
            mid = 0.5 * (edges[:, 1:] + edges[:, :-1])
            s = mid[:, :, None] + half[:, :, None] * _GL_NODES[None, None, :]
            wts = half[:, :, None] * _GL_WEIGHTS[None, None, :]
            dd = self._delta_derivs(xl[:, None, None] - s, order)
            out[:, live] = np.sum(dd * (h(s) * wts)[None], axis=(2, 3))
        return out.reshape((order + 1,) + x.shape)

    def _expr(self, x):
        if isinstance(x, jets.Jet):
            x0 = _variable_point(x)
            d = self.derivs(x0, x.order)
            fact = np.array([math.factorial(j) for j in range(x.order + 1)], dtype=float)
            return jets.Jet(d / fact.reshape((-1,) + (1,) * (d.ndim - 1)))
        return self.derivs(x, 0)[0]


def montel_sequence(params: MontelSequenceParams, grid: EvalGrid = EvalGrid()) -> GridFunction:
    """kappa_n sampled on the grid."""
    n = params.n
    if grid.x_min > 1 / (4 * n) or grid.x_max < 4.0:
        raise CoverageError(f"grid [{grid.x_min:g}, {grid.x_max:g}] does not cover [1/(4n), 4] = [{1 / (4 * n):g}, 4]")
    x = grid.points()
    return GridFunction(x, MontelFunction(params)(x), meta={"n": n, "mu": params.mu})


@dataclass
class MontelReport:
    n_list: list
    mu: int
    gammas: dict            # (m, k) -> list of gamma values, one per n
    spread: dict            # (m, k) -> max/min across n
    separation: dict        # (n, n') -> sup over [1/2, 3/2] of |kappa_n - kappa_n'|
    bounded: bool
    separated: bool
    spread_limit: float = 10.0
    separation_limit: float = 0.1
    note: str = "numerical evidence only, not a proof"


def _jump_points(n: int) -> list:
    return [1 / (2 * n), 1 - 1 / (4 * n), 3.0]


def montel_report(n_list, mu: int = 0, grid: EvalGrid = EvalGrid(), orders: int = 2,
                  spread_limit: float = 10.0, separation_limit: float = 0.1) -> MontelReport:
    """gamma^mu_{m,k}(kappa_n) for m, k <= ``orders`` and pairwise separations."""
    n_list = [int(n) for n in n_list]
    if not n_list:
        raise ArgumentError("n_list must be nonempty")
    seqs = {n: MontelFunction(MontelSequenceParams(n, mu)) for n in n_list}
    for n in n_list:
        if grid.x_min > 1 / (4 * n) or grid.x_max < 4.0:
            raise CoverageError(f"grid does not cover [1/(4n), 4] for n = {n}")
    gammas, spread = {}, {}
    # kappa_n varies on the mollifier scale near the jumps of phi_n
    local = {n: grid.refined(_jump_points(n), 2.0 / (16 * n)) for n in n_list}
    for m in range(orders + 1):
        for k in range(orders + 1):
            vals = [gamma_seminorm(mu, m, k, seqs[n], local[n]).value for n in n_list]
            gammas[(m, k)] = vals
            lo = min(vals)
            spread[(m, k)] = max(vals) / lo if lo > 0 else math.inf
    window = np.linspace(0.5, 1.5, 2001)
    samples = {n: seqs[n](window) for n in n_list}
    separation = {}
    for i, a in enumerate(n_list):
        for b in n_list[i + 1:]:
            separation[(a, b)] = float(np.max(np.abs(samples[a] - samples[b])))
    bounded = all(v <= spread_limit for v in spread.values())
    separated = all(v >= separation_limit for v in separation.values())
    return MontelReport(n_list, mu, gammas, spread, separation, bounded, separated,
                        spread_limit, separation_limit)
