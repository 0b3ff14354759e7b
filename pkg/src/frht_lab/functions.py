"""Test functions with exact derivatives, plus grid-sampled functions.

Every :class:`TestFunction` is built from one closed-form expression written
against :mod:`frht_lab.jets`, so the same code gives values and exact
derivatives.  Catalog entries also carry the expression in the variable
``t = x**2``; the seminorm code uses it to apply ``(x^-1 D)^k = 2^k d^k/dt^k``
without the cancellation a direct expansion suffers near the origin.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.special import binom

from . import jets
from .errors import ArgumentError, CapabilityError
from .oscint import Decay, truncation_point

MAX_ORDER = 12
CUTOFF_LO = 1.0
CUTOFF_HI = 2.0


class TestFunction:
    """A smooth function on (0, inf) with exact derivatives up to ``max_order``.

    ``expr`` maps an ndarray or a :class:`~frht_lab.jets.Jet` in ``x`` to the
    function value; ``texpr`` (optional) does the same for ``t = x**2``.
    """

    __test__ = False  # not a pytest class

    def __init__(self, name: str, expr: Callable, *, texpr: Optional[Callable] = None,
                 tsplit: Optional[tuple] = None, max_order: int = MAX_ORDER, decay: Decay = Decay.rapid()):
        self.name = name
        self.expr = expr
        # tsplit = (q, G) declares f(sqrt t) = t^q G(t) with G smooth at t = 0
        self.tsplit = tsplit
        if texpr is None and tsplit is not None:
            q, G = tsplit
            texpr = lambda t: jets.power(t, q) * G(t)
        self.texpr = texpr
        self.max_order = max_order
        self.decay = decay
        self._trunc = {}

    def __repr__(self):
        return f"TestFunction({self.name})"

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return np.asarray(self.expr(x)) * np.ones_like(x)

    eval = __call__

    def jet(self, x, order: int) -> jets.Jet:
        self._check_order(order)
        out = self.expr(jets.Jet.variable(x, order))
        if not isinstance(out, jets.Jet):
            out = jets.Jet.constant(out, order, np.shape(x))
        return out

    def tjet(self, t, order: int) -> Optional[jets.Jet]:
        """Jet of ``F(t) = f(sqrt(t))`` around ``t``, or None without a t-form."""
        if self.texpr is None:
            return None
        self._check_order(order)
        out = self.texpr(jets.Jet.variable(t, order))
        if not isinstance(out, jets.Jet):
            out = jets.Jet.constant(out, order, np.shape(t))
        return out

    def weighted_tjet(self, t, shift: float, order: int) -> Optional[jets.Jet]:
        """Jet of ``t^(-shift/2) F(t)`` around ``t``, or None without a t-form.

        With a declared split the powers are combined before expanding; near
        ``t = 0`` the separate jets of ``t^-s`` and ``t^s`` cancel badly.
        """
        if self.texpr is None:
            return None
        self._check_order(order)
        tj = jets.Jet.variable(t, order)
        if self.tsplit is not None:
            q, G = self.tsplit
            e = q - 0.5 * shift
            out = G(tj) if e == 0 else jets.power(tj, e) * G(tj)
        else:
            out = jets.power(tj, -0.5 * shift) * self.texpr(tj)
        if not isinstance(out, jets.Jet):
            out = jets.Jet.constant(out, order, np.shape(t))
        return out

    def deriv(self, k: int) -> Callable:
        """The exact k-th derivative as a vectorised callable."""
        self._check_order(k)
        if k == 0:
            return self.__call__
        return lambda x: self.jet(np.asarray(x, dtype=float), k).derivative(k)

    def _check_order(self, k: int):
        if k > self.max_order:
            raise CapabilityError(f"{self.name} has derivatives only up to order {self.max_order}, asked for {k}")

    @property
    def is_complex(self) -> bool:
        return np.iscomplexobj(self(np.array([0.5])))

    def truncation(self, threshold: float) -> float:
        """Point beyond which the function is negligible (support end if compact)."""
        if self.decay.kind == "compact":
            return self.decay.param
        if self.decay.kind == "rapid" and self.decay.param:
            return self.decay.param
        key = float(threshold)
        if key not in self._trunc:
            self._trunc[key] = truncation_point(self, threshold)
        return self._trunc[key]

    # linear combinations (pairing bilinearity, transform linearity)
    def __add__(self, other: "TestFunction") -> "TestFunction":
        texpr, tsplit = None, None
        if self.tsplit is not None and other.tsplit is not None and self.tsplit[0] == other.tsplit[0]:
            q, F, G = self.tsplit[0], self.tsplit[1], other.tsplit[1]
            tsplit = (q, lambda t: F(t) + G(t))
        elif self.texpr is not None and other.texpr is not None:
            texpr = lambda t, f=self.texpr, g=other.texpr: f(t) + g(t)
        return TestFunction(f"({self.name}+{other.name})", lambda x: self.expr(x) + other.expr(x),
                            texpr=texpr, tsplit=tsplit, max_order=min(self.max_order, other.max_order),
                            decay=_combine_decay(self.decay, other.decay))

    def __rmul__(self, c) -> "TestFunction":
        texpr, tsplit = None, None
        if self.tsplit is not None:
            q, G = self.tsplit
            tsplit = (q, lambda t: c * G(t))
        elif self.texpr is not None:
            texpr = lambda t, f=self.texpr: c * f(t)
        return TestFunction(f"{c}*{self.name}", lambda x: c * self.expr(x), texpr=texpr, tsplit=tsplit,
                            max_order=self.max_order, decay=self.decay)


def _combine_decay(a: Decay, b: Decay) -> Decay:
    if a.kind == "compact" and b.kind == "compact":
        return Decay.compact(max(a.param, b.param))
    if "polynomial" in (a.kind, b.kind):
        ps = [d.param for d in (a, b) if d.kind == "polynomial"]
        return Decay.polynomial(min(ps))
    return Decay.rapid()


@dataclass
class GridFunction:
    """Values sampled on an increasing grid of positive points."""

    points: np.ndarray
    values: np.ndarray
    errors: Optional[np.ndarray] = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=float)
        self.values = np.asarray(self.values)
        if self.points.shape != self.values.shape or self.points.ndim != 1:
            raise ArgumentError("points and values must be 1-d arrays of equal length")
        if self.points.size and (self.points[0] <= 0 or np.any(np.diff(self.points) <= 0)):
            raise ArgumentError("grid points must be positive and strictly increasing")
        if self.errors is not None:
            self.errors = np.asarray(self.errors, dtype=float)

    def __len__(self):
        return self.points.size

    def interpolant(self) -> Callable:
        """Cubic spline through the samples (complex values allowed)."""
        return CubicSpline(self.points, self.values)


# ---------------------------------------------------------------------------
# catalog

def cutoff(x):
    """Fixed smooth cutoff: 1 on (0, 1], 0 on [2, inf)."""
    return jets.smooth_step(x, CUTOFF_LO, CUTOFF_HI)


def _cutoff_t(t):
    # psi(sqrt(t)) with the constant pieces kept exact near the origin
    t0 = jets.value_of(t)
    inner = (t0 > CUTOFF_LO ** 2) & (t0 < CUTOFF_HI ** 2)
    ts = jets.where(inner, t, 2.0)
    return jets.where(t0 <= CUTOFF_LO ** 2, 1.0,
                      jets.where(t0 >= CUTOFF_HI ** 2, 0.0, cutoff(jets.sqrt(ts))))


def _laguerre(n: int, mu: float, t):
    coeffs = [(-1) ** j * binom(n + mu, n - j) / math.factorial(j) for j in range(n + 1)]
    acc = coeffs[-1]
    for c in reversed(coeffs[:-1]):
        acc = acc * t + c
    return acc


def gaussian_bessel(mu: float) -> TestFunction:
    """x^(mu+1/2) exp(-x^2/2), the self-reciprocal function of H_mu."""
    p = mu + 0.5
    return TestFunction(
        f"gaussian_bessel:{mu:g}",
        lambda x: jets.power(x, p) * jets.exp(-0.5 * x * x),
        tsplit=(0.5 * p, lambda t: jets.exp(-0.5 * t)),
        decay=Decay.rapid(),
    )


def laguerre_bessel(mu: float, n: int) -> TestFunction:
    """x^(mu+1/2) L_n^(mu)(x^2) exp(-x^2/2); H_mu eigenvalue (-1)^n."""
    p = mu + 0.5
    return TestFunction(
        f"laguerre_bessel:{mu:g},{n}",
        lambda x: jets.power(x, p) * _laguerre(n, mu, x * x) * jets.exp(-0.5 * x * x),
        tsplit=(0.5 * p, lambda t: _laguerre(n, mu, t) * jets.exp(-0.5 * t)),
        decay=Decay.rapid(),
    )


def power_cutoff(a: float) -> TestFunction:
    """x^a times the smooth cutoff; coincides with x^a on (0, 1]."""
    return TestFunction(
        f"power_cutoff:{a:g}",
        lambda x: jets.power(x, a) * cutoff(x),
        tsplit=(0.5 * a, _cutoff_t),
        decay=Decay.compact(CUTOFF_HI),
    )


def power_log(a: float) -> TestFunction:
    """x^a log(1/x) times the smooth cutoff."""
    return TestFunction(
        f"power_log:{a:g}",
        lambda x: -jets.power(x, a) * jets.log(x) * cutoff(x),
        tsplit=(0.5 * a, lambda t: -0.5 * jets.log(t) * _cutoff_t(t)),
        decay=Decay.compact(CUTOFF_HI),
    )


def power(a: float) -> TestFunction:
    """The homogeneous function x^a (polynomial growth or decay)."""
    return TestFunction(
        f"power:{a:g}",
        lambda x: jets.power(x, a),
        tsplit=(0.5 * a, lambda t: 1.0 + 0.0 * t),
        decay=Decay.polynomial(-a),
    )


def exp_power(p: float, rate: float = 1.0) -> TestFunction:
    """x^p exp(-rate x)."""
    return TestFunction(
        f"exp_power:{p:g},{rate:g}",
        lambda x: jets.power(x, p) * jets.exp(-rate * x),
        decay=Decay.rapid(),
    )


def zero() -> TestFunction:
    return TestFunction("zero", lambda x: 0.0 * x, texpr=lambda t: 0.0 * t,
                        decay=Decay.compact(CUTOFF_HI))


def chirped(f: TestFunction, c1: float) -> TestFunction:
    """exp(-i c1 x^2 / 2) f(x)."""
    if c1 == 0:
        return f
    texpr, tsplit = None, None
    if f.tsplit is not None:
        q, G = f.tsplit
        tsplit = (q, lambda t: jets.exp(-0.5j * c1 * t) * G(t))
    elif f.texpr is not None:
        texpr = lambda t: jets.exp(-0.5j * c1 * t) * f.texpr(t)
    return TestFunction(f"chirp({c1:.6g})*{f.name}", lambda x: jets.exp(-0.5j * c1 * x * x) * f.expr(x),
                        texpr=texpr, tsplit=tsplit, max_order=f.max_order, decay=f.decay)


_BUILDERS = {
    "gaussian_bessel": (gaussian_bessel, (float,)),
    "laguerre_bessel": (laguerre_bessel, (float, int)),
    "power_cutoff": (power_cutoff, (float,)),
    "power_log": (power_log, (float,)),
    "power": (power, (float,)),
    "exp_power": (exp_power, (float, float)),
    "wide_gaussian": (lambda mu0: exp_gaussian_mix(mu0), (int,)),
    "zero": (zero, ()),
}


def parse_function(spec: str) -> TestFunction:
    """Build a catalog function from ``NAME:P1,P2`` (e.g. ``laguerre_bessel:1,2``)."""
    name, _, params = spec.strip().partition(":")
    if name not in _BUILDERS:
        raise ArgumentError(f"unknown function {name!r}; known: {', '.join(sorted(_BUILDERS))}")
    builder, types = _BUILDERS[name]
    args = [p for p in params.split(",") if p.strip()] if params else []
    if len(args) > len(types) or len(args) < len(types) - (1 if name == "exp_power" else 0):
        raise ArgumentError(f"{name} takes {len(types)} parameter(s), got {len(args)}")
    try:
        return builder(*(typ(float(v)) if typ is int else typ(v) for typ, v in zip(types, args)))
    except ValueError as exc:
        raise ArgumentError(f"bad parameters for {name}: {params!r}") from exc


def catalog(mu0: int) -> list:
    """The six-function transform catalog for order ``mu0``.

    Every entry is ``x^(mu0+1/2)`` times a smooth function of ``x^2``, so its
    FrHT decays fast enough for grid-based inversion.
    """
    return [
        gaussian_bessel(mu0),
        laguerre_bessel(mu0, 1),
        laguerre_bessel(mu0, 2),
        power_cutoff(mu0 + 0.5),
        power_cutoff(mu0 + 2.5),
        exp_gaussian_mix(mu0),
    ]


def exp_gaussian_mix(mu0: int) -> TestFunction:
    """x^(mu0+1/2) (1 + x^2/2) exp(-x^2/4): a wider non-eigen Gaussian-type entry."""
    p = mu0 + 0.5
    return TestFunction(
        f"wide_gaussian:{mu0:g}",
        lambda x: jets.power(x, p) * (1.0 + 0.5 * x * x) * jets.exp(-0.25 * x * x),
        tsplit=(0.5 * p, lambda t: (1.0 + 0.5 * t) * jets.exp(-0.25 * t)),
        decay=Decay.rapid(),
    )
