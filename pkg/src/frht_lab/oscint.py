"""Adaptive half-line quadrature for decaying, possibly oscillatory integrands.

The head of the integral is handled by vectorised adaptive Gauss-Kronrod
(10/21) panels; integrands that decay only polynomially get a partial-sum
sequence over oscillation cells which is extrapolated with the Levin
u-transform.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.special import comb

from .errors import ArgumentError, ConvergenceError

DEFAULT_TOL_ABS = 1e-10
DEFAULT_TOL_REL = 1e-8
MAX_TRUNCATION = 60.0

_XGK = np.array([
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.0,
])
_WGK = np.array([
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077208703561111, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
])
_WG = np.array([
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
])

# full 21-point node set on [-1, 1] and the embedded 10-point Gauss weights
NODES = np.concatenate([-_XGK[:-1], [0.0], _XGK[:-1][::-1]])
KRONROD_W = np.concatenate([_WGK[:-1], [_WGK[-1]], _WGK[:-1][::-1]])
GAUSS_W = np.zeros(21)
GAUSS_W[1:10:2] = _WG
GAUSS_W[11:20:2] = _WG[::-1]


@dataclass(frozen=True)
class Decay:
    """Decay descriptor of an integrand or test function at infinity.

    ``kind`` is ``"rapid"``, ``"polynomial"`` or ``"compact"``; ``param`` is
    the power ``p`` for polynomial decay, the support end ``b`` for compact
    support, and an optional explicit truncation point for rapid decay.
    """

    kind: str
    param: Optional[float] = None

    def __post_init__(self):
        if self.kind not in ("rapid", "polynomial", "compact"):
            raise ArgumentError(f"unknown decay class {self.kind!r}")
        if self.kind == "compact" and not (self.param and self.param > 0):
            raise ArgumentError("compact support needs a positive end point")

    @classmethod
    def rapid(cls, end: Optional[float] = None) -> "Decay":
        return cls("rapid", end)

    @classmethod
    def polynomial(cls, p: float) -> "Decay":
        return cls("polynomial", float(p))

    @classmethod
    def compact(cls, b: float) -> "Decay":
        return cls("compact", float(b))


@dataclass
class Integrand:
    eval: Callable[[np.ndarray], np.ndarray]
    decay: Decay = field(default_factory=Decay.rapid)
    # cap on panel width as a function of the panel's right end (chirps)
    max_width: Optional[Callable[[float], float]] = None
    # n -> first n oscillation-cell edges beyond the last breakpoint
    tail_cells: Optional[Callable[[int], np.ndarray]] = None


@dataclass
class QuadratureResult:
    value: complex
    abs_error_estimate: float
    panels_used: int
    tail_terms_used: int = 0

    def __post_init__(self):
        self.abs_error_estimate = max(0.0, float(self.abs_error_estimate))


def chirp_width(c1: float) -> Optional[Callable[[float], float]]:
    """Panel width cap letting each panel see at most one period of ``exp(-i c1 x^2 / 2)``."""
    if c1 == 0:
        return None
    c = abs(c1)
    return lambda x: math.sqrt(math.pi / (c * max(x, 1e-300)))


def truncation_point(fn, threshold: float, cap: float = MAX_TRUNCATION, samples: int = 2400) -> float:
    """Smallest scan point beyond which ``|fn|`` stays below ``threshold`` (capped)."""
    xs = np.linspace(0.0, cap, samples + 1)[1:]
    vals = np.abs(np.asarray(fn(xs)))
    above = np.nonzero(~(vals < threshold))[0]
    if above.size == 0:
        return float(xs[0])
    return float(xs[min(above[-1] + 1, xs.size - 1)])


def _panel_rule(fn, a: np.ndarray, b: np.ndarray):
    half = 0.5 * (b - a)
    mid = 0.5 * (b + a)
    x = mid[:, None] + half[:, None] * NODES[None, :]
    y = np.asarray(fn(x.ravel())).reshape(x.shape)
    if not np.all(np.isfinite(y)):
        raise ConvergenceError("integrand is not finite on a quadrature panel")
    k = (y @ KRONROD_W) * half
    g = (y @ GAUSS_W) * half
    absk = (np.abs(y) @ KRONROD_W) * np.abs(half)
    return k, np.abs(k - g), absk


def _split_interval(a: float, b: float, cap) -> list:
    if cap is None:
        return [a, b]
    w = cap(b)
    n = max(1, int(math.ceil((b - a) / w)))
    return list(np.linspace(a, b, n + 1))


def _initial_edges(edges: Sequence[float], cap) -> np.ndarray:
    out = [edges[0]]
    for a, b in zip(edges[:-1], edges[1:]):
        out.extend(_split_interval(a, b, cap)[1:])
    return np.asarray(out, dtype=float)


def adaptive_panels(fn, edges, tol_abs: float, tol_rel: float, max_panels: int = 200_000):
    """Adaptive GK21 over consecutive ``edges``; returns (value, error, panels)."""
    edges = np.asarray(edges, dtype=float)
    a = edges[:-1].copy()
    b = edges[1:].copy()
    val, err, absv = _panel_rule(fn, a, b)
    while True:
        order = np.argsort(a, kind="stable")
        a, b, val, err, absv = a[order], b[order], val[order], err[order], absv[order]
        total = complex(np.sum(val))
        total_err = float(np.sum(err))
        roundoff = 50.0 * np.finfo(float).eps * float(np.sum(absv))
        target = max(tol_abs, tol_rel * abs(total), roundoff)
        if total_err <= target:
            return total, total_err, a.size
        if a.size >= max_panels:
            raise ConvergenceError(
                f"quadrature did not converge: error {total_err:.3g} > target {target:.3g} "
                f"after {a.size} panels",
                partial=QuadratureResult(total, total_err, a.size),
            )
        splittable = (b - a) > 8 * np.finfo(float).eps * np.maximum(np.abs(a), np.abs(b))
        # panels whose error is at the roundoff level of their own sum cannot improve
        splittable &= err > 100 * np.finfo(float).eps * absv
        if not splittable.any():
            return total, total_err, a.size
        # bisect the largest-error panels until the rest fit in half the budget
        cand = np.nonzero(splittable)[0]
        rank = cand[np.argsort(-err[cand], kind="stable")]
        remaining = total_err - np.cumsum(err[rank])
        n_split = int(np.searchsorted(-remaining, -0.5 * target)) + 1
        pick = np.zeros(a.size, dtype=bool)
        pick[rank[:min(n_split, rank.size)]] = True
        m = 0.5 * (a[pick] + b[pick])
        na = np.concatenate([a[pick], m])
        nb = np.concatenate([m, b[pick]])
        nv, ne, nabs = _panel_rule(fn, na, nb)
        keep = ~pick
        a = np.concatenate([a[keep], na])
        b = np.concatenate([b[keep], nb])
        val = np.concatenate([val[keep], nv])
        err = np.concatenate([err[keep], ne])
        absv = np.concatenate([absv[keep], nabs])


def _levin_u(s: np.ndarray, beta: float = 1.0) -> list:
    """Levin u-transforms of orders 1 .. len(s)-1, all anchored at the first term."""
    a = np.diff(s, prepend=0.0)
    out = []
    for k in range(1, s.size):
        j = np.arange(k + 1)
        w = (beta + j) * a[: k + 1]
        if np.any(w == 0):
            break
        c = (-1.0) ** j * comb(k, j) * ((beta + j) / (beta + k)) ** (k - 1)
        out.append(np.sum(c * s[: k + 1] / w) / np.sum(c / w))
    return out


def accelerate_tail(partial_sums) -> tuple:
    """Extrapolated limit of a sequence of partial sums (Levin u-transform).

    Returns ``(limit, error_estimate)``; the error estimate is the difference
    between the two highest-order transforms.
    """
    s = np.asarray(partial_sums, dtype=complex).ravel()
    if s.size < 4:
        raise ArgumentError("accelerate_tail needs at least 4 partial sums")
    if np.all(s == s[0]):
        return s[0], 0.0
    est = [e for e in _levin_u(s) if np.isfinite(e)]
    if len(est) < 2:
        return s[-1], float(abs(s[-1] - s[-2]))
    return est[-1], float(abs(est[-1] - est[-2]))


def integrate_halfline(
    f,
    breakpoints: Sequence[float] = (),
    tol_abs: float = DEFAULT_TOL_ABS,
    tol_rel: float = DEFAULT_TOL_REL,
    *,
    max_panels: int = 200_000,
    max_tail_terms: int = 512,
) -> QuadratureResult:
    """Integrate ``f`` over (0, inf).

    ``f`` is an :class:`Integrand` or a plain vectorised callable (treated
    as rapidly decaying).  ``breakpoints`` are interior panel edges, e.g.
    scaled Bessel zeros.
    """
    if tol_abs <= 0 or tol_rel <= 0:
        raise ArgumentError("tolerances must be positive")
    if not isinstance(f, Integrand):
        f = Integrand(f)
    bp = np.asarray(breakpoints, dtype=float).ravel()
    if bp.size and (np.any(bp <= 0) or np.any(np.diff(bp) <= 0)):
        raise ArgumentError("breakpoints must be positive and strictly increasing")
    decay = f.decay
    if decay.kind == "compact":
        end = decay.param
    elif decay.kind == "rapid":
        end = decay.param if decay.param else truncation_point(f.eval, 1e-2 * tol_abs)
    else:
        if bp.size == 0:
            raise ArgumentError("polynomially decaying integrands need breakpoints")
        end = float(bp[-1])
    inner = bp[(bp > 0) & (bp < end)]
    edges = _initial_edges(np.concatenate([[0.0], inner, [end]]), f.max_width)
    value, err, panels = adaptive_panels(f.eval, edges, tol_abs, tol_rel, max_panels)
    if decay.kind != "polynomial":
        return QuadratureResult(value, err, panels, 0)
    return _integrate_tail(f, end, bp, value, err, panels, tol_abs, tol_rel, max_tail_terms)


def _default_cells(end: float, bp: np.ndarray):
    gap = float(np.mean(np.diff(bp[-4:]))) if bp.size >= 2 else math.pi
    return lambda n: end + gap * np.arange(1, n + 1)


def _integrate_tail(f, end, bp, head, head_err, panels, tol_abs, tol_rel, max_terms):
    cells_fn = f.tail_cells or _default_cells(end, bp)
    n = 16
    best = None
    while True:
        cell_edges = np.concatenate([[end], np.asarray(cells_fn(n), dtype=float)])
        vals = []
        cell_err = 0.0
        for lo, hi in zip(cell_edges[:-1], cell_edges[1:]):
            ce = _initial_edges([lo, hi], f.max_width)
            v, e, p = adaptive_panels(f.eval, ce, 0.1 * tol_abs, tol_rel)
            vals.append(v)
            cell_err += e
            panels += p
        sums = head + np.cumsum(vals)
        limit, ext_err = accelerate_tail(sums)
        total_err = head_err + cell_err + ext_err
        best = QuadratureResult(complex(limit), total_err, panels, n)
        if total_err <= max(tol_abs, tol_rel * abs(limit)):
            return best
        if 2 * n > max_terms:
            raise ConvergenceError(
                f"tail extrapolation did not converge (error {total_err:.3g})", partial=best
            )
        n *= 2
