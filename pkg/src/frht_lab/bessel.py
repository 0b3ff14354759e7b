"""Bessel functions of the first kind for real order ``nu >= -1/2``.

Three regimes, chosen per argument:

* ``x <= SERIES_MAX``: ascending power series.
* ``SERIES_MAX < x <= asymptotic_threshold(nu)``: Bessel/Schlaefli integral
  representation, trapezoidal (integer order, periodic integrand) or
  Gauss-Legendre quadrature.
* larger ``x``: Hankel asymptotic expansion truncated at its smallest term.

All routines are vectorised over ``x``.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from .errors import ArgumentError, DomainError

MIN_ORDER = -0.5
SERIES_MAX = 8.0
_SERIES_TERMS = 48


def _check_order(nu: float) -> float:
    nu = float(nu)
    if not math.isfinite(nu) or nu < MIN_ORDER - 1e-15:
        raise DomainError(f"Bessel order must be >= -1/2, got {nu}")
    return max(nu, MIN_ORDER)


def asymptotic_threshold(nu: float) -> float:
    return max(40.0, 1.2 * nu * nu)


def _series(nu: float, x: np.ndarray) -> np.ndarray:
    h = 0.5 * x
    h2 = h * h
    with np.errstate(divide="ignore", invalid="ignore"):
        lead = np.power(h, nu) / math.gamma(nu + 1.0)
    term = np.ones_like(x)
    total = np.ones_like(x)
    for k in range(1, _SERIES_TERMS):
        term = term * (-h2 / (k * (k + nu)))
        total = total + term
    return lead * total


@lru_cache(maxsize=64)
def _gauss_legendre(n: int):
    return np.polynomial.legendre.leggauss(n)


def _integral(nu: float, x: np.ndarray) -> np.ndarray:
    xmax = float(x.max())
    if float(nu).is_integer():
        n = int(nu)
        m = int(math.ceil(0.5 * (xmax + n))) + 24
        tau = np.linspace(0.0, math.pi, m + 1)
        w = np.full(m + 1, 1.0 / m)
        w[0] = w[-1] = 0.5 / m
        vals = np.cos(n * tau[None, :] - x[:, None] * np.sin(tau)[None, :])
        return vals @ w
    n1 = int(math.ceil(0.8 * (xmax + nu))) + 24
    s, w = _gauss_legendre(n1)
    tau = 0.5 * math.pi * (s + 1.0)
    vals = np.cos(nu * tau[None, :] - x[:, None] * np.sin(tau)[None, :])
    first = 0.5 * (vals @ w)
    # second Schlaefli term, integrand below 1e-17 beyond x*sinh(t) = 40
    s2, w2 = _gauss_legendre(64)
    upper = np.arcsinh(40.0 / x) + 0.5
    t = 0.5 * upper[:, None] * (s2[None, :] + 1.0)
    tail = np.exp(-x[:, None] * np.sinh(t) - nu * t) @ w2 * 0.5 * upper
    return first - math.sin(nu * math.pi) / math.pi * tail


def _asymptotic(nu: float, x: np.ndarray) -> np.ndarray:
    mu = 4.0 * nu * nu
    inv = 1.0 / (8.0 * x)
    p = np.ones_like(x)
    q = np.zeros_like(x)
    term = np.ones_like(x)
    last = np.full_like(x, np.inf)
    active = np.ones(x.shape, dtype=bool)
    for k in range(1, 200):
        term = term * (mu - (2 * k - 1) ** 2) * inv / k
        size = np.abs(term)
        active &= size < last
        if not active.any():
            break
        contrib = np.where(active, term, 0.0)
        # k odd -> Q gets (-1)^((k-1)/2); k even -> P gets (-1)^(k/2)
        if k % 2:
            q = q + (1 if (k // 2) % 2 == 0 else -1) * contrib
        else:
            p = p + (1 if (k // 2) % 2 == 0 else -1) * contrib
        last = np.where(active, size, last)
        active &= size > 1e-17
        if not active.any():
            break
    omega = x - (0.5 * nu + 0.25) * math.pi
    return np.sqrt(2.0 / (math.pi * x)) * (p * np.cos(omega) - q * np.sin(omega))


def bessel_j(nu: float, x):
    """J_nu(x) for ``nu >= -1/2`` and ``x >= 0``.

    ``x = 0`` returns the limiting value (1 for nu = 0, 0 for nu > 0,
    +inf for negative order).
    """
    nu = _check_order(nu)
    xa = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(xa)):
        raise DomainError("Bessel argument must be finite")
    if np.any(xa < 0):
        raise DomainError("Bessel argument must be nonnegative")
    flat = xa.ravel()
    out = np.empty_like(flat)
    zero = flat == 0.0
    small = (flat <= SERIES_MAX) & ~zero
    big = flat > asymptotic_threshold(nu)
    mid = ~(zero | small | big)
    if zero.any():
        out[zero] = 1.0 if nu == 0 else (0.0 if nu > 0 else np.inf)
    if small.any():
        out[small] = _series(nu, flat[small])
    if mid.any():
        out[mid] = _integral(nu, flat[mid])
    if big.any():
        out[big] = _asymptotic(nu, flat[big])
    out = out.reshape(xa.shape)
    return float(out) if out.ndim == 0 else out


def bessel_j_prime(nu: float, x):
    """Derivative of J_nu; uses J_nu' = (nu/x) J_nu - J_{nu+1}."""
    x = np.asarray(x, dtype=float)
    return nu / x * bessel_j(nu, x) - bessel_j(nu + 1.0, x)


def _first_zero_lower_bound(nu: float) -> float:
    if nu <= 0:
        return 0.5
    return max(0.5, math.sqrt(nu * (nu + 2.0)))


@lru_cache(maxsize=128)
def _zeros_cached(nu: float, count: int) -> np.ndarray:
    lo = _first_zero_lower_bound(nu)
    # zeros are spaced more than 2.5 apart for nu >= -1/2
    step = 0.5
    hi = (count + 0.5 * nu + 1.5) * math.pi + 5.0
    found = np.empty(0)
    while found.size < count:
        grid = np.arange(lo, hi + step, step)
        vals = bessel_j(nu, grid)
        sign_change = np.nonzero(np.signbit(vals[:-1]) != np.signbit(vals[1:]))[0]
        a = grid[sign_change]
        b = grid[sign_change + 1]
        fa = vals[sign_change]
        for _ in range(60):
            mid = 0.5 * (a + b)
            fm = bessel_j(nu, mid)
            left = np.signbit(fm) != np.signbit(fa)
            b = np.where(left, mid, b)
            a = np.where(left, a, mid)
            fa = np.where(left, fa, fm)
            if np.all(b - a <= 4e-16 * b):
                break
        z = 0.5 * (a + b)
        # Newton polish kept inside the bracket
        for _ in range(2):
            step_n = bessel_j(nu, z) / bessel_j_prime(nu, z)
            cand = z - step_n
            z = np.where((cand >= a) & (cand <= b), cand, z)
        found = z
        hi *= 1.5
    out = found[:count].copy()
    out.setflags(write=False)
    return out


def bessel_zeros(nu: float, count: int) -> np.ndarray:
    """First ``count`` positive zeros of J_nu in ascending order."""
    nu = _check_order(nu)
    if int(count) != count or count < 1:
        raise ArgumentError(f"count must be a positive integer, got {count}")
    return _zeros_cached(nu, int(count))


def bessel_zeros_upto(nu: float, xmax: float) -> np.ndarray:
    """All positive zeros of J_nu not exceeding ``xmax``."""
    nu = _check_order(nu)
    if xmax <= 0:
        return np.empty(0)
    need = int(xmax / math.pi + 0.5 * abs(nu) + 3)
    # bucket the request so nearby calls share the cache
    bucket = 1 << max(4, (need - 1).bit_length())
    z = _zeros_cached(nu, bucket)
    while z[-1] < xmax:
        bucket *= 2
        z = _zeros_cached(nu, bucket)
    return z[z <= xmax]
