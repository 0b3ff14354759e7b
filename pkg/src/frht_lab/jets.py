"""Truncated Taylor series ("jets") for forward-mode exact differentiation.

A :class:`Jet` holds the Taylor coefficients ``c[k] = f^(k)(x0) / k!`` of a
function around one or many expansion points at once.  Coefficient arrays
have shape ``(order + 1, *points_shape)`` so a whole grid is differentiated
in one pass.

The elementary functions below (:func:`exp`, :func:`log`, :func:`power`,
:func:`sqrt`, :func:`smooth_step`) accept either plain numpy arrays or jets,
which lets one closed-form expression serve both fast evaluation and exact
derivatives.
"""

from __future__ import annotations

import math

import numpy as np


class Jet:
    """Taylor coefficients of a function around a set of expansion points."""

    __array_priority__ = 1000

    def __init__(self, coeffs):
        self.c = np.asarray(coeffs)
        if self.c.ndim == 0:
            raise ValueError("a jet needs at least one coefficient axis")

    @classmethod
    def variable(cls, x0, order: int) -> "Jet":
        """The identity map ``x -> x`` expanded around ``x0``."""
        x0 = np.asarray(x0, dtype=float)
        c = np.zeros((order + 1,) + x0.shape)
        c[0] = x0
        if order >= 1:
            c[1] = 1.0
        return cls(c)

    @classmethod
    def constant(cls, value, order: int, shape=()) -> "Jet":
        value = np.asarray(value)
        c = np.zeros((order + 1,) + np.broadcast_shapes(shape, value.shape), dtype=value.dtype if np.iscomplexobj(value) else float)
        c[0] = value
        return cls(c)

    @property
    def order(self) -> int:
        return self.c.shape[0] - 1

    @property
    def value(self):
        return self.c[0]

    def derivative(self, k: int):
        """k-th derivative at the expansion points."""
        return math.factorial(k) * self.c[k]

    def derivatives(self):
        """All derivatives ``f, f', ..., f^(order)`` stacked on axis 0."""
        fact = np.array([math.factorial(k) for k in range(self.order + 1)], dtype=float)
        return self.c * fact.reshape((-1,) + (1,) * (self.c.ndim - 1))

    def _coerce(self, other) -> "Jet":
        if isinstance(other, Jet):
            return other
        other = np.asarray(other)
        c = np.zeros((self.order + 1,) + np.broadcast_shapes(self.c.shape[1:], other.shape),
                     dtype=np.result_type(self.c, other))
        c[0] = other
        return Jet(c)

    def __add__(self, other):
        if not isinstance(other, Jet):
            c = self.c.astype(np.result_type(self.c, np.asarray(other)), copy=True)
            c[0] = c[0] + other
            return Jet(c)
        return Jet(self.c + other.c)

    __radd__ = __add__

    def __neg__(self):
        return Jet(-self.c)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Jet):
            return Jet(self.c * np.asarray(other))
        a, b = self.c, other.c
        n = min(a.shape[0], b.shape[0])
        out = np.zeros((n,) + np.broadcast_shapes(a.shape[1:], b.shape[1:]), dtype=np.result_type(a, b))
        for k in range(n):
            acc = a[0] * b[k]
            for i in range(1, k + 1):
                acc = acc + a[i] * b[k - i]
            out[k] = acc
        return Jet(out)

    __rmul__ = __mul__

    def reciprocal(self) -> "Jet":
        a = self.c
        out = np.zeros_like(a, dtype=np.result_type(a, float))
        out[0] = 1.0 / a[0]
        for k in range(1, a.shape[0]):
            acc = a[1] * out[k - 1]
            for i in range(2, k + 1):
                acc = acc + a[i] * out[k - i]
            out[k] = -acc * out[0]
        return Jet(out)

    def __truediv__(self, other):
        if not isinstance(other, Jet):
            return Jet(self.c / np.asarray(other))
        return self * other.reciprocal()

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def __pow__(self, p):
        return power(self, p)


def _is_jet(x) -> bool:
    return isinstance(x, Jet)


def exp(x):
    if not _is_jet(x):
        return np.exp(x)
    a = x.c
    out = np.zeros_like(a, dtype=np.result_type(a, float))
    out[0] = np.exp(a[0])
    for k in range(1, a.shape[0]):
        acc = a[1] * out[k - 1]
        for j in range(2, k + 1):
            acc = acc + j * a[j] * out[k - j]
        out[k] = acc / k
    return Jet(out)


def log(x):
    if not _is_jet(x):
        return np.log(x)
    a = x.c
    out = np.zeros_like(a, dtype=np.result_type(a, float))
    out[0] = np.log(a[0])
    for k in range(1, a.shape[0]):
        acc = k * a[k]
        for j in range(1, k):
            acc = acc - j * out[j] * a[k - j]
        out[k] = acc / (k * a[0])
    return Jet(out)


def power(x, p: float):
    """``x ** p`` for real ``p``; expansion points must be positive unless p is a nonnegative integer."""
    if not _is_jet(x):
        return np.power(x, p)
    if float(p).is_integer() and p >= 0:
        result = Jet.constant(1.0, x.order, x.c.shape[1:])
        base = x
        n = int(p)
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result
    a = x.c
    out = np.zeros_like(a, dtype=np.result_type(a, float))
    out[0] = np.power(a[0], p)
    for k in range(1, a.shape[0]):
        acc = (p - (k - 1)) * a[1] * out[k - 1]
        for j in range(2, k + 1):
            acc = acc + (p * j - (k - j)) * a[j] * out[k - j]
        out[k] = acc / (k * a[0])
    return Jet(out)


def sqrt(x):
    return power(x, 0.5) if _is_jet(x) else np.sqrt(x)


def where(mask, a, b):
    """Elementwise select between two jets (or arrays) by a mask on the expansion points."""
    if not (_is_jet(a) or _is_jet(b)):
        return np.where(mask, a, b)
    order = a.order if _is_jet(a) else b.order
    shape = np.shape(mask)
    a = a if _is_jet(a) else Jet.constant(a, order, shape)
    b = b if _is_jet(b) else Jet.constant(b, order, shape)
    return Jet(np.where(mask, a.c, b.c))


def value_of(x):
    return x.c[0] if _is_jet(x) else np.asarray(x)


def _bump_edge(u):
    """``exp(-1/u)`` for ``u > 0`` and exactly 0 (with all derivatives) otherwise."""
    u0 = value_of(u)
    pos = u0 > 0
    safe = where(pos, u, 1.0)
    return where(pos, exp(-1.0 / safe), 0.0)


def smooth_step(x, lo: float, hi: float):
    """C-infinity transition equal to 1 for ``x <= lo`` and 0 for ``x >= hi``."""
    x0 = value_of(x)
    inner = (x0 > lo) & (x0 < hi)
    w = (hi - lo)
    # clamp to the open interval so both edge terms are positive
    mid = lo + 0.5 * w
    xs = where(inner, x, mid)
    left = _bump_edge((hi - xs) / w)
    right = _bump_edge((xs - lo) / w)
    step = left / (left + right)
    return where(x0 <= lo, 1.0, where(x0 >= hi, 0.0, step))
