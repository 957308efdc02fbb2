"""Truncated power series with an optional ``log|t|`` part.

A ``SeriesAtPoint`` represents

    sum_k p_k t^(k_min+k)  +  log|t| * sum_k q_k t^(k_min+k),   t = x - center,

truncated at a common top order.  This is exactly the shape of a Frobenius
solution whose indicial roots differ by an integer.  The plain-array helpers
at the bottom (``mul``, ``reciprocal``, ``log_series`` ...) work on ordinary
Taylor coefficient arrays and are what the recursions are built from.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..errors import DomainError


def mul(a, b, order=None):
    """Cauchy product of two coefficient arrays, truncated to ``order`` terms."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    n = min(a.size, b.size) if order is None else order
    return np.convolve(a, b)[:n] if a.size and b.size else np.zeros(n)


def reciprocal(a, order=None):
    """Coefficients of 1/a(t); needs a[0] != 0."""
    a = np.asarray(a, dtype=float)
    n = a.size if order is None else order
    if a[0] == 0:
        raise DomainError("reciprocal of a series with vanishing constant term")
    out = np.zeros(n)
    out[0] = 1.0 / a[0]
    for k in range(1, n):
        m = min(k, a.size - 1)
        out[k] = -np.dot(a[1:m + 1], out[k - 1::-1][:m]) / a[0]
    return out


def divide(a, b, order=None):
    n = min(len(a), len(b)) if order is None else order
    return mul(a, reciprocal(b, n), n)


def derivative(a):
    a = np.asarray(a, dtype=float)
    return a[1:] * np.arange(1, a.size)


def antiderivative(a, constant=0.0):
    a = np.asarray(a, dtype=float)
    return np.concatenate([[constant], a / np.arange(1, a.size + 1)])


def log_series(a, order=None):
    """Coefficients of log(a(t)) for a[0] > 0."""
    a = np.asarray(a, dtype=float)
    n = a.size if order is None else order
    if a[0] <= 0:
        raise DomainError("log of a series needs a positive constant term")
    a = np.pad(a, (0, max(0, n - a.size)))[:n]
    d = divide(derivative(a), a[:n - 1], n - 1)
    return antiderivative(d, np.log(a[0]))[:n]


def poly(coeffs, order):
    """Pad or cut a finite coefficient list to ``order`` terms."""
    c = np.zeros(order)
    c[:min(order, len(coeffs))] = np.asarray(coeffs, dtype=float)[:order]
    return c


def shift(a, m):
    """Coefficients of a(t)/t^m, assuming the first m coefficients vanish."""
    return np.asarray(a, dtype=float)[m:]


def horner(a, t):
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    for c in np.asarray(a, dtype=float)[::-1]:
        out = out * t + c
    return out


@dataclass(frozen=True)
class SeriesAtPoint:
    center: float
    powers: np.ndarray
    logs: Optional[np.ndarray] = None
    k_min: int = 0
    radius: float = np.inf
    exact: bool = False  # a finite polynomial: no truncation error

    def __post_init__(self):
        object.__setattr__(self, "powers", np.asarray(self.powers, dtype=float))
        if self.logs is not None:
            logs = np.asarray(self.logs, dtype=float)
            if logs.size != self.powers.size:
                raise ValueError("power and log parts must have the same length")
            object.__setattr__(self, "logs", logs)

    @property
    def order(self):
        """Highest exponent kept."""
        return self.k_min + self.powers.size - 1

    @property
    def has_log(self):
        return self.logs is not None and bool(np.any(self.logs != 0))

    def eval(self, x, check_radius=True):
        x = np.asarray(x, dtype=float)
        t = x - self.center
        if check_radius and np.any(np.abs(t) > self.radius * (1 + 1e-12)):
            raise DomainError(f"evaluation outside the series radius {self.radius}")
        with np.errstate(divide="ignore", invalid="ignore"):
            lead = np.power(t, float(self.k_min)) if self.k_min else np.ones_like(t)
            out = lead * horner(self.powers, t)
            if self.logs is not None:
                tl = np.where(t == 0, 0.0, t)
                logpart = lead * horner(self.logs, t) * np.log(np.abs(np.where(t == 0, 1.0, tl)))
                out = out + np.where(t == 0, 0.0, logpart)
        return out

    __call__ = eval

    def derivative(self):
        k = self.k_min + np.arange(self.powers.size)
        p = self.powers * k
        logs = None
        if self.logs is not None:
            # d/dt [t^k log|t|] = k t^(k-1) log|t| + t^(k-1)
            p = p + self.logs
            logs = self.logs * k
        return SeriesAtPoint(self.center, p, logs, self.k_min - 1, self.radius, self.exact)

    def _known_order(self):
        return np.inf if self.exact else self.order

    def _aligned(self, other):
        lo = min(self.k_min, other.k_min)
        hi = min(self._known_order(), other._known_order())
        if hi == np.inf:
            hi = max(self.order, other.order)
        n = int(hi) - lo + 1

        def pad(s, arr):
            out = np.zeros(n)
            if arr is None:
                return out
            off = s.k_min - lo
            m = max(0, min(arr.size, n - off))
            out[off:off + m] = arr[:m]
            return out

        return lo, n, pad

    def __add__(self, other):
        if np.isscalar(other):
            other = SeriesAtPoint(self.center, [float(other)], None, 0, np.inf, exact=True)
        self._check(other)
        lo, n, pad = self._aligned(other)
        p = pad(self, self.powers) + pad(other, other.powers)
        logs = None
        if self.logs is not None or other.logs is not None:
            logs = pad(self, self.logs) + pad(other, other.logs)
        return SeriesAtPoint(self.center, p, logs, lo, min(self.radius, other.radius),
                             self.exact and other.exact)

    __radd__ = __add__

    def __neg__(self):
        return SeriesAtPoint(self.center, -self.powers,
                             None if self.logs is None else -self.logs, self.k_min, self.radius,
                             self.exact)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def _check(self, other):
        if not np.isclose(self.center, other.center, rtol=0, atol=1e-15):
            raise DomainError("series centred at different points")

    def __mul__(self, other):
        if np.isscalar(other):
            return SeriesAtPoint(self.center, self.powers * other,
                                 None if self.logs is None else self.logs * other,
                                 self.k_min, self.radius, self.exact)
        self._check(other)
        if self.has_log and other.has_log:
            raise DomainError("product of two log series needs a log^2 part")
        # a truncated product is only correct up to the lower relative order
        if self.exact and other.exact:
            n = self.powers.size + other.powers.size - 1
        elif self.exact or other.exact:
            n = other.powers.size if self.exact else self.powers.size
        else:
            n = min(self.powers.size, other.powers.size)
        p = np.pad(np.convolve(self.powers, other.powers), (0, n))[:n]
        logs = None
        if self.has_log:
            logs = np.pad(np.convolve(self.logs, other.powers), (0, n))[:n]
        elif other.has_log:
            logs = np.pad(np.convolve(self.powers, other.logs), (0, n))[:n]
        return SeriesAtPoint(self.center, p, logs, self.k_min + other.k_min,
                             min(self.radius, other.radius), self.exact and other.exact)

    __rmul__ = __mul__

    def reciprocal(self, order=None):
        """1/s; ``order`` sets the number of terms (needed when s is exact)."""
        if self.has_log:
            raise DomainError("reciprocal of a log series is not supported")
        nz = np.flatnonzero(self.powers)
        if nz.size == 0:
            raise DomainError("reciprocal of the zero series")
        first = int(nz[0])
        size = self.powers.size - first if order is None else order
        if self.exact and order is None:
            raise DomainError("the reciprocal of a polynomial needs an explicit order")
        rec = reciprocal(self.powers[first:], size)
        return SeriesAtPoint(self.center, rec, None, -(self.k_min + first), self.radius)

    def __truediv__(self, other):
        if np.isscalar(other):
            return self * (1.0 / other)
        return self * other.reciprocal(max(self.powers.size, other.powers.size)
                                       if other.exact else None)

    def normalized(self):
        """Drop leading zero coefficients into ``k_min``."""
        nz = np.flatnonzero(self.powers if self.logs is None else (self.powers != 0) | (self.logs != 0))
        if nz.size == 0:
            return self
        f = int(nz[0])
        return SeriesAtPoint(self.center, self.powers[f:],
                             None if self.logs is None else self.logs[f:], self.k_min + f,
                             self.radius, self.exact)


def series_eval(s: SeriesAtPoint, x):
    return s.eval(x)


def series_add(a: SeriesAtPoint, b):
    return a + b


def series_multiply(a: SeriesAtPoint, b):
    return a * b
