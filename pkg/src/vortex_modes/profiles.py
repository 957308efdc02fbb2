"""Base and plateau vortex profiles, their angular velocity and closed forms.

The base vortex is ``w0(r) = 1/(1 + r^2)``.  The perturbed profile ``w_eps``
is flattened on the annulus ``(1 - eps/2, 1 + eps/2)`` and shifted by a
constant inside it so that it stays continuous.  Everything the solver needs
about the profile (values, derivative, enclosed mass, the angular velocity
``c`` and its rescaled left/right versions) is evaluated in closed form here.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import BracketError, DomainError

LAMBDA0 = 0.5 * np.log(2.0)
EPS0_DEFAULT = 0.15

# below this argument log1p(u)/u and its derivative switch to Taylor series
_SERIES_SWITCH = 1e-6


def base(r):
    """w0(r) = 1/(1 + r^2)."""
    r = np.asarray(r, dtype=float)
    return 1.0 / (1.0 + r * r)


def base_derivative(r):
    """w0'(r) = -2r/(1 + r^2)^2."""
    r = np.asarray(r, dtype=float)
    return -2.0 * r / (1.0 + r * r) ** 2


def _log1p_ratio(u):
    """log(1+u)/u, continuous at u = 0."""
    u = np.asarray(u, dtype=float)
    small = np.abs(u) < _SERIES_SWITCH
    safe = np.where(small, 1.0, u)
    series = 1.0 - u / 2.0 + u * u / 3.0 - u ** 3 / 4.0
    return np.where(small, series, np.log1p(safe) / safe)


def _log1p_ratio_prime(u):
    """d/du [log(1+u)/u]."""
    u = np.asarray(u, dtype=float)
    small = np.abs(u) < 1e-3
    safe = np.where(small, 1.0, u)
    direct = (safe / (1.0 + safe) - np.log1p(safe)) / safe ** 2
    series = -0.5 + 2.0 * u / 3.0 - 0.75 * u * u + 0.8 * u ** 3 - 5.0 * u ** 4 / 6.0 + 6.0 * u ** 5 / 7.0
    return np.where(small, series, direct)


def _check_radius(r):
    r = np.asarray(r, dtype=float)
    if np.any(r < 0) or np.any(~np.isfinite(r)):
        raise DomainError("radius must be finite and non-negative")
    return r


def plateau_constant(epsilon):
    """16 eps / (64 + eps^4), equal to (w0(1-eps/2) - w0(1+eps/2)) / 2."""
    return 16.0 * epsilon / (64.0 + epsilon ** 4)


def outer_mass_constant(epsilon):
    """K with int_0^r s w_eps = log(1+r^2)/2 + K for r >= 1 + eps/2."""
    a2 = (1.0 - 0.5 * epsilon) ** 2
    b2 = (1.0 + 0.5 * epsilon) ** 2
    return plateau_constant(epsilon) + 0.5 * np.log((1.0 + a2) / (1.0 + b2))


@dataclass(frozen=True)
class VortexProfile:
    """The pair (w0, w_eps) for a given plateau width ``epsilon``."""

    epsilon: float = 0.0

    def __post_init__(self):
        if not np.isfinite(self.epsilon) or self.epsilon < 0 or self.epsilon >= 2:
            raise DomainError(f"epsilon must lie in [0, 2), got {self.epsilon}")

    @property
    def inner(self):
        return 1.0 - 0.5 * self.epsilon

    @property
    def outer(self):
        return 1.0 + 0.5 * self.epsilon

    @property
    def shift(self):
        """w0(1+eps/2) - w0(1-eps/2), the (negative) offset inside the plateau."""
        return float(base(self.outer) - base(self.inner))

    def base(self, r):
        return base(_check_radius(r))

    def value(self, r):
        r = _check_radius(r)
        a, b = self.inner, self.outer
        w = base(r)
        return np.where(r <= a, w + self.shift, np.where(r < b, base(b), w))

    def derivative(self, r):
        """w_eps'(r); zero on the open plateau."""
        r = _check_radius(r)
        on_plateau = (r > self.inner) & (r < self.outer)
        return np.where(on_plateau, 0.0, base_derivative(r))

    def eval(self, r, which="perturbed"):
        if which == "base":
            return self.base(r)
        if which == "perturbed":
            return self.value(r)
        if which == "derivative":
            return self.derivative(r)
        raise DomainError(f"unknown profile quantity {which!r}")

    def partial_mass(self, r):
        """int_0^r s w_eps(s) ds by the three-branch closed form."""
        r = _check_radius(r)
        a, b = self.inner, self.outer
        m_inner = 0.5 * np.log1p(a * a) + 0.5 * a * a * self.shift
        m_outer = m_inner + 0.5 * (b * b - a * a) * float(base(b))
        left = 0.5 * np.log1p(r * r) + 0.5 * r * r * self.shift
        mid = m_inner + 0.5 * (r * r - a * a) * float(base(b))
        right = m_outer + 0.5 * (np.log1p(r * r) - np.log1p(b * b))
        return np.where(r <= a, left, np.where(r < b, mid, right))

    def c(self, r):
        """Angular velocity term c(r) = -(1/r^2) int_0^r s w_eps(s) ds.

        At r = 0 the continuous extension -w_eps(0)/2 is returned.
        """
        r = _check_radius(r)
        small = r < 1e-3
        safe = np.where(small, 1.0, r)
        direct = -self.partial_mass(safe) / safe ** 2
        # r <= 1e-3 is always on the inner branch
        series = -0.5 * _log1p_ratio(r * r) - 0.5 * self.shift
        return np.where(small, series, direct)


def eval_profile(profile: VortexProfile, r, which="perturbed"):
    return profile.eval(r, which)


def partial_mass(profile: VortexProfile, r):
    return profile.partial_mass(r)


@dataclass(frozen=True)
class SideCoefficient:
    """Rescaled angular velocity on one side of the plateau.

    ``c_L(x, eps) = c(x (1 - eps/2))`` on ``[0, 1]`` and
    ``c_R(x, eps) = c(x (1 + eps/2))`` on ``[1, inf)``.  The closed forms are
    analytic in x, so they are also evaluated beyond the natural domain when
    asked (this is how the exterior zeros x*_L, x*_R are located).
    """

    side: str
    epsilon: float = 0.0

    def __post_init__(self):
        if self.side not in ("left", "right"):
            raise DomainError(f"side must be 'left' or 'right', got {self.side!r}")
        VortexProfile(self.epsilon)

    @property
    def scale(self):
        e = self.epsilon
        return 1.0 - 0.5 * e if self.side == "left" else 1.0 + 0.5 * e

    @property
    def lambda0(self):
        return LAMBDA0

    def _x(self, x):
        x = np.asarray(x, dtype=float)
        if np.any(~np.isfinite(x)) or np.any(x < 0):
            raise DomainError("x must be finite and non-negative")
        if self.side == "right" and np.any(x == 0):
            raise DomainError("c_R is singular at x = 0")
        return x

    def value(self, x):
        x = self._x(x)
        return _closed_form(self.side, x, self.epsilon)

    def d_x(self, x):
        x = self._x(x)
        s = self.scale
        out = -_log1p_ratio_prime(s * s * x * x) * s * s * x
        if self.side == "right":
            out = out + 2.0 * outer_mass_constant(self.epsilon) / (s * s * x ** 3)
        return out

    def d_eps(self, x):
        """d/d eps of the closed form, evaluated at eps = 0."""
        x = self._x(x)
        x2 = x * x
        if self.side == "left":
            return 0.25 + 0.5 / (1.0 + x2) - 0.5 * _log1p_ratio(x2)
        return (-0.25 + 0.5 / (1.0 + x2)) / x2 + 0.5 * _log1p_ratio(x2)

    def d2_eps(self, x, step=1e-4):
        """Second eps-derivative at the current eps by central differences.

        Only offered on the strips where it is known to be bounded:
        ``[0, 7/4]`` for the left side and ``[1/4, inf)`` for the right.
        """
        x = self._x(x)
        if self.side == "left" and np.any(x > 1.75):
            raise DomainError("d2_eps for c_L is only available on [0, 7/4]")
        if self.side == "right" and np.any(x < 0.25):
            raise DomainError("d2_eps for c_R is only available on [1/4, inf)")
        e = self.epsilon
        up = _closed_form(self.side, x, e + step)
        mid = _closed_form(self.side, x, e)
        down = _closed_form(self.side, x, e - step)
        return (up - 2.0 * mid + down) / step ** 2


def _closed_form(side, x, epsilon):
    # usable at slightly negative eps, which the central difference at eps = 0 needs
    s = 1.0 - 0.5 * epsilon if side == "left" else 1.0 + 0.5 * epsilon
    core = -0.5 * _log1p_ratio(s * s * x * x)
    if side == "left":
        return core + plateau_constant(epsilon)
    return core - outer_mass_constant(epsilon) / (s * s * x * x)


def eval_c(side_or_physical, point, order="value", epsilon=None):
    """Dispatch over the physical c(r) and the rescaled side coefficients.

    ``side_or_physical`` is a ``SideCoefficient``, a ``VortexProfile`` (the
    physical c(r) is returned) or the strings ``'left'``/``'right'`` together
    with ``epsilon``.
    """
    if isinstance(side_or_physical, str):
        side_or_physical = SideCoefficient(side_or_physical, 0.0 if epsilon is None else epsilon)
    if isinstance(side_or_physical, VortexProfile):
        if order != "value":
            raise DomainError("only order='value' is defined for the physical c(r)")
        return side_or_physical.c(point)
    coef = side_or_physical
    if order == "value":
        return coef.value(point)
    if order == "d_x":
        return coef.d_x(point)
    if order == "d_eps":
        return coef.d_eps(point)
    if order == "d2_eps":
        return coef.d2_eps(point)
    raise DomainError(f"unknown order {order!r}")


def lambda_bracket(epsilon, eps0=EPS0_DEFAULT):
    """Open interval of rotation speeds keeping both denominators sign-definite."""
    if epsilon < 0 or epsilon > eps0:
        raise DomainError(f"epsilon must lie in (0, {eps0}], got {epsilon}")
    if epsilon == 0:
        raise BracketError("the bracket is empty at eps = 0: it collapses to the point log(2)/2")
    lo = -float(SideCoefficient("right", epsilon).value(1.0))
    hi = -float(SideCoefficient("left", epsilon).value(1.0))
    return lo, hi


def exterior_zero(side, lam, epsilon):
    """Zero of the extended denominator lam + c_side(x, eps) nearest to x = 1.

    For the right coefficient the zero x*_R lies in (0, 1); for the left one
    x*_L lies in (1, inf).  The extension of c_R also turns positive again near
    the origin (its mass constant is negative), so the scan walks away from
    x = 1 and stops at the first sign change.  Returns None if there is none.
    """
    from scipy.optimize import brentq

    coef = SideCoefficient(side, epsilon)
    g = lambda x: lam + float(coef.value(x))
    steps = 1.0 - np.geomspace(1e-6, 0.999, 200) if side == "right" else 1.0 + np.geomspace(1e-6, 1e3, 200)
    prev_x, prev_g = 1.0, g(1.0)
    for x in steps:
        gx = g(x)
        if prev_g * gx <= 0:
            lo, hi = sorted((prev_x, x))
            return brentq(g, lo, hi, xtol=1e-14, rtol=1e-14)
        prev_x, prev_g = x, gx
    return None


def derivative_sup_norm():
    """sup |w0'| by golden-section search; the maximiser is r = 1/sqrt(3)."""
    res = minimize_scalar(lambda r: float(base_derivative(r)), bracket=(0.0, 0.5, 2.0),
                          method="golden", options={"xtol": 1e-12})
    return -float(res.fun), float(res.x)


@dataclass(frozen=True)
class HolderReport:
    epsilon: float
    alpha: float
    sup_norm: float
    seminorm: float
    derivative_sup: float

    @property
    def norm(self):
        """Full C^alpha norm: sup norm plus Holder seminorm."""
        return self.sup_norm + self.seminorm

    @property
    def bound(self):
        return self.derivative_sup * self.epsilon ** (1.0 - self.alpha)


def holder_grid(epsilon, resolution=400, grading=3.0):
    """Radii clustered toward both plateau edges, plus the flat parts outside.

    ``grading`` is the exponent of the power-law clustering; larger values put
    more points next to ``1 - eps/2`` and ``1 + eps/2``.
    """
    a, b = 1.0 - 0.5 * epsilon, 1.0 + 0.5 * epsilon
    half = max(resolution // 2, 2)
    u = np.linspace(0.0, 1.0, half) ** grading
    mid = 0.5 * (a + b)
    plateau = np.concatenate([a + (mid - a) * u, b - (b - mid) * u[::-1]])
    outside = np.array([0.0, 0.5 * a, a - 1e-3 * epsilon, b + 1e-3 * epsilon, 2.0 * b, 4.0])
    return np.unique(np.concatenate([plateau, outside]))


def holder_distance(epsilon, alpha, grid_resolution=400, grading=3.0):
    """Estimate ||w0 - w_eps||_{C^alpha} on a graded grid.

    The difference is constant left of the plateau, zero right of it and
    smooth in between, so the supremum in the seminorm is attained with both
    points in the closed plateau; the grid is dense there.
    """
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}")
    if epsilon <= 0:
        raise DomainError("holder_distance needs epsilon > 0")
    prof = VortexProfile(epsilon)
    r = holder_grid(epsilon, grid_resolution, grading)
    d = prof.base(r) - prof.value(r)
    dd = np.abs(d[:, None] - d[None, :])
    dr = np.abs(r[:, None] - r[None, :])
    np.fill_diagonal(dr, 1.0)
    semi = float(np.max(dd / dr ** alpha))
    sup = float(np.max(np.abs(d)))
    return HolderReport(epsilon, alpha, sup, semi, derivative_sup_norm()[0])
