"""Azimuthal interaction kernels K_n and the identities behind them."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, QuadratureError
from .numerics import QuadratureSpec, adaptive_quad, semiinfinite_quad
from .profiles import VortexProfile


@dataclass(frozen=True)
class KernelSpec:
    n: int

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise DomainError(f"wavenumber must be an integer >= 1, got {self.n}")


def eval_kernel(spec: KernelSpec, r):
    """K_n(r) = r^(n-1)/2 for r <= 1 and r^(-n-1)/2 for r > 1."""
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0) or np.any(~np.isfinite(r)):
        raise DomainError("kernel argument must be positive and finite")
    n = spec.n
    inside = r <= 1.0
    safe = np.where(inside, r, 1.0)
    out_in = 0.5 * safe ** (n - 1)
    safe = np.where(inside, 1.0, r)
    out_out = 0.5 * safe ** (-n - 1)
    return np.where(inside, out_in, out_out)


def kernel_trig_oracle(spec: KernelSpec, r, tol=1e-12):
    """(1/2pi) int_{-pi}^{pi} sin(b) sin(n b) / (1 + r^2 - 2 r cos b) db.

    The integrand is even and, for r close to 1, a Lorentzian of width |1-r|
    around b = 0, so the half interval [0, pi] is graded toward 0.
    """
    r = float(r)
    if r <= 0 or r == 1.0:
        raise DomainError("the trigonometric representation needs r > 0, r != 1")
    n = spec.n

    def f(b):
        return np.sin(b) * np.sin(n * b) / (1.0 + r * r - 2.0 * r * np.cos(b))

    levels = int(np.clip(np.ceil(-np.log2(abs(1.0 - r))), 1, 60))
    spec_q = QuadratureSpec(rel_tol=tol, abs_tol=tol * 1e-3, grading_center=0.0,
                            grading_levels=levels + 4)
    value, err = adaptive_quad(f, (0.0, np.pi), spec_q)
    return value / np.pi


@dataclass(frozen=True)
class IdentityReport:
    r: float
    epsilon: float
    quadrature: float
    closed_form: float

    @property
    def difference(self):
        return abs(self.quadrature - self.closed_form)


def angular_velocity_identity(profile: VortexProfile, r, tol=1e-9):
    """Compare int_0^inf w_eps'(s) K_1(r/s) ds with -(1/r^2) int_0^r s w_eps.

    Both sides equal c(r) = -u_theta/r.  Raises ``QuadratureError`` when they
    disagree by more than ``tol`` (that would mean a profile or kernel bug).
    """
    r = float(r)
    if r <= 0:
        raise DomainError("angular_velocity_identity needs r > 0")
    k1 = KernelSpec(1)

    def f(s):
        return profile.derivative(s) * eval_kernel(k1, r / s)

    a, b = profile.inner, profile.outer
    qspec = QuadratureSpec(rel_tol=1e-13, abs_tol=1e-15)
    top = max(b, r) * 2.0
    cuts = sorted({0.0, r, top} | ({a, b} if profile.epsilon > 0 else set()))
    cuts = [c for c in cuts if c <= top]
    total = 0.0
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        total += adaptive_quad(f, (lo, hi), qspec)[0]
    total += semiinfinite_quad(f, top, qspec)[0]
    closed = float(profile.c(r))
    report = IdentityReport(r, profile.epsilon, total, closed)
    if report.difference > tol:
        raise QuadratureError(
            f"angular velocity identity violated at r={r}: {total!r} vs {closed!r}")
    return report
