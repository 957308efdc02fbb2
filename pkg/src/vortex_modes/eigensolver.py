"""Matching integrals, the 2x2 determinant condition and the rotation speed.

For a trial rotation speed lam the normalised solutions h_L, h_R give

    I1 = -(a/2n) int_0^1   w0'(a s) s^n  h_L(s) / (lam + c_L(s, eps)) ds,
    I2 = -(b/2n) int_1^inf w0'(b s) s^-n h_R(s) / (lam + c_R(s, eps)) ds,

with a = 1 - eps/2, b = 1 + eps/2 and q = (a/b)^n.  The amplitudes (A, B) of
H_L = A h_L, H_R = B h_R solve

    [[1 + I1, q I2], [q I1, 1 + I2]] (A, B)^T = 0,

so lam is a root of det = 1 + I1 + I2 + (1 - q^2) I1 I2 inside the bracket
(-c_R(1, eps), -c_L(1, eps)).
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional

import numpy as np

from .errors import BracketError, DomainError, NoEigenvalueError
from .numerics import QuadratureSpec, adaptive_quad, brent_root, semiinfinite_quad
from .numerics import series as ser
from .numerics.series import SeriesAtPoint
from .profiles import EPS0_DEFAULT, LAMBDA0, SideCoefficient, base_derivative, lambda_bracket
from .radial_ode import (KAPPA_PRIME, ODE_RTOL, SERIES_RADIUS, OdeProblem, RadialSolution,
                         integrate_radial, singular_basis)

LAMBDA1_WINDOW = (-0.5 * np.log(2.0), -0.5 * (1.0 - np.log(2.0)))
BRACKET_MARGIN = 5e-4
ROOT_TOL = 1e-12
QUAD_REL_TOL = 1e-10
W0P1 = -0.5                                  # w0'(1)


def _grading_levels(epsilon):
    # enough halvings to resolve a layer of width ~eps next to x = 1
    return int(min(60, 14 + np.ceil(np.log2(1.0 / max(epsilon, 1e-16)))))


def q_factor(epsilon, n):
    return ((1.0 - 0.5 * epsilon) / (1.0 + 0.5 * epsilon)) ** n


def compute_I1(h_L: RadialSolution, lam, epsilon, n, derivative: Callable = base_derivative,
               rel_tol=QUAD_REL_TOL):
    a = 1.0 - 0.5 * epsilon
    cl = SideCoefficient("left", epsilon)
    if float(lam + cl.value(1.0)) >= 0:
        raise BracketError("lam + c_L(1, eps) must be negative")

    def f(s):
        return derivative(a * s) * s ** n * h_L.h(s) / (lam + cl.value(s))

    spec = QuadratureSpec(rel_tol=rel_tol, abs_tol=1e-14, grading_center=1.0,
                          grading_levels=_grading_levels(epsilon))
    val, _ = adaptive_quad(f, (0.0, 1.0), spec)
    return -a / (2.0 * n) * val


def compute_I2(h_R: RadialSolution, lam, epsilon, n, derivative: Callable = base_derivative,
               rel_tol=QUAD_REL_TOL, upper: Optional[float] = None):
    """``upper`` truncates the tail at a finite radius (diagnostic)."""
    b = 1.0 + 0.5 * epsilon
    cr = SideCoefficient("right", epsilon)
    if float(lam + cr.value(1.0)) <= 0:
        raise BracketError("lam + c_R(1, eps) must be positive")

    def f(s):
        return derivative(b * s) * s ** (-n) * h_R.h(s) / (lam + cr.value(s))

    spec = QuadratureSpec(rel_tol=rel_tol, abs_tol=1e-14, grading_center=1.0,
                          grading_levels=_grading_levels(epsilon))
    if upper is None:
        val, _ = semiinfinite_quad(f, 1.0, spec)
    else:
        val, _ = adaptive_quad(f, (1.0, upper), spec)
    return -b / (2.0 * n) * val


def determinant_from(I1, I2, epsilon, n):
    q = q_factor(epsilon, n)
    return 1.0 + I1 + I2 + (1.0 - q * q) * I1 * I2


@dataclass
class DeterminantEval:
    lam: float
    epsilon: float
    n: int
    I1: float
    I2: float
    h_L: RadialSolution = field(repr=False)
    h_R: RadialSolution = field(repr=False)

    @property
    def value(self):
        return determinant_from(self.I1, self.I2, self.epsilon, self.n)


def evaluate_determinant(lam, epsilon, n, check_handoff=False, ode_rtol=ODE_RTOL,
                         quad_rtol=QUAD_REL_TOL) -> DeterminantEval:
    h_L = integrate_radial(OdeProblem("left", n, epsilon, lam), check_handoff=check_handoff,
                           rtol=ode_rtol)
    h_R = integrate_radial(OdeProblem("right", n, epsilon, lam), check_handoff=check_handoff,
                           rtol=ode_rtol)
    return DeterminantEval(lam, epsilon, n, compute_I1(h_L, lam, epsilon, n, rel_tol=quad_rtol),
                           compute_I2(h_R, lam, epsilon, n, rel_tol=quad_rtol), h_L, h_R)


def determinant(lam, epsilon, n, **tolerances):
    return evaluate_determinant(lam, epsilon, n, **tolerances).value


def normalize_amplitudes(A, B):
    """Scale (A, B) to max(|A|, |B|) = 1 with the larger entry positive."""
    m = max(abs(A), abs(B))
    if m == 0:
        raise DomainError("the zero vector cannot be normalised")
    big = A if abs(A) >= abs(B) else B
    s = np.sign(big) / m
    return float(A * s), float(B * s)


def null_vector(I1, I2, epsilon, n, tol=1e-300):
    """Kernel of the 2x2 matching matrix, taken from the row with the larger pivot.

    A row (alpha, beta) is annihilated by (beta, -alpha); if that row vanishes
    the other one is used.
    """
    q = q_factor(epsilon, n)
    rows = [(1.0 + I1, q * I2), (q * I1, 1.0 + I2)]
    order = (0, 1) if abs(1.0 + I1) >= abs(1.0 + I2) else (1, 0)
    for i in order:
        alpha, beta = rows[i]
        if max(abs(alpha), abs(beta)) > tol:
            return normalize_amplitudes(beta, -alpha)
    raise DomainError("both rows of the matching matrix vanish")


@dataclass
class Lambda:
    total: float
    epsilon: float
    lambda1_ref: Optional[float] = None
    lambda0: float = LAMBDA0

    @property
    def lambda1(self):
        return (self.total - self.lambda0) / self.epsilon

    @property
    def lambda2(self):
        if self.lambda1_ref is None:
            return None
        e = self.epsilon
        return (self.total - self.lambda0 - e * self.lambda1_ref) / (e * e * np.log(e) ** 2)

    def in_window(self):
        lo, hi = LAMBDA1_WINDOW
        return lo < self.lambda1 < hi


@dataclass
class EigenResult:
    epsilon: float
    n: int
    lam: Lambda
    I1: float
    I2: float
    amplitudes: tuple
    q_factor: float
    det_at_root: float
    bracket: tuple
    search_interval: tuple
    det_at_ends: tuple
    iterations: int
    h_L: RadialSolution = field(repr=False)
    h_R: RadialSolution = field(repr=False)
    residual_report: object = None
    diagnostics: dict = field(default_factory=dict)

    @property
    def row_residuals(self):
        A, B = self.amplitudes
        q = self.q_factor
        return ((1 + self.I1) * A + q * self.I2 * B, q * self.I1 * A + (1 + self.I2) * B)

    def to_dict(self):
        lam = self.lam
        out = {"epsilon": self.epsilon, "n": self.n,
               "lambda": {"total": lam.total, "lambda0": lam.lambda0, "lambda1_fit": lam.lambda1,
                          "lambda2_fit": lam.lambda2, "lambda1_ref": lam.lambda1_ref},
               "I1": self.I1, "I2": self.I2, "A": self.amplitudes[0], "B": self.amplitudes[1],
               "q_factor": self.q_factor, "determinant": self.det_at_root,
               "bracket": list(self.bracket), "iterations": self.iterations,
               "row_residuals": list(self.row_residuals), "diagnostics": dict(self.diagnostics)}
        if self.residual_report is not None:
            out["residuals"] = self.residual_report.to_dict()
        return out


def solve_lambda(epsilon, n=4, tol=ROOT_TOL, margin=BRACKET_MARGIN, lambda1_ref=None,
                 eps0=EPS0_DEFAULT, ode_rtol=ODE_RTOL, quad_rtol=QUAD_REL_TOL) -> EigenResult:
    """Root of the determinant on the interior of the bracket, by Brent's method."""
    if n < 2:
        raise DomainError("n must be at least 2")
    if n < 4:
        warnings.warn(f"n = {n}: positivity of the radial solutions is only established for n >= 4",
                      stacklevel=2)
    if epsilon == 0:
        raise NoEigenvalueError("eps = 0: the bracket is empty, there is no rotating mode")
    lo, hi = lambda_bracket(epsilon, eps0)
    w = hi - lo
    a, b = lo + margin * w, hi - margin * w
    tols = dict(ode_rtol=ode_rtol, quad_rtol=quad_rtol)
    d_a, d_b = determinant(a, epsilon, n, **tols), determinant(b, epsilon, n, **tols)
    if d_a * d_b > 0:
        raise NoEigenvalueError(
            f"determinant does not change sign on ({a}, {b}): {d_a:.4g}, {d_b:.4g}")
    root = brent_root(lambda l: determinant(l, epsilon, n, **tols), (a, b), tol=tol,
                      values=(d_a, d_b))
    ev = evaluate_determinant(root.root, epsilon, n, check_handoff=True, **tols)
    amps = null_vector(ev.I1, ev.I2, epsilon, n)
    lam = Lambda(root.root, epsilon, lambda1_ref)
    diag = {"handoff_left": ev.h_L.diagnostics.get("handoff_difference"),
            "handoff_right": ev.h_R.diagnostics.get("handoff_difference"),
            "min_h_left": ev.h_L.diagnostics["min_value"],
            "min_h_right": ev.h_R.diagnostics["min_value"]}
    return EigenResult(epsilon, n, lam, ev.I1, ev.I2, amps, q_factor(epsilon, n), ev.value,
                       (lo, hi), (a, b), (d_a, d_b), root.iterations, ev.h_L, ev.h_R,
                       diagnostics=diag)


def eigen_at(lam, epsilon, n=4, eps0=EPS0_DEFAULT) -> EigenResult:
    """Everything ``solve_lambda`` returns, at an arbitrary lam in the bracket.

    The amplitudes come from the better-conditioned row only, so away from a
    root the other row is left unsatisfied.  Used for sensitivity checks.
    """
    lo, hi = lambda_bracket(epsilon, eps0)
    ev = evaluate_determinant(lam, epsilon, n)
    amps = null_vector(ev.I1, ev.I2, epsilon, n)
    return EigenResult(epsilon, n, Lambda(lam, epsilon), ev.I1, ev.I2, amps, q_factor(epsilon, n),
                       ev.value, (lo, hi), (lam, lam), (ev.value, ev.value), 0, ev.h_L, ev.h_R)


# ------------------------------------------------------- leading order lam1 ---

def _near_one_series(order=None):
    """Series in t = x - 1 of G(t) = (lam0 + c(1+t, 0))/t and of w0'(1+t)."""
    basis_order = 40 if order is None else order
    m = basis_order + 2
    x = ser.poly([1.0, 1.0], m)
    x2 = ser.mul(x, x, m)
    opx2 = ser.poly([2.0, 2.0, 1.0], m)
    d = np.log(2.0) * x2 - ser.log_series(opx2, m)
    d[0] = 0.0
    g = ser.divide(np.pad(ser.shift(d, 1), (0, 1)), 2.0 * x2, m)
    w0p = ser.divide(-2.0 * x, ser.mul(opx2, opx2, m), m)
    return g[:basis_order + 1], w0p[:basis_order + 1]


def _delta0(x):
    x = np.asarray(x, dtype=float)
    return LAMBDA0 + SideCoefficient("left", 0.0).value(x)


@dataclass
class Lambda1Report:
    n: int
    lambda1: float
    Z_L: float
    Z_R: float
    variant_lambda1: float
    variant_Z_L: float
    variant_Z_R: float
    harmonic_component: float            # int_0^1 (x^n - 1)/(x - 1) dx = H_n

    def in_window(self):
        lo, hi = LAMBDA1_WINDOW
        return lo < self.lambda1 < hi


def _log_ratio_root(const, coefficient):
    """Solve const + coefficient * log(-mu_L/mu_R) = 0 for lam1 in the window.

    mu_L = lam1 + (1 - log 2)/2 < 0 and mu_R = lam1 + log(2)/2 > 0, so
    -mu_L/mu_R = exp(L) gives lam1 = -(c_L + c_R e^L)/(1 + e^L) with
    c_L = (1-log2)/2, c_R = log(2)/2.  The map is a bijection onto the window.
    """
    L = -const / coefficient
    cl, cr = 0.5 * (1.0 - np.log(2.0)), 0.5 * np.log(2.0)
    # written as an offset from the nearer edge so rounding never leaves the window
    if L > 0:
        return -cr + (cr - cl) / (1.0 + np.exp(min(L, 700.0)))
    return -cl - (cr - cl) / (1.0 + np.exp(-L))


def _integrand(series, direct, rho):
    """Use the series within ``rho`` of x = 1 and the direct formula elsewhere."""
    def f(x):
        x = np.asarray(x, dtype=float)
        inside = np.abs(x - 1.0) <= rho
        out = np.empty_like(x)
        if inside.any():
            out[inside] = series.eval(x[inside])
        if (~inside).any():
            out[~inside] = direct(x[~inside])
        return out
    return f


def _drop_const(s: SeriesAtPoint) -> SeriesAtPoint:
    """Zero the t^0 coefficient, which cancels analytically."""
    p = s.powers.copy()
    if s.k_min == 0:
        p[0] = 0.0
    logs = None if s.logs is None else s.logs.copy()
    if logs is not None and s.k_min == 0:
        logs[0] = 0.0
    return SeriesAtPoint(s.center, p, logs, s.k_min, s.radius, s.exact)


def _over_t(s: SeriesAtPoint) -> SeriesAtPoint:
    s = _drop_const(s)
    return SeriesAtPoint(s.center, s.powers, s.logs, s.k_min - 1, s.radius).normalized()


def harmonic(n):
    return float(sum(1.0 / k for k in range(1, n + 1)))


@lru_cache(maxsize=8)
def lambda1_leading(n: int = 4) -> Lambda1Report:
    """Leading-order lam1 from the eps -> 0 limit of 1 + I1 + I2 = 0.

    With Delta(x) = lam0 + c(x, 0) and kappa' = log 2 - 1/2,
    -2n (I1 + I2) -> (w0'(1)/kappa') log(-mu_L/mu_R) + Z_L + Z_R where

      Z_L = int_0^1 [w0'(x) h_L x^n - w0'(1)]/Delta
            + w0'(1) int_0^1 [1/Delta - 1/(kappa'(x-1))] - w0'(1) log(kappa')/kappa',
      Z_R = int_1^inf [w0'(x) h_R - w0'(1)] x^-n/Delta
            + w0'(1) int_1^inf x^-n [1/Delta - 1/(kappa'(x-1))]
            + w0'(1) [int_1^2 (x^-n - 1)/(kappa'(x-1)) + int_2^inf x^-n/(kappa'(x-1))
                      + log(kappa')/kappa'].

    Integrands near x = 1 come from Frobenius series so nothing cancels in
    floating point.  A variant closed form (w0'(1) frozen in front of h, the
    bracketed difference with the opposite sign and no w0'(1) on the log
    term) is solved as well and returned as ``variant_lambda1``; it does not
    reproduce the small-eps limit of 1 + I1 + I2 and is kept for comparison.
    """
    kp = KAPPA_PRIME
    rho = SERIES_RADIUS
    h_L = integrate_radial(OdeProblem("left", n, 0.0, LAMBDA0))
    h_R = integrate_radial(OdeProblem("right", n, 0.0, LAMBDA0))
    order = singular_basis(n).g1.powers.size
    gco, w0co = _near_one_series(order - 1)
    G = SeriesAtPoint(1.0, gco, None, 0, rho)
    W0P = SeriesAtPoint(1.0, w0co, None, 0, rho)
    X = SeriesAtPoint(1.0, [1.0, 1.0], None, 0, np.inf, exact=True)
    Xn = SeriesAtPoint(1.0, [1.0], None, 0, np.inf, exact=True)
    for _ in range(n):
        Xn = Xn * X
    Xmn = Xn.reciprocal(order)
    Ginv = G.reciprocal()
    hl = h_L.pieces[-1].series * (1.0 / h_L.norm)
    hr = h_R.pieces[-1].series * (1.0 / h_R.norm)
    gminus = _over_t(Ginv - 1.0 / kp)                 # 1/Delta - 1/(kappa' t)

    def d0(x):
        return _delta0(x)

    def sing(x):
        return 1.0 / d0(x) - 1.0 / (kp * (x - 1.0))

    spec = QuadratureSpec(rel_tol=1e-12, abs_tol=1e-15, grading_center=1.0, grading_levels=50,
                          split_points=(1.0 - rho, 1.0 + rho))
    tail = QuadratureSpec(rel_tol=1e-12, abs_tol=1e-15)

    def left(series, direct):
        return adaptive_quad(_integrand(series, direct, rho), (0.0, 1.0), spec)[0]

    def right(series, direct):
        f = _integrand(series, direct, rho)
        return adaptive_quad(f, (1.0, 2.0), spec)[0] + semiinfinite_quad(f, 2.0, tail)[0]

    j_fl = left(_over_t(W0P * Xn * hl - W0P1) * Ginv,
                lambda x: (base_derivative(x) * h_L.h(x) * x ** n - W0P1) / d0(x))
    j_fr = right(_over_t((W0P * hr - W0P1) * Xmn) * Ginv,
                 lambda x: (base_derivative(x) * h_R.h(x) - W0P1) * x ** (-n) / d0(x))
    j_gl = left(gminus, sing)
    j_gr = right(gminus * Xmn, lambda x: x ** (-n) * sing(x))
    t_12 = adaptive_quad(lambda x: (x ** (-n) - 1.0) / (kp * (x - 1.0)), (1.0, 2.0), tail)[0]
    t_2inf = semiinfinite_quad(lambda x: x ** (-n) / (kp * (x - 1.0)), 2.0, tail)[0]
    Z_L = j_fl + W0P1 * j_gl - W0P1 / kp * np.log(kp)
    Z_R = j_fr + W0P1 * j_gr + W0P1 * (t_12 + t_2inf + np.log(kp) / kp)
    # 1 - (w0'(1)/(2n kappa')) log(-mu_L/mu_R) - (Z_L + Z_R)/(2n) = 0
    lam1 = _log_ratio_root(1.0 - (Z_L + Z_R) / (2.0 * n), -W0P1 / (2.0 * n * kp))

    # the variant closed form, term by term
    a1 = adaptive_quad(lambda x: (x ** n - 1.0) / (x - 1.0), (0.0, 1.0), tail)[0]
    a2 = -left(gminus * Xn, lambda x: x ** n * sing(x))
    a3 = left(_over_t((hl - 1.0) * Xn) * Ginv, lambda x: (h_L.h(x) - 1.0) * x ** n / d0(x))
    b2 = -j_gr
    b3 = right(_over_t((hr - 1.0) * Xmn) * Ginv, lambda x: (h_R.h(x) - 1.0) * x ** (-n) / d0(x))
    m_L = W0P1 * (a1 / kp + a2 + a3) - W0P1 / kp * np.log(kp)
    m_R = W0P1 * (t_12 + t_2inf + b2 + b3) + W0P1 / kp * np.log(kp)
    pz_L, pz_R = m_L / (-2.0 * n), m_R / (-2.0 * n)
    # 1 - (1/(2n kappa')) log(-mu_L/mu_R) + Z_L + Z_R = 0
    variant = _log_ratio_root(1.0 + pz_L + pz_R, -1.0 / (2.0 * n * kp))
    report = Lambda1Report(n, float(lam1), float(Z_L), float(Z_R), float(variant), float(pz_L),
                           float(pz_R), float(a1))
    if not report.in_window():
        raise DomainError(f"leading-order lam1 = {lam1} left the window {LAMBDA1_WINDOW}")
    return report
