"""Physical eigenmode, integral-equation residuals and scaling diagnostics.

With H_L = A h_L and H_R = B h_R the rescaled amplitudes are

    f*_L(x) = H_L(x) / (2n x a (lam + c_L(x, eps))),   a = 1 - eps/2,
    f*_R(x) = H_R(x) / (2n x b (lam + c_R(x, eps))),   b = 1 + eps/2,

and in physical radius h_n(r) = f*_L(r/a) for r <= a, f*_R(r/b) for r >= b.
The vorticity perturbation is W_n(r) cos(n(theta - lam t)) with
W_n = h_n w_eps', which vanishes on the plateau (a, b).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import brentq

from .eigensolver import EigenResult, q_factor, solve_lambda
from .errors import AssemblyError, DomainError
from .kernels import KernelSpec, eval_kernel
from .numerics import QuadratureSpec, adaptive_quad, semiinfinite_quad
from .profiles import LAMBDA0, SideCoefficient, VortexProfile, base_derivative, lambda_bracket
from .radial_ode import OdeProblem, RadialSolution, integrate_radial

DENOMINATOR_FLOOR = 1e-13


@dataclass
class ModeField:
    epsilon: float
    n: int
    lam: float
    amplitudes: tuple
    h_L: RadialSolution = field(repr=False)
    h_R: RadialSolution = field(repr=False)
    normalization: str = "max(|A|, |B|) = 1, h_L(1) = h_R(1) = 1"

    def __post_init__(self):
        if self.n < 2:
            raise AssemblyError("modes need n >= 2 (n = 1 is the translation mode)")
        self.profile = VortexProfile(self.epsilon)
        self._cl = SideCoefficient("left", self.epsilon)
        self._cr = SideCoefficient("right", self.epsilon)
        floor = min(abs(self.lam + float(self._cl.value(1.0))),
                    abs(self.lam + float(self._cr.value(1.0))))
        if floor < DENOMINATOR_FLOOR:
            raise AssemblyError(f"lam + c vanishes on the support (min {floor:.3g})")

    @property
    def inner(self):
        return 1.0 - 0.5 * self.epsilon

    @property
    def outer(self):
        return 1.0 + 0.5 * self.epsilon

    def H_L(self, x):
        return self.amplitudes[0] * self.h_L.h(x)

    def H_R(self, x):
        return self.amplitudes[1] * self.h_R.h(x)

    def f_star_L(self, x):
        x = np.asarray(x, dtype=float)
        return self.H_L(x) / (2 * self.n * x * self.inner * (self.lam + self._cl.value(x)))

    def f_star_R(self, x):
        x = np.asarray(x, dtype=float)
        return self.H_R(x) / (2 * self.n * x * self.outer * (self.lam + self._cr.value(x)))

    def h_n(self, r):
        """Radial amplitude on the support; raises on the open plateau."""
        r = np.atleast_1d(np.asarray(r, dtype=float))
        a, b = self.inner, self.outer
        if np.any((r > a) & (r < b)):
            raise DomainError("h_n is only defined on the support of w_eps'")
        out = np.empty_like(r)
        left = r <= a
        if left.any():
            out[left] = self.f_star_L(r[left] / a)
        if (~left).any():
            out[~left] = self.f_star_R(r[~left] / b)
        return out

    def W_n(self, r):
        r = np.atleast_1d(np.asarray(r, dtype=float))
        a, b = self.inner, self.outer
        out = np.zeros_like(r)
        supp = (r <= a) | (r >= b)
        supp &= r > 0
        if supp.any():
            out[supp] = self.h_n(r[supp]) * self.profile.derivative(r[supp])
        return out

    def field(self, r, theta, t=0.0):
        return self.W_n(r) * np.cos(self.n * (np.asarray(theta) - self.lam * t))

    @property
    def period(self):
        return 2.0 * np.pi / (self.n * abs(self.lam))


def assemble_mode(eigen: EigenResult, h_L: Optional[RadialSolution] = None,
                  h_R: Optional[RadialSolution] = None, amplitudes=None) -> ModeField:
    amps = eigen.amplitudes if amplitudes is None else tuple(float(v) for v in amplitudes)
    return ModeField(eigen.epsilon, eigen.n, eigen.lam.total, amps,
                     eigen.h_L if h_L is None else h_L, eigen.h_R if h_R is None else h_R)


# ------------------------------------------------------------- residuals ---

@dataclass(frozen=True)
class CollocationSpec:
    n_left: int = 50
    n_right: int = 50
    n_physical: int = 30
    x_min: float = 0.02
    x_max: float = 20.0
    rel_tol: float = 1e-11
    layer: Optional[float] = None      # default max(1e-4, eps/20)

    def layer_width(self, epsilon):
        return max(1e-4, epsilon / 20.0) if self.layer is None else self.layer

    def left_grid(self, epsilon):
        d = self.layer_width(epsilon)
        return np.sort(1.0 - np.geomspace(d, 1.0 - self.x_min, self.n_left))

    def right_grid(self, epsilon):
        d = self.layer_width(epsilon)
        return 1.0 + np.geomspace(d, self.x_max - 1.0, self.n_right)


@dataclass
class ResidualReport:
    epsilon: float
    n: int
    lam: float
    left_max: float
    right_max: float
    physical_max: float
    physical_literal_max: float
    N_L_at_1: float
    N_R_at_1: float
    scale: float
    relation_max: float
    cross_check_max: float
    left_grid: np.ndarray = field(repr=False)
    right_grid: np.ndarray = field(repr=False)
    physical_radii: np.ndarray = field(repr=False)
    left_residuals: np.ndarray = field(repr=False)
    right_residuals: np.ndarray = field(repr=False)
    physical_residuals: np.ndarray = field(repr=False)
    trivial: bool = False

    @property
    def boundary_max(self):
        return max(abs(self.N_L_at_1), abs(self.N_R_at_1)) / (self.scale if self.scale else 1.0)

    def passed(self, tol=1e-6):
        if self.trivial:
            return False
        return max(self.left_max, self.right_max, self.physical_max, self.boundary_max) < tol

    def to_dict(self):
        return {"epsilon": self.epsilon, "n": self.n, "lambda": self.lam,
                "left_max": self.left_max, "right_max": self.right_max,
                "physical_max": self.physical_max,
                "physical_literal_max": self.physical_literal_max,
                "N_L_at_1": self.N_L_at_1, "N_R_at_1": self.N_R_at_1,
                "boundary_max": self.boundary_max, "scale": self.scale,
                "relation_max": self.relation_max, "cross_check_max": self.cross_check_max,
                "n_left": int(self.left_grid.size), "n_right": int(self.right_grid.size),
                "n_physical": int(self.physical_radii.size), "trivial": self.trivial}


class _Integrals:
    """The pieces of the rescaled integral operators for one mode."""

    def __init__(self, mode: ModeField, rel_tol):
        self.m = mode
        self.a, self.b = mode.inner, mode.outer
        self.n = mode.n
        self.q = q_factor(mode.epsilon, mode.n)
        self.spec = dict(rel_tol=rel_tol, abs_tol=1e-16)
        cl, cr, lam = mode._cl, mode._cr, mode.lam
        self.gl = lambda s: base_derivative(self.a * s) * mode.H_L(s) / (lam + cl.value(s))
        self.gr = lambda s: base_derivative(self.b * s) * mode.H_R(s) / (lam + cr.value(s))
        self.levels = int(14 + np.ceil(np.log2(1.0 / max(mode.epsilon, 1e-16))))
        n = self.n
        self.left_moment = self._quad(lambda s: self.gl(s) * s ** n, 0.0, 1.0)
        self.right_moment = self._tail(lambda s: self.gr(s) * s ** (-n), 1.0)

    def _quad(self, f, lo, hi, center=1.0):
        if hi <= lo:
            return 0.0
        spec = QuadratureSpec(grading_center=center if lo <= center <= hi else None,
                              grading_levels=self.levels, **self.spec)
        return adaptive_quad(f, (lo, hi), spec)[0]

    def _tail(self, f, lo):
        spec = QuadratureSpec(grading_center=1.0 if lo <= 1.0 + 1e-12 else lo,
                              grading_levels=self.levels, **self.spec)
        return semiinfinite_quad(f, lo, spec)[0]

    def left(self, x):
        """(H_L(x), A(x), B(x)) with H_L - A - B = 0 for an exact solution."""
        n, a, b = self.n, self.a, self.b
        inner = self._quad(lambda s: self.gl(s) * (s / x) ** n, 0.0, x, center=x)
        outer = self._quad(lambda s: self.gl(s) * (s / x) ** (-n), x, 1.0)
        A = a / (2 * n) * inner
        B = a / (2 * n) * outer + b / (2 * n) * self.q * x ** n * self.right_moment
        return self.m.H_L(x), A, B

    def right(self, x):
        n, a, b = self.n, self.a, self.b
        near = self._quad(lambda s: self.gr(s) * (s / x) ** n, 1.0, x)
        far = self._tail(lambda s: self.gr(s) * (s / x) ** (-n), x)
        return (self.m.H_R(x),
                a / (2 * n) * self.q * x ** (-n) * self.left_moment + b / (2 * n) * (near + far))


def _physical(mode: ModeField, r, rel_tol, literal=False):
    """(lam + c(r)) h_n(r) - (1/n) int w_eps'(s) K_n(r/s) h_n(s) ds at one radius.

    With ``literal`` the W-form without the w_eps'(r) factor on the integral
    is returned instead: (lam + c) W_n(r) - (1/n) int K_n(r/s) W_n(s) ds.
    """
    prof, a, b, n = mode.profile, mode.inner, mode.outer, mode.n
    ks = KernelSpec(n)

    def integrand(s):
        return prof.derivative(s) * eval_kernel(ks, r / s) * mode.h_n(s)

    levels = int(14 + np.ceil(np.log2(1.0 / max(mode.epsilon, 1e-16))))
    total = 0.0
    for lo, hi, c in ((0.0, a, a), (b, 4.0 * b, b)):
        cuts = sorted({lo, hi} | ({r} if lo < r < hi else set()))
        for u, v in zip(cuts[:-1], cuts[1:]):
            spec = QuadratureSpec(rel_tol=rel_tol, abs_tol=1e-16, grading_center=c if u <= c <= v else None,
                                  grading_levels=levels)
            total += adaptive_quad(integrand, (u, v), spec)[0]
    total += semiinfinite_quad(integrand, 4.0 * b, QuadratureSpec(rel_tol=rel_tol, abs_tol=1e-16))[0]
    lam_c = mode.lam + float(prof.c(r))
    if literal:
        return lam_c * float(mode.W_n(r)[0]) - total / n
    return lam_c * float(mode.h_n(r)[0]) - total / n


def verify_integral_equations(mode: ModeField, h_L=None, h_R=None, eigen=None,
                              collocation_spec: CollocationSpec = CollocationSpec()) -> ResidualReport:
    """Residuals of the rescaled pair and of the physical equation.

    Relative values are divided by max(|H_L|, |H_R|) over the collocation
    grids; the physical residual (in W-form, w_eps'(r) times the h-form) is
    divided by max |(lam + c) W_n| over its radii.
    """
    eps, n = mode.epsilon, mode.n
    cs = collocation_spec
    xl, xr = cs.left_grid(eps), cs.right_grid(eps)
    half = cs.n_physical // 2
    pick_l = xl[np.linspace(0, xl.size - 1, half).astype(int)]
    pick_r = xr[np.linspace(0, xr.size - 1, cs.n_physical - half).astype(int)]
    radii = np.concatenate([mode.inner * pick_l, mode.outer * pick_r])
    if mode.amplitudes[0] == 0 and mode.amplitudes[1] == 0:
        z = np.zeros
        return ResidualReport(eps, n, mode.lam, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0,
                              xl, xr, radii, z(xl.size), z(xr.size), z(radii.size), trivial=True)
    ig = _Integrals(mode, cs.rel_tol)
    left = np.array([ig.left(x) for x in xl])             # columns H, A(x), B(x)
    right = np.array([ig.right(x) for x in xr])           # columns H, operator
    H_all = np.concatenate([left[:, 0], right[:, 0]])
    scale = float(np.max(np.abs(H_all)))
    res_l = left[:, 0] - left[:, 1] - left[:, 2]
    res_r = right[:, 0] - right[:, 1]
    # H_L + (x/n) H_L' = 2 B(x)
    xhl = mode.amplitudes[0] * mode.h_L.xh(xl)
    relation = np.max(np.abs(left[:, 0] + xhl / n - 2.0 * left[:, 2])) / scale
    # values at the plateau edge
    N_L1 = mode.H_L(1.0) - mode.inner / (2 * n) * ig.left_moment \
        - mode.outer / (2 * n) * ig.q * ig.right_moment
    N_R1 = mode.H_R(1.0) - mode.inner / (2 * n) * ig.q * ig.left_moment \
        - mode.outer / (2 * n) * ig._tail(lambda s: ig.gr(s) * s ** (-n), 1.0)

    phys_h = np.array([_physical(mode, r, cs.rel_tol) for r in radii])
    deriv = mode.profile.derivative(radii)
    phys_w = deriv * phys_h
    lit = np.array([_physical(mode, r, cs.rel_tol, literal=True) for r in radii])
    w_scale = float(np.max(np.abs((mode.lam + mode.profile.c(radii)) * mode.W_n(radii))))
    # the rescaled left/right residual is 2n x a R_h(a x) (resp. b) at the same point
    idx_l = np.linspace(0, xl.size - 1, half).astype(int)
    idx_r = np.linspace(0, xr.size - 1, cs.n_physical - half).astype(int)
    from_rescaled = np.concatenate([res_l[idx_l], res_r[idx_r]])
    jac = 2 * n * radii
    cross = float(np.max(np.abs(from_rescaled - jac * phys_h))) / scale
    return ResidualReport(
        eps, n, mode.lam,
        float(np.max(np.abs(res_l)) / scale), float(np.max(np.abs(res_r)) / scale),
        float(np.max(np.abs(phys_w)) / w_scale), float(np.max(np.abs(lit)) / w_scale),
        float(N_L1), float(N_R1), scale, float(relation), cross,
        xl, xr, radii, res_l / scale, res_r / scale, phys_w / w_scale)


# -------------------------------------------------------- scaling study ---

@dataclass(frozen=True)
class DifferenceRow:
    epsilon: float
    lam: float
    left_norm: float
    right_norm: float

    @property
    def scale(self):
        return self.epsilon * np.log(1.0 / self.epsilon)

    @property
    def left_ratio(self):
        return self.left_norm / self.scale

    @property
    def right_ratio(self):
        return self.right_norm / self.scale


def difference_scaling_study(n: int, eps_list: Sequence[float], results=None, far=1e3):
    """sup |x^-n (h_L - h0_L)| and sup |x^n (h_R - h0_R)| divided by eps log(1/eps).

    ``results`` may map eps to an already solved ``EigenResult``.  The grid
    is the eps > 0 solution's own sample grid, and the eps = 0 solutions are
    evaluated there through their dense output and Frobenius pieces.
    """
    eps_list = [float(e) for e in eps_list]
    if any(e2 >= e1 for e1, e2 in zip(eps_list, eps_list[1:])):
        raise DomainError("eps_list must be strictly decreasing")
    h0_L = integrate_radial(OdeProblem("left", n, 0.0, LAMBDA0))
    h0_R = integrate_radial(OdeProblem("right", n, 0.0, LAMBDA0))
    rows = []
    for eps in eps_list:
        res = (results or {}).get(eps) or solve_lambda(eps, n)
        xl = res.h_L.grid
        xr = res.h_R.grid[res.h_R.grid <= far]
        dl = np.max(np.abs(xl ** (-n) * (res.h_L.h(xl) - h0_L.h(xl))))
        dr = np.max(np.abs(xr ** n * (res.h_R.h(xr) - h0_R.h(xr))))
        rows.append(DifferenceRow(eps, res.lam.total, float(dl), float(dr)))
    return rows


# ---------------------------------------------------------- figure data ---

@dataclass
class FigureData:
    kind: str
    columns: dict
    meta: dict = field(default_factory=dict)
    heatmap: Optional[dict] = None


def r_star(lam, epsilon):
    """The plateau radius where c(r) = -lam (c is increasing there)."""
    prof = VortexProfile(epsilon)
    a, b = prof.inner, prof.outer
    return brentq(lambda r: float(prof.c(r)) + lam, a, b, xtol=1e-15)


def figure_data(kind: str, epsilon=0.1, mode: Optional[ModeField] = None, lam=None,
                n_points=400, n_theta=64, zoom=False):
    if kind == "profiles":
        prof = VortexProfile(epsilon)
        r = np.linspace(0.0, 3.0, n_points + 1)
        return FigureData(kind, {"r": r, "base": prof.base(r), "perturbed": prof.value(r)},
                          {"epsilon": epsilon})
    if kind == "c_gap":
        prof = VortexProfile(epsilon)
        a, b = prof.inner, prof.outer
        lo, hi = lambda_bracket(epsilon)
        lam_star = 0.5 * (lo + hi) if lam is None else lam
        if zoom:
            span = 3.0 * epsilon
            rl = np.linspace(1.0 - span, a, n_points // 2)
            rr = np.linspace(b, 1.0 + span, n_points // 2)
        else:
            rl = np.linspace(1e-3, a, n_points // 2)
            rr = np.linspace(b, 3.0, n_points // 2)
        r = np.concatenate([rl, rr])
        branch = np.concatenate([np.zeros(rl.size), np.ones(rr.size)])
        return FigureData(kind, {"r": r, "c": prof.c(r), "branch": branch},
                          {"epsilon": epsilon, "band_lo": -hi, "band_hi": -lo,
                           "lambda_star": lam_star, "r_star": r_star(lam_star, epsilon),
                           "zoom": zoom})
    if kind == "mode":
        if mode is None:
            raise DomainError("the mode dataset needs an assembled ModeField")
        a, b = mode.inner, mode.outer
        r = np.concatenate([np.linspace(0.0, a, n_points // 2), np.linspace(b, 3.0, n_points // 2)])
        W = mode.W_n(r)
        rh = np.linspace(0.0, 2.0, 81)
        th = np.linspace(0.0, 2.0 * np.pi, n_theta, endpoint=False)
        RR, TT = np.meshgrid(rh, th, indexing="ij")
        VV = mode.W_n(rh)[:, None] * np.cos(mode.n * TT)
        heat = {"r": RR.ravel(), "theta": TT.ravel(), "value": VV.ravel()}
        return FigureData(kind, {"r": r, "W": W},
                          {"epsilon": mode.epsilon, "n": mode.n, "lambda": mode.lam}, heat)
    raise DomainError(f"unknown figure kind {kind!r}")
