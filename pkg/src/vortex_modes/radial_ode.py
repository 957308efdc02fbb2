"""Left and right radial ODEs for the matching functions h_L, h_R.

Both sides solve

    (x d/dx)^2 h = (n^2 + Psi(x)) h,
    Psi(x) = -x s w0'(s x) / (lam + c_side(x, eps)),  s = 1 -+ eps/2,

with h ~ x^n at the origin (left, x in (0, 1]) or h ~ x^-n at infinity
(right, worked in z = 1/x in (0, 1]).  The equation is invariant under
x -> 1/x, so both sides share one integrator.  Writing h = s^sigma w in the
integration variable s keeps w of order one:

    s w' = p,   s p' = (n^2 - sigma^2 + Psi) w - 2 sigma p.

At eps = 0 and lam = log(2)/2 the potential has a simple pole at x = 1, a
regular singular point with indicial roots {0, 1}.  There the solutions are
continued through a Frobenius basis g1 (analytic, g1(1) = 0, g1'(1) = 1) and
g2 = kappa g1 log|x-1| + (1 + ...), and normalised by the g2 coefficient.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import BarycentricInterpolator

from .errors import BracketError, ConvergenceError, DomainError, NormalizationError
from .numerics import SeriesAtPoint
from .numerics import series as ser
from .profiles import LAMBDA0, SideCoefficient, base_derivative, outer_mass_constant

ODE_RTOL = 1e-12
ODE_ATOL = 1e-15
START_OFFSET = 1e-3
SERIES_ORDER = 40
SERIES_RADIUS = 0.25
N_SAMPLES = 400
KAPPA_PRIME = np.log(2.0) - 0.5          # d/dx c(x, 0) at x = 1


@dataclass(frozen=True)
class OdeProblem:
    side: str
    n: int
    epsilon: float
    lam: float
    zero_potential: bool = False    # test hook: Psi == 0

    def __post_init__(self):
        if self.side not in ("left", "right"):
            raise DomainError(f"side must be 'left' or 'right', got {self.side!r}")
        if int(self.n) != self.n or self.n < 1:
            raise DomainError("n must be a positive integer")
        if self.epsilon < 0:
            raise DomainError("epsilon must be non-negative")

    @property
    def scale(self):
        return 1.0 - 0.5 * self.epsilon if self.side == "left" else 1.0 + 0.5 * self.epsilon

    @property
    def coefficient_side(self):
        return SideCoefficient(self.side, self.epsilon)

    @property
    def singular(self):
        return self.epsilon == 0 and not self.zero_potential

    def denominator(self, x):
        return self.lam + self.coefficient_side.value(x)

    def potential(self, x):
        """Psi(x) in the physical rescaled variable."""
        x = np.asarray(x, dtype=float)
        if self.zero_potential:
            return np.zeros_like(x)
        s = self.scale
        return -x * s * base_derivative(s * x) / self.denominator(x)

    def potential_z(self, z):
        """Phi(z) = Psi(1/z) for the right side, regular down to z = 0."""
        if self.side != "right":
            raise DomainError("potential_z is defined for the right side only")
        z = np.asarray(z, dtype=float)
        if self.zero_potential:
            return np.zeros_like(z)
        s = self.scale
        num = 2.0 * s * s * z * z / (z * z + s * s) ** 2
        # c_R(1/z) = -(z/s)^2 [log(1 + s^2/z^2)/2 + K]
        zz = np.where(z == 0, 1.0, z)
        logterm = 0.5 * (np.log(s * s + zz * zz) - 2.0 * np.log(zz))
        c = -(zz / s) ** 2 * (logterm + outer_mass_constant(self.epsilon))
        c = np.where(z == 0, 0.0, c)
        return num / (self.lam + c)

    def check_denominator(self, probe: Optional[np.ndarray] = None):
        """Assert the sign condition of the denominator on a probe grid.

        Left: lam + c_L < 0 on (0, 1].  Right: lam + c_R > 0 on [1, inf).
        At eps = 0 the point x = 1 is excluded (there the denominator vanishes).
        """
        if self.zero_potential:
            return
        if probe is None:
            if self.side == "left":
                probe = np.concatenate([np.linspace(0.0, 0.9, 91), 1.0 - np.geomspace(0.1, 1e-8, 60)])
                if self.epsilon > 0:
                    probe = np.append(probe, 1.0)
            else:
                probe = np.concatenate([1.0 + np.geomspace(1e-8, 0.1, 60), np.geomspace(1.2, 1e4, 80)])
                if self.epsilon > 0:
                    probe = np.append(probe, 1.0)
        d = self.denominator(probe)
        bad = d >= 0 if self.side == "left" else d <= 0
        if np.any(bad):
            where = float(np.asarray(probe)[bad][0])
            raise BracketError(
                f"{self.side} denominator lam + c has the wrong sign at x = {where:.6g} "
                f"(lam = {self.lam!r}, eps = {self.epsilon!r})")


# ---------------------------------------------------------------- series ---

def _potential_origin_coeffs(problem: OdeProblem, order: int):
    """Taylor coefficients of Psi_L(x) at x = 0 (even series)."""
    s2 = problem.scale ** 2
    m = order // 2 + 2
    # numerator 2 u/(1+u)^2 and denominator lam + K - log(1+u)/(2u), u = s^2 x^2
    k = np.arange(m)
    num_u = np.zeros(m)
    num_u[1:] = 2.0 * ((-1.0) ** (k[1:] - 1)) * k[1:]
    den_u = -0.5 * (-1.0) ** k / (k + 1.0)
    den_u[0] += problem.lam + 16.0 * problem.epsilon / (64.0 + problem.epsilon ** 4)
    psi_u = ser.divide(num_u, den_u, m) * s2 ** k
    out = np.zeros(2 * m)
    out[::2] = psi_u
    return out[:order + 1]


def frobenius_origin_series(problem: OdeProblem, order: int = SERIES_ORDER,
                            radius: float = SERIES_RADIUS) -> SeriesAtPoint:
    """x^n (1 + a_1 x + a_2 x^2 + ...) solving the left ODE at the origin.

    For the right side the series is in z = 1/x.  There the potential carries
    a z^2 log z term, so only the analytic part z^n (1 + a_2 z^2) is exact;
    the next correction is O(z^(n+4) log z).
    """
    n = problem.n
    if problem.side == "left":
        if problem.zero_potential:
            return SeriesAtPoint(0.0, [1.0], None, n, np.inf, exact=True)
        p = _potential_origin_coeffs(problem, order)
        if not np.all(np.isfinite(p)):
            raise DomainError("potential is not analytic at the origin")
        a = np.zeros(order + 1)
        a[0] = 1.0
        for kk in range(1, order + 1):
            a[kk] = np.dot(p[1:kk + 1], a[kk - 1::-1][:kk]) / (kk * (2 * n + kk))
        return SeriesAtPoint(0.0, a, None, n, radius)
    if problem.zero_potential:
        return SeriesAtPoint(0.0, [1.0], None, n, np.inf, exact=True)
    # Phi(z)/z^2 -> 2/(s^2 lam) as z -> 0 since c_R(1/z) -> 0
    phi0 = 2.0 / (problem.scale ** 2 * problem.lam)
    if not np.isfinite(phi0):
        raise DomainError("potential is not regular at infinity")
    return SeriesAtPoint(0.0, [1.0, 0.0, phi0 / (4.0 * (n + 1))], None, n, radius)


@dataclass(frozen=True)
class SingularBasis:
    """Frobenius basis at the regular singular point x = 1 (eps = 0)."""

    n: int
    g1: SeriesAtPoint
    g2: SeriesAtPoint
    kappa: float
    radius: float


def _singular_potential_coeffs(order: int):
    """Taylor coefficients of S(t) = t Psi_0(1 + t)."""
    m = order + 3
    t = ser.poly([0.0, 1.0], m)
    x = ser.poly([1.0, 1.0], m)
    x2 = ser.mul(x, x, m)
    one_plus_x2 = ser.poly([2.0, 2.0, 1.0], m)
    # D(x) = x^2 log 2 - log(1 + x^2), D(1) = 0
    d = np.log(2.0) * x2 - ser.log_series(one_plus_x2, m)
    d[0] = 0.0
    d1 = ser.shift(d, 1)
    num = 4.0 * ser.mul(x2, x2, m)
    den = ser.mul(ser.mul(one_plus_x2, one_plus_x2, m), np.pad(d1, (0, 1)), m)
    return ser.divide(num, den, m)[:order + 1]


@lru_cache(maxsize=16)
def singular_basis(n: int, order: int = SERIES_ORDER, radius: float = SERIES_RADIUS) -> SingularBasis:
    K = order
    s = _singular_potential_coeffs(K + 1)
    a = ser.poly([1.0, 2.0, 1.0], K + 2)
    b = ser.poly([1.0, 1.0], K + 2)
    c = s.copy()
    c = np.pad(c, (0, max(0, K + 2 - c.size)))
    c[1] += n * n
    kappa = float(c[0])

    def solve(first, second, rhs):
        g = np.zeros(K + 1)
        g[0], g[1] = first, second
        for m in range(1, K):
            j = np.arange(1, m + 1)
            acc = rhs[m] if rhs is not None else 0.0
            acc -= np.sum(a[j] * (m + 1 - j) * (m - j) * g[m + 1 - j])
            j0 = np.arange(0, m + 1)
            acc -= np.sum(b[j0] * (m - j0) * g[m - j0])
            acc += np.sum(c[j0] * g[m - j0])
            g[m + 1] = acc / ((m + 1) * m)
        return g

    g1 = solve(0.0, 1.0, None)
    # right-hand side for the regular part of g2 = kappa g1 log|t| + e(t)
    g1p = ser.derivative(g1)
    g1_over_t = ser.shift(g1, 1)
    sq = ser.poly([1.0, 2.0, 1.0], K)
    rhs = -kappa * (2.0 * ser.mul(sq, g1p, K) - ser.mul(sq, g1_over_t, K)
                    + ser.mul(ser.poly([1.0, 1.0], K), g1[:K], K))
    rhs = np.pad(rhs, (0, 2))
    e = solve(1.0, 0.0, rhs)
    g1s = SeriesAtPoint(1.0, g1, None, 0, radius)
    g2s = SeriesAtPoint(1.0, e, kappa * g1, 0, radius)
    return SingularBasis(n, g1s, g2s, kappa, radius)


# ------------------------------------------------------------ integration ---

def _integrate(coef: Callable, n: int, sigma: float, s0: float, s1: float, w0: float, p0: float,
               rtol: float = ODE_RTOL):
    """Integrate s w' = p, s p' = (n^2 - sigma^2 + coef(s)) w - 2 sigma p."""
    shift_term = n * n - sigma * sigma

    def rhs(s, y):
        w, p = y
        return [p / s, ((shift_term + coef(s)) * w - 2.0 * sigma * p) / s]

    sol = solve_ivp(rhs, (s0, s1), [w0, p0], method="DOP853", rtol=rtol, atol=ODE_ATOL,
                    dense_output=True)
    if not sol.success:
        raise ConvergenceError(f"ODE integration failed: {sol.message}")
    return sol


class _OdePiece:
    """h(x) = s^sigma w(s) on a sub-interval, with s = x or s = 1/x."""

    def __init__(self, sol, sigma, inverted, lo, hi):
        self.sol, self.sigma, self.inverted = sol, sigma, inverted
        self.lo, self.hi = lo, hi
        self.nfev = sol.nfev

    def __call__(self, x):
        s = 1.0 / x if self.inverted else x
        w, p = self.sol.sol(s)
        sp = s ** self.sigma
        h = sp * w
        sdh = sp * (self.sigma * w + p)       # s dh/ds
        return h, (-sdh if self.inverted else sdh)


class _SeriesPiece:
    """h(x) from a series in s = x or s = 1/x."""

    def __init__(self, series: SeriesAtPoint, inverted, lo, hi):
        self.series, self.inverted, self.lo, self.hi = series, inverted, lo, hi
        self.dseries = series.derivative()

    def __call__(self, x):
        s = 1.0 / x if self.inverted else x
        h = self.series.eval(s, check_radius=False)
        sdh = s * self.dseries.eval(s, check_radius=False)
        return h, (-sdh if self.inverted else sdh)


@dataclass
class RadialSolution:
    """One normalised radial solution, h(1) = 1 (or h'(1) = 1 for g1)."""

    problem: OdeProblem
    pieces: list
    norm: float
    raw_value_at_1: float
    origin_series: Optional[SeriesAtPoint]
    grid: np.ndarray = field(default=None)
    values: np.ndarray = field(default=None)
    xderivs: np.ndarray = field(default=None)
    diagnostics: dict = field(default_factory=dict)
    kind: str = "regular"

    def _eval(self, x):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        h = np.full(x.shape, np.nan)
        xd = np.full(x.shape, np.nan)
        for piece in self.pieces:
            m = (x >= piece.lo) & (x <= piece.hi) & np.isnan(h)
            if m.any():
                hv, dv = piece(x[m])
                h[m], xd[m] = hv, dv
        if np.isnan(h).any():
            bad = x[np.isnan(h)][0]
            raise DomainError(f"x = {bad!r} outside the {self.problem.side} solution domain")
        return h / self.norm, xd / self.norm

    def h(self, x):
        out = self._eval(x)[0]
        return out if np.ndim(x) else float(out[0])

    __call__ = h

    def xh(self, x):
        """x h'(x)."""
        out = self._eval(x)[1]
        return out if np.ndim(x) else float(out[0])

    def dh(self, x):
        x = np.asarray(x, dtype=float)
        return self.xh(x) / x

    @property
    def domain(self):
        return min(p.lo for p in self.pieces), max(p.hi for p in self.pieces)


def radial_grid(side: str, n_samples: int = N_SAMPLES, inner: float = START_OFFSET,
                gap: float = 0.0, far: float = 1e3):
    """Samples geometric toward both ends of the side's domain.

    ``gap`` > 0 keeps the grid that far from x = 1 (used at eps = 0).
    """
    half = n_samples // 2
    if side == "left":
        a = np.geomspace(inner, 0.5, half, endpoint=False)
        b = 1.0 - np.geomspace(0.5, max(gap, 1e-6), n_samples - half)
        out = np.concatenate([a, b])
        if gap == 0:
            out[-1] = 1.0
        return np.unique(out)
    a = 1.0 + np.geomspace(max(gap, 1e-6), 1.0, half, endpoint=False)
    b = np.geomspace(2.0, far, n_samples - half)
    out = np.concatenate([a, b])
    if gap == 0:
        out[0] = 1.0
    return np.unique(out)


def integrate_radial(problem: OdeProblem, start_offset: float = START_OFFSET,
                     n_samples: int = N_SAMPLES, check_handoff: bool = False,
                     rtol: float = ODE_RTOL, order: int = SERIES_ORDER,
                     radius: float = SERIES_RADIUS) -> RadialSolution:
    """Solve one side and normalise to h(1) = 1.

    eps > 0: series start at ``start_offset`` (in x on the left, in z = 1/x on
    the right), adaptive integration up to 1.  eps = 0: integration stops at
    distance ``radius`` from the singular point and the solution is continued
    by the Frobenius basis there; its value at 1 is the g2 coefficient.
    """
    n = problem.n
    if problem.epsilon > 0 or problem.zero_potential:
        problem.check_denominator()
    elif problem.lam != LAMBDA0:
        raise DomainError("at eps = 0 the solver is only defined for lam = log(2)/2")
    else:
        problem.check_denominator()
    left = problem.side == "left"
    coef = problem.potential if left else problem.potential_z
    series = frobenius_origin_series(problem, order, radius)
    s0 = start_offset
    w0 = float(series.eval(s0, check_radius=False) / s0 ** n)
    p0 = float(s0 * series.derivative().eval(s0, check_radius=False) / s0 ** n - n * w0)
    s_end = 1.0 if not problem.singular else (1.0 - radius if left else 1.0 / (1.0 + radius))
    sol = _integrate(coef, n, n, s0, s_end, w0, p0, rtol)
    if left:
        pieces = [_SeriesPiece(series, False, 0.0, s0), _OdePiece(sol, n, False, s0, s_end)]
    else:
        pieces = [_OdePiece(sol, n, True, 1.0 / s_end, 1.0 / s0),
                  _SeriesPiece(series, True, 1.0 / s0, np.inf)]
    diagnostics = {"nfev": int(sol.nfev), "start_offset": s0}
    if not problem.singular:
        raw = float(sol.y[0, -1])            # s^n w at s = 1
        kind = "regular"
    else:
        basis = singular_basis(n, order, radius)
        xm = 1.0 - radius if left else 1.0 + radius
        h_m, xd_m = pieces[1](np.array([xm])) if left else pieces[0](np.array([xm]))
        g1, g2 = basis.g1, basis.g2
        mat = np.array([[g1(xm), g2(xm)],
                        [xm * g1.derivative()(xm), xm * g2.derivative()(xm)]], dtype=float)
        alpha, beta = np.linalg.solve(mat, np.array([h_m[0], xd_m[0]]))
        near = g1 * float(alpha) + g2 * float(beta)
        lo, hi = (xm, 1.0) if left else (1.0, xm)
        pieces.append(_SeriesPiece(near, False, lo, hi))
        raw = float(beta)
        kind = "singular"
        diagnostics.update(alpha=float(alpha), beta=float(beta), kappa=basis.kappa,
                           match_point=xm)
    if not np.isfinite(raw) or abs(raw) < 1e-300:
        raise NormalizationError(
            f"{problem.side} solution vanishes at x = 1; positivity fails for n = {n}")
    out = RadialSolution(problem, pieces, raw, raw, series, diagnostics=diagnostics, kind=kind)
    if check_handoff:
        other = integrate_radial(problem, 2.0 * start_offset, n_samples=8, rtol=rtol,
                                 order=order, radius=radius)
        out.diagnostics["handoff_difference"] = abs(other.raw_value_at_1 - raw) / abs(raw)
    gap = 0.0 if not problem.singular else 1e-6
    grid = radial_grid(problem.side, n_samples, start_offset, gap, 1.0 / start_offset)
    out.grid = grid
    out.values = out.h(grid)
    out.xderivs = out.xh(grid)
    out.diagnostics["min_value"] = float(np.min(out.values))
    return out


def second_solution(side: str, n: int, n_samples: int = N_SAMPLES, inner: float = START_OFFSET,
                    order: int = SERIES_ORDER, radius: float = SERIES_RADIUS) -> RadialSolution:
    """Analytic solution at the singular point x = 1 of the eps = 0 problem.

    Left: g1 with g1(1) = 0, g1'(1) = 1, continued toward 0.  Right: the
    analytic solution written as q1(1/x) with q1'(1) = 1 in z, which is -g1
    in x, continued toward infinity.
    """
    basis = singular_basis(n, order, radius)
    problem = OdeProblem(side, n, 0.0, LAMBDA0)
    left = side == "left"
    sign = 1.0 if left else -1.0
    g1 = basis.g1 * sign
    xm = 1.0 - radius if left else 1.0 + radius
    h_m = float(g1(xm))
    xd_m = float(xm * g1.derivative()(xm))
    if left:
        s0, s_end, coef = xm, inner, problem.potential
        w0, p0 = h_m * s0 ** n, (xd_m + n * h_m) * s0 ** n     # h = s^-n w
    else:
        s0, s_end, coef = 1.0 / xm, inner, problem.potential_z
        w0 = h_m * s0 ** n
        p0 = (-xd_m + n * h_m) * s0 ** n                         # z dh/dz = -x dh/dx
    sol = _integrate(coef, n, -n, s0, s_end, w0, p0)
    if left:
        pieces = [_SeriesPiece(g1, False, xm, 1.0), _OdePiece(sol, -n, False, inner, xm)]
    else:
        pieces = [_SeriesPiece(g1, False, 1.0, xm), _OdePiece(sol, -n, True, xm, 1.0 / inner)]
    out = RadialSolution(problem, pieces, 1.0, 0.0, None, kind="analytic",
                         diagnostics={"nfev": int(sol.nfev), "kappa": basis.kappa})
    grid = radial_grid(side, n_samples, inner, 1e-6, 1.0 / inner)
    out.grid, out.values, out.xderivs = grid, out.h(grid), out.xh(grid)
    return out


def wronskian_report(a: RadialSolution, b: RadialSolution, grid: Optional[np.ndarray] = None):
    """max |x (a b' - a' b) - 1| over a common grid.

    Returns (max_deviation, values of x W).  A pair of linearly dependent
    solutions gives x W == 0, i.e. a deviation of one.
    """
    if grid is None:
        lo = max(a.domain[0], b.domain[0])
        hi = min(a.domain[1], b.domain[1])
        if lo >= hi:
            raise DomainError("solutions have disjoint domains")
        grid = a.grid[(a.grid >= lo) & (a.grid <= hi)]
    xw = a.h(grid) * b.xh(grid) - a.xh(grid) * b.h(grid)
    return float(np.max(np.abs(xw - 1.0))), xw


def ode_residual(sol: RadialSolution, points: Optional[np.ndarray] = None, rel_step: float = 1e-3):
    """Pointwise residual of h'' + h'/x - (n^2 + Psi) h / x^2 from the samples.

    h'' is recovered by a five-point central difference of x h'(x) (local refit of the
    dense output).  Returns max |R| / (1 + |h''|).
    """
    if points is None:
        points = sol.grid[5:-5]
        if sol.problem.singular:
            points = points[np.abs(points - 1.0) > 1e-3]
    x = np.asarray(points, dtype=float)
    # step scaled by the distance to the nearest singular point (0, and 1 at eps = 0)
    scale = np.minimum(x, np.abs(x - 1.0)) if sol.problem.singular else x
    lo, hi = sol.domain
    d = np.minimum(rel_step * scale, 0.25 * np.minimum(x - lo, hi - x) + 1e-300)
    dv = (8.0 * (sol.xh(x + d) - sol.xh(x - d)) - (sol.xh(x + 2 * d) - sol.xh(x - 2 * d))) / (12.0 * d)
    h, dh = sol.h(x), sol.dh(x)
    h2 = (dv - dh) / x
    psi = sol.problem.potential(x)
    r = h2 + dh / x - (sol.problem.n ** 2 + psi) * h / x ** 2
    return float(np.max(np.abs(r) / (1.0 + np.abs(h2))))


# ---------------------------------------------------------------- Picard ---

def _phi0(y):
    """Phi_0(y)/y^2 for the eps = 0 right problem in the variable y = 1/x."""
    y = np.asarray(y, dtype=float)
    yy = np.where(y == 0, 1.0, y)
    tail = np.where(y == 0, 0.0, yy * yy * (np.log1p(yy * yy) - 2.0 * np.log(yy)))
    return 4.0 / ((1.0 + y * y) ** 2 * (np.log(2.0) - tail))


@dataclass
class PicardResult:
    n: int
    z: np.ndarray
    f: np.ndarray
    alpha: float
    cap: float
    contraction_bound: float
    distances: list
    iterations: int

    def h(self, z):
        """z^n f(z) by barycentric interpolation of the converged iterate."""
        interp = BarycentricInterpolator(self.z, self.f)
        z = np.asarray(z, dtype=float)
        return z ** self.n * interp(z)

    @property
    def ratios(self):
        d = np.asarray(self.distances)
        return d[1:] / d[:-1]


def picard_oracle_right(alpha_weight: float = 5.0, domain_cap: float = 0.85, iterations: int = 200,
                        n: int = 4, nodes: int = 120, quad_nodes: int = 120, tol: float = 1e-15):
    """Fixed point of F[f](z) = 1 + (z^2/2n) int_0^1 (u - u^(2n+1)) phi(zu) f(zu) du.

    The eps = 0 right solution in z is z^n f(z).  f is represented on
    Chebyshev points of [0, a]; F is linear so one kernel matrix is
    assembled and iterated.  The contraction factor in the weighted norm
    sup |e^(-alpha z) f| is bounded by a sup|phi| / (2 n alpha).
    """
    a = float(domain_cap)
    if not 0 < a < 1:
        raise DomainError("domain cap must lie in (0, 1)")
    probe = np.linspace(0.0, a, 2001)
    c_a = float(np.max(np.abs(_phi0(probe))))
    bound = a * c_a / (2.0 * n * alpha_weight)
    if bound >= 1.0:
        raise ConvergenceError(f"no contraction for alpha = {alpha_weight}: factor {bound:.3f}; increase alpha")
    k = np.arange(nodes)
    z = 0.5 * a * (1.0 - np.cos(np.pi * k / (nodes - 1)))
    u, wu = np.polynomial.legendre.leggauss(quad_nodes)
    u = 0.5 * (u + 1.0)
    wu = 0.5 * wu
    pts = (z[:, None] * u[None, :]).ravel()
    interp = BarycentricInterpolator(z, np.eye(nodes))(pts).reshape(nodes, quad_nodes, nodes)
    weight = (u - u ** (2 * n + 1)) * wu
    kern = (z[:, None] ** 2 / (2.0 * n)) * weight[None, :] * _phi0(z[:, None] * u[None, :])
    mat = np.einsum("ij,ijk->ik", kern, interp)
    f = np.ones(nodes)
    distances = []
    w = np.exp(-alpha_weight * z)
    for it in range(1, iterations + 1):
        f_new = 1.0 + mat @ f
        dist = float(np.max(w * np.abs(f_new - f)))
        distances.append(dist)
        f = f_new
        if dist < tol:
            break
    else:
        raise ConvergenceError(f"Picard iteration did not reach {tol} in {iterations} steps")
    return PicardResult(n, z, f, alpha_weight, a, bound, distances, it)
