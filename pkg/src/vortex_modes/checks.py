"""Fast invariant suite behind ``vortex-modes check``.

Each check returns the achieved error and the tolerance it is held to.
Functions are looked up through their modules at call time so a test can
swap one out and watch the corresponding check fail.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from . import kernels, profiles, radial_ode
from .numerics import QuadratureSpec, adaptive_quad

KERNEL_RADII = (0.2, 0.5, 0.9, 1.1, 2.0, 5.0)


@dataclass(frozen=True)
class CheckResult:
    name: str
    achieved: float
    required: float
    detail: str = ""

    @property
    def passed(self):
        return bool(np.isfinite(self.achieved) and self.achieved <= self.required)

    def to_dict(self):
        return {**asdict(self), "passed": self.passed}


def check_kernel_identity(tol=1e-10):
    worst = 0.0
    for n in range(1, 9):
        spec = kernels.KernelSpec(n)
        for r in KERNEL_RADII:
            quad = kernels.kernel_trig_oracle(spec, r)
            worst = max(worst, abs(quad - float(kernels.eval_kernel(spec, r))))
    return CheckResult("kernel identity K_n", worst, tol, "n = 1..8, 6 radii")


def mass_quadrature_c(profile, r):
    """-(1/r^2) int_0^r s w_eps(s) ds by quadrature, split at the plateau edges."""
    cuts = sorted({0.0, r} | {p for p in (profile.inner, profile.outer) if 0 < p < r})
    spec = QuadratureSpec(rel_tol=1e-14, abs_tol=1e-16)
    total = sum(adaptive_quad(lambda s: s * profile.value(s), (u, v), spec)[0]
                for u, v in zip(cuts[:-1], cuts[1:]))
    return -total / (r * r)


def check_c_closed_form(eps_values=(0.0, 0.1), n_points=6, tol=1e-10):
    worst = 0.0
    for eps in eps_values:
        prof = profiles.VortexProfile(eps)
        for side, xs in (("left", np.linspace(0.05, 1.0, n_points)),
                         ("right", np.geomspace(1.0, 20.0, n_points))):
            coef = profiles.SideCoefficient(side, eps)
            for x in xs:
                r = x * coef.scale
                worst = max(worst, abs(float(coef.value(x)) - mass_quadrature_c(prof, r)))
    return CheckResult("closed-form c_L, c_R", worst, tol, f"eps in {list(eps_values)}")


def check_lambda0(tol=1e-12):
    v = max(abs(profiles.LAMBDA0 + float(profiles.SideCoefficient(s, 0.0).value(1.0)))
            for s in ("left", "right"))
    return CheckResult("lam0 + c(1, 0) = 0", v, tol)


def eps_difference(side, h=1e-4):
    """Forward difference in eps at x = 1 with one Richardson step (error O(h^2))."""
    c = lambda e: float(profiles.SideCoefficient(side, e).value(1.0))
    c0 = c(0.0)
    d1, d2 = (c(h) - c0) / h, (c(h / 2) - c0) / (h / 2)
    return 2.0 * d2 - d1


def check_eps_derivative(tol=1e-6):
    want = {"left": 0.5 * (1 - np.log(2.0)), "right": 0.5 * np.log(2.0)}
    worst = 0.0
    for side, target in want.items():
        worst = max(worst, abs(eps_difference(side) - target))
    return CheckResult("d/deps c(1, 0) by differences", worst, tol)


def check_angular_identity(tol=1e-9):
    worst = 0.0
    for eps in (0.0, 0.1):
        prof = profiles.VortexProfile(eps)
        for r in (0.3, 0.9, 1.2, 3.0):
            worst = max(worst, kernels.angular_velocity_identity(prof, r, tol=np.inf).difference)
    return CheckResult("int w' K_1(r/s) ds = c(r)", worst, tol)


def check_wronskian(n=4, tol=1e-6):
    worst = 0.0
    for side in ("left", "right"):
        h = radial_ode.integrate_radial(radial_ode.OdeProblem(side, n, 0.0, profiles.LAMBDA0))
        g = radial_ode.second_solution(side, n)
        a, b = (h, g) if side == "left" else (g, h)
        worst = max(worst, radial_ode.wronskian_report(a, b)[0])
    return CheckResult("eps = 0 Wronskian x W = 1", worst, tol, f"n = {n}")


def check_picard(n=4, tol=1e-7):
    pic = radial_ode.picard_oracle_right(n=n)
    h = radial_ode.integrate_radial(radial_ode.OdeProblem("right", n, 0.0, profiles.LAMBDA0))
    z = np.linspace(0.05, 0.8, 61)
    diff = float(np.max(np.abs(pic.h(z) - h.h(1.0 / z) * h.norm)))
    return CheckResult("Picard oracle vs shooting", diff, tol, "z in [0.05, 0.8]")


ALL_CHECKS = (check_kernel_identity, check_c_closed_form, check_lambda0, check_eps_derivative,
              check_angular_identity, check_wronskian, check_picard)


def run_checks():
    out = []
    for fn in ALL_CHECKS:
        try:
            out.append(fn())
        except Exception as exc:  # a crash is a failed check, reported with its reason
            out.append(CheckResult(fn.__name__.replace("check_", ""), float("inf"), 0.0,
                                   f"{type(exc).__name__}: {exc}"))
    return out
