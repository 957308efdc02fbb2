"""Acceptance suite: one test per criterion, each printing a single PASS/FAIL line."""
import math
import time

import numpy as np
import pytest

from conftest import SWEEP_EPS
from vortex_modes import checks
from vortex_modes.cli import EXIT_OK, EXIT_SOLVER, main
from vortex_modes.kernels import KernelSpec, eval_kernel, kernel_trig_oracle
from vortex_modes.mode_assembly import difference_scaling_study
from vortex_modes.profiles import (LAMBDA0, SideCoefficient, VortexProfile, derivative_sup_norm,
                                   holder_distance)
from vortex_modes.radial_ode import (OdeProblem, integrate_radial, picard_oracle_right,
                                     second_solution, wronskian_report)

LOG2 = math.log(2.0)
WINDOW = (-LOG2 / 2, -(1 - LOG2) / 2)


@pytest.fixture
def report(capsys):
    def emit(number, title, ok, detail):
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {number}: {title} | {detail}")
        assert ok, detail
    return emit


def test_criterion_01_kernel_identity(report):
    t0 = time.perf_counter()
    worst = 0.0
    for n in range(1, 9):
        spec = KernelSpec(n)
        for r in (0.1, 0.5, 0.9, 1.1, 2.0, 5.0):
            worst = max(worst, abs(kernel_trig_oracle(spec, r) - float(eval_kernel(spec, r))))
    dt = time.perf_counter() - t0
    report(1, "kernel identity", worst < 1e-10 and dt < 5,
           f"max error {worst:.2e} (< 1e-10), {dt:.2f} s (< 5 s)")


def test_criterion_02_angular_velocity(report):
    t0 = time.perf_counter()
    worst_c = 0.0
    for eps in (0.0, 0.01, 0.05, 0.1):
        prof = VortexProfile(eps)
        for side, xs in (("left", np.linspace(0.05, 1.0, 10)), ("right", np.geomspace(1.0, 20.0, 10))):
            coef = SideCoefficient(side, eps)
            for x in xs:
                r = x * coef.scale
                worst_c = max(worst_c, abs(float(coef.value(x)) - checks.mass_quadrature_c(prof, r)))
    lam0 = max(abs(LAMBDA0 + float(SideCoefficient(s, 0.0).value(1.0))) for s in ("left", "right"))
    d_l = abs(checks.eps_difference("left") - (1 - LOG2) / 2)
    d_r = abs(checks.eps_difference("right") - LOG2 / 2)
    dt = time.perf_counter() - t0
    ok = worst_c < 1e-10 and lam0 < 1e-12 and max(d_l, d_r) < 1e-6 and dt < 10
    report(2, "angular velocity", ok,
           f"c vs quadrature {worst_c:.1e} (<1e-10, 80 points), lam0+c(1,0) {lam0:.1e} (<1e-12), "
           f"d_eps c_L {d_l:.1e} c_R {d_r:.1e} (<1e-6), {dt:.2f} s (< 10 s)")


def test_criterion_03_eps0_ode_suite(report):
    t0 = time.perf_counter()
    hl = integrate_radial(OdeProblem("left", 4, 0.0, LAMBDA0))
    hr = integrate_radial(OdeProblem("right", 4, 0.0, LAMBDA0))
    xl, xr = np.geomspace(1e-3, 1, 400), np.geomspace(1, 1e3, 400)
    positive = bool(np.all(hl.h(xl) > 0) and np.all(hr.h(xr) > 0))
    at_one = max(abs(hl.h(1.0) - 1), abs(hr.h(1.0) - 1))
    sup_l = float(np.max(xl ** -4 * hl.h(xl)))
    sup_r = float(np.max(xr ** 4 * hr.h(xr)))
    w_l = wronskian_report(hl, second_solution("left", 4), np.linspace(0.05, 0.999, 300))[0]
    w_r = wronskian_report(second_solution("right", 4), hr, np.linspace(1.001, 50, 300))[0]
    pic = picard_oracle_right()
    z = np.linspace(0.05, 0.8, 61)
    p_err = float(np.max(np.abs(pic.h(z) - hr.h(1 / z) * hr.norm)))
    dt = time.perf_counter() - t0
    ok = (positive and at_one < 1e-12 and np.isfinite(sup_l) and np.isfinite(sup_r)
          and max(w_l, w_r) < 1e-6 and p_err < 1e-7 and dt < 30)
    report(3, "eps = 0 ODE suite", ok,
           f"positive {positive}, |h(1)-1| {at_one:.0e}, sup x^-n h_L {sup_l:.3g}, sup x^n h_R {sup_r:.3g}, "
           f"Wronskian {max(w_l, w_r):.1e} (<1e-6), Picard {p_err:.1e} (<1e-7), {dt:.1f} s (< 30 s)")


def test_criterion_04_eigenvalue_window(report, sweep):
    rows, ok = [], True
    for eps in SWEEP_EPS:
        res = sweep[eps][0]
        lo, hi = res.bracket
        sign_change = res.det_at_ends[0] * res.det_at_ends[1] < 0
        inside = lo < res.lam.total < hi
        good = sign_change and inside and abs(res.det_at_root) < 1e-8 and res.lam.in_window()
        ok &= good
        rows.append(f"eps={eps:g}: slope {res.lam.lambda1:.5f}, |det| {abs(res.det_at_root):.0e}")
    dt = sweep["solve_seconds"]
    ok &= dt < 300
    report(4, "eigenvalue existence and window", ok,
           "; ".join(rows) + f"; window ({WINDOW[0]:.4f}, {WINDOW[1]:.4f}); solves {dt:.0f} s (< 300 s)")


def test_criterion_05_expansion_bounded(report, sweep, lambda1_ref):
    l2 = np.array([abs(sweep[e][0].lam.lambda2) for e in SWEEP_EPS])
    ratio = float(l2.max() / l2.min())
    diverging = bool(np.all(np.diff(l2) > 0) and l2[-1] > 2 * l2[0])
    ok = ratio < 10 and not diverging and l2.max() <= 50.0
    report(5, "lambda2 bounded", ok,
           f"|lambda2| = {', '.join(f'{v:.4f}' for v in l2)} (lambda1_ref {lambda1_ref:.6f}); "
           f"max/min {ratio:.2f} (< 10), monotone divergence {diverging}")


def test_criterion_06_end_to_end_residual(report, sweep):
    worst = {"left": 0.0, "right": 0.0, "physical": 0.0, "boundary": 0.0}
    for eps in SWEEP_EPS:
        rep = sweep[eps][1]
        worst["left"] = max(worst["left"], rep.left_max)
        worst["right"] = max(worst["right"], rep.right_max)
        worst["physical"] = max(worst["physical"], rep.physical_max)
        worst["boundary"] = max(worst["boundary"], rep.boundary_max)
    ok = max(worst.values()) < 1e-6 and not any(sweep[e][1].trivial for e in SWEEP_EPS)
    report(6, "end-to-end residual", ok,
           ", ".join(f"{k} {v:.1e}" for k, v in worst.items()) + " (all < 1e-6)")


def test_criterion_07_holder_proximity(report):
    sup, where = derivative_sup_norm()
    sup_ok = abs(sup - 3 * math.sqrt(3) / 8) < 1e-6
    cases, ok = [], sup_ok
    for eps in (0.1, 0.05):
        for alpha in (0.25, 0.5, 0.75):
            h = holder_distance(eps, alpha)
            good = h.norm <= h.bound
            ok &= good
            cases.append(f"({eps:g},{alpha:g}) {h.norm:.4f}{'<=' if good else '>'}{h.bound:.4f}"
                         f" [semi {h.seminorm:.4f}]")
    report(7, "Holder proximity (full norm = sup + seminorm)", ok,
           f"sup|w0'| {sup:.8f} at r={where:.6f}; " + "; ".join(cases))


def test_criterion_08_difference_scaling(report, sweep):
    rows = difference_scaling_study(4, SWEEP_EPS, results={e: sweep[e][0] for e in SWEEP_EPS})
    left = np.array([r.left_ratio for r in rows])
    right = np.array([r.right_ratio for r in rows])
    vl, vr = left.max() / left.min(), right.max() / right.min()
    report(8, "difference scaling", vl < 3 and vr < 3,
           f"left ratios {', '.join(f'{v:.3f}' for v in left)} (variation {vl:.2f}); "
           f"right ratios {', '.join(f'{v:.3f}' for v in right)} (variation {vr:.2f}); both < 3")


def test_criterion_09_negative_control(report, tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("VORTEX_MODES_OUT", str(tmp_path))
    code = main(["solve", "--eps", "0"])
    text = capsys.readouterr().out
    ok = code == EXIT_SOLVER and "empty" in text and "no periodic mode" in text
    report(9, "negative control at eps = 0", ok, f"exit code {code}, message: {text.strip()}")


def test_criterion_10_determinism(report, tmp_path, monkeypatch, capsys):
    eps = ",".join(str(e) for e in SWEEP_EPS)
    runs = []
    for k in range(2):
        out = tmp_path / f"run{k}"
        monkeypatch.setenv("VORTEX_MODES_OUT", str(out))
        assert main(["sweep", "--eps", eps]) == EXIT_OK
        runs.append({p.name: p.read_bytes() for p in sorted(out.iterdir())})
    capsys.readouterr()
    same = runs[0] == runs[1]
    kinds = sorted({name.split("_")[0] for name in runs[0]})
    report(10, "determinism", same and len(runs[0]) == 3 * len(SWEEP_EPS) + 1,
           f"{len(runs[0])} files ({', '.join(kinds)}) byte-identical across two sweeps: {same}")
