import json
import math

import numpy as np
import pytest

from conftest import SWEEP_EPS
from hypothesis import given, settings, strategies as st

from vortex_modes.eigensolver import (LAMBDA1_WINDOW, Lambda, _log_ratio_root, compute_I1, compute_I2,
                                      determinant, determinant_from, eigen_at, evaluate_determinant,
                                      harmonic, lambda1_leading, normalize_amplitudes, null_vector,
                                      q_factor, solve_lambda)
from vortex_modes.errors import BracketError, DomainError, NoEigenvalueError
from vortex_modes.profiles import LAMBDA0, lambda_bracket
from vortex_modes.radial_ode import OdeProblem, integrate_radial

LAMBDA_01 = 0.3303657303976851          # n = 4, eps = 0.1 regression baseline
LAMBDA1_N4 = -0.17918103321127912


@pytest.fixture(scope="module")
def mid_eval():
    lo, hi = lambda_bracket(0.1)
    return evaluate_determinant(0.5 * (lo + hi), 0.1, 4)


def test_trivial_determinants():
    assert determinant_from(0.0, 0.0, 0.1, 4) == 1.0
    # eps = 0 gives q = 1 and the product term drops out
    assert determinant_from(-0.3, 0.7, 0.0, 4) == pytest.approx(1 - 0.3 + 0.7)
    assert q_factor(0.0, 4) == 1.0
    assert q_factor(0.1, 4) == pytest.approx((0.95 / 1.05) ** 4)


def test_null_vector_triangular_case():
    # I2 = 0, 1 + I1 = 0: the first row vanishes and the second row gives B = q A
    q = q_factor(0.1, 4)
    assert null_vector(-1.0, 0.0, 0.1, 4) == pytest.approx((1.0, q))


@settings(max_examples=80)
@given(I1=st.floats(-5, 5), I2=st.floats(-5, 5), eps=st.floats(0, 0.15))
def test_null_vector_annihilates_pivot_row(I1, I2, eps):
    # the two rows never vanish together: 1 + I1 = 0 forces the (2, 1) entry q I1 = -q
    q = q_factor(eps, 4)
    A, B = null_vector(I1, I2, eps, 4)
    rows = [(1 + I1, q * I2), (q * I1, 1 + I2)]
    pivot = rows[0] if abs(1 + I1) >= abs(1 + I2) else rows[1]
    if max(abs(v) for v in pivot) > 1e-300:
        assert abs(pivot[0] * A + pivot[1] * B) < 1e-12 * (1 + abs(I1) + abs(I2))


@settings(max_examples=60)
@given(A=st.floats(-1e3, 1e3), B=st.floats(-1e3, 1e3), k=st.floats(1e-3, 1e3))
def test_normalize_scale_invariant(A, B, k):
    if max(abs(A), abs(B)) < 1e-6:
        return
    a = normalize_amplitudes(A, B)
    b = normalize_amplitudes(k * A, k * B)
    c = normalize_amplitudes(-A, -B)
    assert a == pytest.approx(b, rel=1e-12, abs=1e-15)
    assert a == pytest.approx(c, rel=1e-12, abs=1e-15)
    assert max(abs(v) for v in a) == pytest.approx(1.0)
    assert max(a, key=abs) > 0


def test_integral_signs(mid_eval):
    assert mid_eval.I1 < 0
    assert mid_eval.I2 > 0


def test_zero_derivative_hook(mid_eval):
    zero = lambda r: 0.0 * np.asarray(r)
    assert compute_I1(mid_eval.h_L, mid_eval.lam, 0.1, 4, derivative=zero) == 0.0
    assert compute_I2(mid_eval.h_R, mid_eval.lam, 0.1, 4, derivative=zero) == 0.0


def test_tail_truncation(mid_eval):
    a = compute_I2(mid_eval.h_R, mid_eval.lam, 0.1, 4, upper=1e3)
    b = compute_I2(mid_eval.h_R, mid_eval.lam, 0.1, 4, upper=1e6)
    full = compute_I2(mid_eval.h_R, mid_eval.lam, 0.1, 4)
    assert abs(a - b) < 1e-10
    assert abs(full - b) < 1e-10


def test_bracket_guards(mid_eval):
    lo, hi = lambda_bracket(0.1)
    with pytest.raises(BracketError):
        compute_I1(mid_eval.h_L, hi + 1e-3, 0.1, 4)
    with pytest.raises(BracketError):
        compute_I2(mid_eval.h_R, lo - 1e-3, 0.1, 4)


@pytest.mark.parametrize("eps", [0.05, 0.1])
def test_determinant_changes_sign_across_bracket(eps):
    lo, hi = lambda_bracket(eps)
    w = hi - lo
    a, b = determinant(lo + 1e-4 * w, eps, 4), determinant(hi - 1e-4 * w, eps, 4)
    assert a * b < 0


def test_determinant_continuous(mid_eval):
    lam = mid_eval.lam
    w = np.diff(lambda_bracket(0.1))[0]
    assert abs(determinant(lam + 1e-7 * w, 0.1, 4) - mid_eval.value) < 1e-4


def test_solve_regression_and_window(solved_01):
    res = solved_01
    assert res.lam.total == pytest.approx(LAMBDA_01, abs=1e-10)
    assert res.lam.in_window()
    assert abs(res.det_at_root) < 1e-8
    assert res.bracket[0] < res.lam.total < res.bracket[1]
    assert res.det_at_ends[0] * res.det_at_ends[1] < 0


def test_rank_one_consistency(solved_01):
    A, B = solved_01.amplitudes
    q = solved_01.q_factor
    r1 = (1 + solved_01.I1) * A + q * solved_01.I2 * B
    r2 = q * solved_01.I1 * A + (1 + solved_01.I2) * B
    assert abs(r1) < 1e-8 * max(abs(A), abs(B))
    assert abs(r2) < 1e-8 * max(abs(A), abs(B))


def test_root_is_simple(solved_01):
    lam = solved_01.lam.total
    w = solved_01.bracket[1] - solved_01.bracket[0]
    d = 1e-4 * w
    a, b = determinant(lam - d, 0.1, 4), determinant(lam + d, 0.1, 4)
    assert a * b < 0
    assert abs(b - a) / (2 * d) > 1.0


def test_distinct_modes_for_n_and_n_plus_2(solved_01):
    res6 = solve_lambda(0.1, 6)
    assert res6.bracket[0] < res6.lam.total < res6.bracket[1]
    assert abs(res6.lam.total - solved_01.lam.total) > 1e-4


def test_result_serialises(solved_01):
    d = solved_01.to_dict()
    json.dumps(d)
    assert d["lambda"]["total"] == solved_01.lam.total


def test_eigen_at_off_root(solved_01):
    lo, hi = solved_01.bracket
    res = eigen_at(solved_01.lam.total - 0.1 * (hi - lo), 0.1)
    assert abs(res.det_at_root) > 1e-3
    assert max(abs(v) for v in res.row_residuals) > 1e-3


def test_solver_input_errors():
    with pytest.raises(NoEigenvalueError):
        solve_lambda(0.0)
    with pytest.raises(DomainError):
        solve_lambda(0.1, n=1)


def test_lambda_fit_fields():
    lam = Lambda(LAMBDA0 - 0.1 * 0.2, 0.1, lambda1_ref=-0.2)
    assert lam.lambda1 == pytest.approx(-0.2)
    assert lam.lambda2 == pytest.approx(0.0, abs=1e-12)
    assert lam.in_window()
    assert Lambda(0.3, 0.1).lambda2 is None


# ------------------------------------------------------ leading order ---

def test_lambda1_leading_frozen():
    rep = lambda1_leading(4)
    assert rep.lambda1 == pytest.approx(LAMBDA1_N4, abs=1e-9)
    assert rep.in_window()
    assert rep.harmonic_component == pytest.approx(25 / 12, abs=1e-12)
    assert harmonic(4) == pytest.approx(25 / 12)


@pytest.mark.parametrize("n", [2, 3, 6])
def test_lambda1_in_window_other_n(n):
    rep = lambda1_leading(n)
    assert LAMBDA1_WINDOW[0] < rep.lambda1 < LAMBDA1_WINDOW[1]


@settings(max_examples=80)
@given(const=st.floats(-50, 50), coef=st.sampled_from([-1.0, -0.3, 0.3, 1.0]))
def test_log_ratio_root_is_a_bijection(const, coef):
    lam1 = _log_ratio_root(const, coef)
    lo, hi = LAMBDA1_WINDOW
    assert lo <= lam1 <= hi
    # beyond |L| ~ 30 the root sits within rounding of a window edge
    if abs(const / coef) < 30:
        mu_l, mu_r = lam1 + 0.5 * (1 - math.log(2)), lam1 + 0.5 * math.log(2)
        # rounding in lam1 is amplified by d/dlam1 log(-mu_l/mu_r) = 1/mu_l - 1/mu_r
        tol = 1e-12 + 1e-15 * abs(coef) * (1 / abs(mu_l) + 1 / mu_r)
        assert abs(const + coef * math.log(-mu_l / mu_r)) < tol


def test_leading_order_is_the_small_eps_limit():
    # 1 + I1 + I2 at lam0 + eps lam1 must vanish as eps -> 0; the variant closed form does not
    rep = lambda1_leading(4)
    vals = []
    for eps in (1e-4, 1e-5, 1e-6):
        ev = evaluate_determinant(LAMBDA0 + eps * rep.lambda1, eps, 4)
        vals.append(abs(1 + ev.I1 + ev.I2))
    assert vals[0] > vals[1] > vals[2]
    assert vals[2] < 1e-3
    ev = evaluate_determinant(LAMBDA0 + 1e-6 * rep.variant_lambda1, 1e-6, 4)
    assert abs(1 + ev.I1 + ev.I2) > 0.05


def test_fitted_slopes_approach_leading_order(sweep):
    gaps = [abs(sweep[e][0].lam.lambda1 - LAMBDA1_N4) for e in SWEEP_EPS]
    assert all(a > b for a, b in zip(gaps, gaps[1:]))
    for e in SWEEP_EPS:
        assert abs(sweep[e][0].lam.lambda1 - LAMBDA1_N4) < e * math.log(e) ** 2


def test_log_ratio_root_monotone():
    roots = [_log_ratio_root(c, 1.0) for c in np.linspace(-20, 20, 81)]
    assert np.all(np.diff(roots) > 0)
