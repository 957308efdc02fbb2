import numpy as np
import pytest

from conftest import SWEEP_EPS

from vortex_modes.eigensolver import eigen_at
from vortex_modes.errors import AssemblyError, DomainError
from vortex_modes.mode_assembly import (CollocationSpec, assemble_mode, difference_scaling_study,
                                        figure_data, r_star, verify_integral_equations)
from vortex_modes.profiles import LAMBDA0, VortexProfile
from vortex_modes.radial_ode import OdeProblem, integrate_radial


@pytest.fixture(scope="module")
def mode01(solved_01):
    return assemble_mode(solved_01)


@pytest.fixture(scope="module")
def report01(sweep):
    return sweep[0.1][1]


@pytest.fixture(scope="module")
def perturbed01(solved_01):
    lo, hi = solved_01.bracket
    # +10% of the width falls outside the bracket at eps = 0.1, so step down instead
    res = eigen_at(solved_01.lam.total - 0.1 * (hi - lo), 0.1)
    return res, verify_integral_equations(assemble_mode(res))


def test_plateau_is_zero(mode01):
    r = np.linspace(0.951, 1.049, 40)
    assert np.all(mode01.W_n(r) == 0.0)
    with pytest.raises(DomainError):
        mode01.h_n(1.0)


def test_far_field_decay(mode01):
    r = 2.0 ** np.arange(1, 11)
    w = np.abs(mode01.W_n(r))
    bound = w * r ** (mode01.n + 3)
    assert np.all(np.isfinite(bound)) and np.all(np.diff(bound) < 0)
    # h_n carries an extra 1/r from f*, so the actual rate is one power faster
    sharp = w * r ** (mode01.n + 4)
    assert abs(sharp[-1] / sharp[-2] - 1) < 0.01


def test_time_periodic(mode01):
    r, th = np.array([0.5, 2.0]), np.array([0.1, 1.3])
    T = mode01.period
    np.testing.assert_allclose(mode01.field(r, th, 0.37 + T), mode01.field(r, th, 0.37), atol=1e-12)


def test_mode_needs_n_at_least_two(solved_01):
    res = solved_01
    from vortex_modes.mode_assembly import ModeField
    with pytest.raises(AssemblyError):
        ModeField(0.1, 1, res.lam.total, res.amplitudes, res.h_L, res.h_R)


def test_residuals_at_root(report01):
    r = report01
    assert r.passed(1e-6)
    assert max(r.left_max, r.right_max, r.physical_max) < 1e-6
    assert r.boundary_max < 1e-6
    assert r.relation_max < 1e-6
    assert r.cross_check_max < 1e-8
    assert r.physical_radii.size == 30


def test_literal_w_form_lacks_profile_factor(report01):
    # the residual without the w_eps'(r) factor on the integral term is O(1)
    assert report01.physical_literal_max > 0.1


def test_residuals_grow_off_root(report01, perturbed01):
    _, bad = perturbed01
    base = max(report01.left_max, report01.physical_max, report01.boundary_max)
    worst = max(bad.left_max, bad.physical_max, bad.boundary_max)
    assert worst >= 10 * base
    assert abs(bad.N_L_at_1) > 1e-3 or abs(bad.N_R_at_1) > 1e-3
    assert not bad.passed(1e-6)


def test_trivial_solution_flagged(solved_01):
    mode = assemble_mode(solved_01, amplitudes=(0.0, 0.0))
    rep = verify_integral_equations(mode)
    assert rep.trivial and not rep.passed()
    assert rep.to_dict()["trivial"] is True


def test_collocation_layer():
    cs = CollocationSpec()
    assert cs.layer_width(0.1) == pytest.approx(0.005)
    assert cs.layer_width(1e-4) == 1e-4
    assert np.max(cs.left_grid(0.1)) == pytest.approx(1 - 0.005)
    assert np.min(cs.right_grid(0.1)) == pytest.approx(1 + 0.005)


def test_difference_study(sweep):
    eps = list(SWEEP_EPS)
    results = {e: sweep[e][0] for e in eps}
    rows = difference_scaling_study(4, eps, results=results)
    assert [r.epsilon for r in rows] == eps
    for col in ("left_ratio", "right_ratio"):
        vals = np.array([getattr(r, col) for r in rows])
        assert vals.max() / vals.min() < 3
    with pytest.raises(DomainError):
        difference_scaling_study(4, [0.05, 0.1], results=results)


def test_difference_vanishes_pointwise(sweep):
    h0 = integrate_radial(OdeProblem("right", 4, 0.0, LAMBDA0))
    diffs = [abs(sweep[e][0].h_R.h(2.0) - h0.h(2.0)) for e in SWEEP_EPS]
    assert all(a > b for a, b in zip(diffs, diffs[1:]))


def test_figure_profiles_plateau():
    d = figure_data("profiles", epsilon=0.1)
    r, v = d.columns["r"], d.columns["perturbed"]
    on = (r > 0.95) & (r < 1.05)
    assert on.any() and np.ptp(v[on]) == 0.0


def test_figure_c_gap():
    d = figure_data("c_gap", epsilon=0.05, zoom=True)
    r, c, br = d.columns["r"], d.columns["c"], d.columns["branch"]
    assert np.all(np.diff(c) > 0)
    assert c[br == 1].min() - c[br == 0].max() > 0
    m = d.meta
    assert m["band_lo"] < -m["lambda_star"] < m["band_hi"]
    assert VortexProfile(0.05).inner < m["r_star"] < VortexProfile(0.05).outer
    assert float(VortexProfile(0.05).c(m["r_star"])) == pytest.approx(-m["lambda_star"], abs=1e-12)


def test_r_star_on_plateau():
    lam = 0.5 * sum(np.array([0.33, 0.331]))
    lo, hi = VortexProfile(0.1).inner, VortexProfile(0.1).outer
    assert lo < r_star(lam, 0.1) < hi


def test_figure_mode_heatmap_has_zero_angular_mean(mode01):
    d = figure_data("mode", mode=mode01)
    hm = d.heatmap
    vals = hm["value"].reshape(-1, 64)
    assert np.max(np.abs(vals.mean(axis=1))) < 1e-14
    assert d.meta["lambda"] == mode01.lam
    with pytest.raises(DomainError):
        figure_data("mode")
    with pytest.raises(DomainError):
        figure_data("nothing")
