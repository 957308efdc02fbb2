import json
import xml.etree.ElementTree as ET

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from vortex_modes import checks, kernels
from vortex_modes.cli import EXIT_CHECK, EXIT_CONFIG, EXIT_OK, EXIT_SOLVER, lambda2_summary, main
from vortex_modes.config import RunConfig, from_mapping, load_config, parse_text
from vortex_modes.errors import ConfigError
from vortex_modes.output import csv_text, json_text, line_plot, nice_ticks, polar_heatmap


@pytest.fixture
def out(tmp_path, monkeypatch):
    monkeypatch.setenv("VORTEX_MODES_OUT", str(tmp_path / "out"))
    return tmp_path / "out"


# ---------------------------------------------------------------- config ---

@settings(max_examples=40)
@given(n=st.integers(2, 12), eps=st.lists(st.floats(0.0, 0.15), min_size=1, max_size=5),
       alpha=st.floats(0.01, 0.99), tol=st.floats(1e-14, 1e-6))
def test_config_round_trip(n, eps, alpha, tol):
    cfg = RunConfig(n=n, epsilon=tuple(eps), alpha=alpha, quad_rtol=tol)
    assert parse_text(cfg.to_text()) == cfg
    assert from_mapping(json.loads(cfg.to_json())) == cfg
    assert parse_text(cfg.to_text()).hash == cfg.hash


def test_config_rejects_unknown_and_bad_values(tmp_path):
    with pytest.raises(ConfigError):
        parse_text("[model]\nn = 4\nbogus = 1\n")
    with pytest.raises(ConfigError):
        parse_text("[extras]\nx = 1\n")
    with pytest.raises(ConfigError):
        from_mapping({"nope": 1})
    with pytest.raises(ConfigError):
        RunConfig(n=1)
    with pytest.raises(ConfigError):
        RunConfig(epsilon=(0.3,))
    with pytest.raises(ConfigError):
        RunConfig(alpha=1.0)
    with pytest.raises(ConfigError):
        from_mapping({"n": 4.5})
    p = tmp_path / "c.json"
    p.write_text('{"n": 4, ')
    with pytest.raises(ConfigError):
        load_config(p)


def test_hash_ignores_output_dir():
    a = RunConfig(output_dir="x")
    assert a.hash == RunConfig(output_dir="y").hash
    assert a.hash != RunConfig(n=6).hash


def test_load_config_both_formats(tmp_path):
    cfg = RunConfig(n=6, epsilon=(0.1, 0.05))
    (tmp_path / "a.cfg").write_text(cfg.to_text())
    (tmp_path / "a.json").write_text(cfg.to_json())
    assert load_config(tmp_path / "a.cfg") == cfg
    assert load_config(tmp_path / "a.json") == cfg


# ---------------------------------------------------------------- output ---

def test_json_and_csv_headers():
    j = json.loads(json_text("eigen", {"x": np.float64(0.1), "bad": float("nan")}, "abc"))
    assert j["schema"] == "vortex_modes.eigen/1" and j["config_hash"] == "abc"
    assert j["x"] == 0.1 and j["bad"] is None
    text = csv_text("mode", {"r": [0.1, 1 / 3]}, {"epsilon": 0.1}, "abc")
    lines = text.splitlines()
    assert lines[1] == "# config_hash: abc" and lines[2] == "# epsilon: 0.1"
    assert float(lines[-1]) == 1 / 3


def test_svg_deterministic_and_well_formed():
    x = np.linspace(0, 1, 50)
    curves = [(x, x ** 2, "#000000", "a"), (x, np.where(x > 0.5, np.nan, x), "#ff0000", "b")]
    a = line_plot(curves, "x", "y", "t", band=(0.2, 0.3, "#00ff00"), markers=[(0.5, 0.25, "#0000ff", "m")])
    assert a == line_plot(curves, "x", "y", "t", band=(0.2, 0.3, "#00ff00"),
                          markers=[(0.5, 0.25, "#0000ff", "m")])
    ET.fromstring(a)
    r, th = np.meshgrid(np.linspace(0, 2, 5), np.linspace(0, 6, 8), indexing="ij")
    h = polar_heatmap(r.ravel(), th.ravel(), (r * np.cos(th)).ravel(), "h")
    assert h == polar_heatmap(r.ravel(), th.ravel(), (r * np.cos(th)).ravel(), "h")
    ET.fromstring(h)


def test_nice_ticks():
    assert nice_ticks(0, 1) == pytest.approx([0, 0.2, 0.4, 0.6, 0.8, 1.0])
    assert nice_ticks(1, 1) == [1]


# ------------------------------------------------------------------- cli ---

def test_check_passes(capsys):
    assert main(["check"]) == EXIT_OK
    assert "all checks passed" in capsys.readouterr().out


def test_check_json(capsys):
    assert main(["check", "--json"]) == EXIT_OK
    rep = json.loads(capsys.readouterr().out)
    assert rep["passed"] and len(rep["checks"]) == len(checks.ALL_CHECKS)


def test_check_catches_flipped_kernel_branch(monkeypatch, capsys):
    good = kernels.eval_kernel

    def flipped(spec, r):
        r = np.asarray(r, dtype=float)
        return np.where(r > 1, 0.5 * r ** (spec.n - 1), good(spec, r))

    monkeypatch.setattr(kernels, "eval_kernel", flipped)
    assert main(["check"]) == EXIT_CHECK
    text = capsys.readouterr().out
    assert "FAIL  kernel identity" in text


def test_crashing_check_is_a_failure(monkeypatch):
    def boom(*a, **k):
        raise RuntimeError("broken")

    monkeypatch.setattr(checks, "ALL_CHECKS", (boom,))
    res = checks.run_checks()
    assert not res[0].passed and "broken" in res[0].detail


def test_solve_eps0_reports_no_mode(out, capsys):
    assert main(["solve", "--eps", "0"]) == EXIT_SOLVER
    text = capsys.readouterr().out
    assert "bracket" in text and "empty" in text and "no periodic mode" in text
    assert not any(out.glob("eigen_*.json")) if out.exists() else True


def test_config_errors_exit_3(tmp_path, out, capsys):
    assert main(["solve", "--eps", "0.5"]) == EXIT_CONFIG
    assert main(["solve", "--eps", "abc"]) == EXIT_CONFIG
    bad = tmp_path / "bad.cfg"
    bad.write_text("[model]\ncolour = red\n")
    assert main(["sweep", "--config", str(bad)]) == EXIT_CONFIG
    assert main(["solve", "--jobs", "0"]) == EXIT_CONFIG


def test_solve_writes_outputs(out, capsys):
    assert main(["solve", "--eps", "0.1", "--n", "4"]) == EXIT_OK
    cfg_hash = RunConfig(epsilon=(0.1,)).hash
    eig = json.loads((out / "eigen_0.1.json").read_text())
    res = json.loads((out / "residuals_0.1.json").read_text())
    assert eig["config_hash"] == cfg_hash and res["config_hash"] == cfg_hash
    assert eig["lambda"]["total"] == pytest.approx(0.3303657303976851, abs=1e-10)
    assert res["passed"] and res["left_max"] < 1e-6
    csv = (out / "mode_0.1.csv").read_text().splitlines()
    assert f"# config_hash: {cfg_hash}" in csv and csv[csv.index("r,h_n,W_n") - 1].startswith("# B")


def test_profile_dump(tmp_path, capsys):
    assert main(["profile", "--eps", "0.1"]) == EXIT_OK
    text = capsys.readouterr().out
    assert text.startswith("# schema: vortex_modes.profile/1")
    path = tmp_path / "p.csv"
    assert main(["profile", "--eps", "0.1", "--dump", str(path)]) == EXIT_OK
    assert path.read_text() == text


def test_figures(out, capsys):
    assert main(["figures", "--eps", "0.1"]) == EXIT_OK
    for name in ("profiles.svg", "c_gap.svg", "c_gap_zoom.svg", "mode_heatmap.svg"):
        ET.fromstring((out / name).read_text())


def test_lambda2_summary():
    rows = [{"ok": True, "epsilon": e, "eigen": {"lambda": {"total": 0.3, "lambda1_fit": -0.2,
                                                            "lambda2_fit": l2}}}
            for e, l2 in ((0.1, 0.03), (0.05, 0.02))]
    s = lambda2_summary(rows + [{"ok": False}], 50.0)
    assert s["bounded"] and s["ratio"] == pytest.approx(1.5)
    s = lambda2_summary(rows, 0.025)
    assert not s["bounded"]
