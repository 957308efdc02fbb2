"""Command-line driver: check, solve, sweep, figures, profile."""
from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from .checks import run_checks
from .config import OUT_ENV, RunConfig, load_config
from .errors import ConfigError, NoEigenvalueError, VortexModesError
from .output import (_plain, csv_text, eps_tag, json_text, line_plot, polar_heatmap, write_csv,
                     write_json)

EXIT_OK, EXIT_CHECK, EXIT_SOLVER, EXIT_CONFIG = 0, 1, 2, 3
RESIDUAL_GATE = 1e-6

NO_MODE_MESSAGE = ("eps = 0: the rotation-speed bracket (-c_R(1,0), -c_L(1,0)) is empty, both ends "
                   "equal log(2)/2. The profile is strictly monotone, so no periodic mode exists.")


def _mode_columns(mode):
    a, b = mode.inner, mode.outer
    r = np.concatenate([np.linspace(0.0, a, 201)[1:], b * np.geomspace(1.0, 20.0, 200)])
    return {"r": r, "h_n": mode.h_n(r), "W_n": mode.W_n(r)}


def solve_one(eps, cfg: RunConfig, lambda1_ref):
    """Full pipeline at one eps; returns plain data so it can cross processes."""
    from .eigensolver import solve_lambda
    from .mode_assembly import assemble_mode, verify_integral_equations

    if eps == 0.0:
        return {"epsilon": eps, "ok": False, "no_mode": True, "error": NO_MODE_MESSAGE}
    try:
        res = solve_lambda(eps, cfg.n, tol=cfg.root_tol, lambda1_ref=lambda1_ref, eps0=cfg.eps0,
                           ode_rtol=cfg.ode_rtol, quad_rtol=cfg.quad_rtol)
        mode = assemble_mode(res)
        report = verify_integral_equations(mode)
        res.residual_report = report
    except NoEigenvalueError as exc:
        return {"epsilon": eps, "ok": False, "no_mode": True, "error": str(exc)}
    except VortexModesError as exc:
        return {"epsilon": eps, "ok": False, "no_mode": False,
                "error": f"{type(exc).__name__}: {exc}"}
    residuals = {**report.to_dict(), "gate": RESIDUAL_GATE, "passed": report.passed(RESIDUAL_GATE)}
    return {"epsilon": eps, "ok": True, "eigen": res.to_dict(), "residuals": residuals,
            "mode": _mode_columns(mode),
            "mode_meta": {"epsilon": eps, "n": cfg.n, "lambda": res.lam.total,
                          "A": res.amplitudes[0], "B": res.amplitudes[1]}}


def _run(cfg: RunConfig, jobs: int):
    from .eigensolver import lambda1_leading

    lambda1_ref = lambda1_leading(cfg.n).lambda1
    eps_list = list(cfg.epsilon)
    if jobs > 1 and len(eps_list) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(solve_one, eps_list, [cfg] * len(eps_list),
                                    [lambda1_ref] * len(eps_list)))
    else:
        results = [solve_one(e, cfg, lambda1_ref) for e in eps_list]
    return lambda1_ref, results


def _write_results(cfg: RunConfig, results, out: Path):
    h = cfg.hash
    written = []
    for item in results:
        if not item["ok"]:
            continue
        tag = eps_tag(item["epsilon"])
        written.append(write_json(out / f"eigen_{tag}.json", "eigen", item["eigen"], h))
        written.append(write_csv(out / f"mode_{tag}.csv", "mode", item["mode"], item["mode_meta"], h))
        written.append(write_json(out / f"residuals_{tag}.json", "residuals", item["residuals"], h))
    return written


def lambda2_summary(results, bound):
    rows = [(r["epsilon"], r["eigen"]["lambda"]["total"], r["eigen"]["lambda"]["lambda1_fit"],
             r["eigen"]["lambda"]["lambda2_fit"]) for r in results if r["ok"]]
    l2 = np.array([abs(r[3]) for r in rows if r[3] is not None])
    summary = {"rows": [{"epsilon": e, "lambda": l, "lambda1_fit": l1, "lambda2_fit": l2_}
                        for e, l, l1, l2_ in rows]}
    if l2.size:
        ratio = float(l2.max() / l2.min()) if l2.min() > 0 else float("inf")
        summary.update(max_abs_lambda2=float(l2.max()), ratio=ratio, bound=bound,
                       bounded=bool(l2.max() <= bound and ratio < 10.0))
    return summary


def _report(results, out_stream):
    code = EXIT_OK
    for item in results:
        eps = item["epsilon"]
        if not item["ok"]:
            print(f"eps = {eps:g}: {item['error']}" if not item["error"].startswith("eps = 0")
                  else item["error"], file=out_stream)
            code = EXIT_SOLVER
            continue
        lam = item["eigen"]["lambda"]
        res = item["residuals"]
        flag = "ok" if res["passed"] else "RESIDUAL ABOVE GATE"
        print(f"eps = {eps:g}: lambda = {lam['total']:.15g}  lambda1 fit = {lam['lambda1_fit']:.6f}  "
              f"max residual = {max(res['left_max'], res['right_max'], res['physical_max'], res['boundary_max']):.2e}  "
              f"[{flag}]", file=out_stream)
        if not res["passed"]:
            code = EXIT_SOLVER
    return code


# ------------------------------------------------------------- commands ---

def cmd_check(args):
    results = run_checks()
    ok = all(r.passed for r in results)
    if args.json:
        print(json.dumps(_plain({"passed": ok, "checks": [r.to_dict() for r in results]}),
                         indent=2, sort_keys=True))
    else:
        width = max(len(r.name) for r in results)
        for r in results:
            status = "PASS" if r.passed else "FAIL"
            print(f"{status}  {r.name:<{width}}  achieved {r.achieved:.3e}  required {r.required:.1e}"
                  + (f"  ({r.detail})" if r.detail else ""))
        print("all checks passed" if ok else "some checks FAILED")
    return EXIT_OK if ok else EXIT_CHECK


def cmd_solve(args, cfg: RunConfig, sweep=False):
    out = cfg.resolved_output_dir()
    lambda1_ref, results = _run(cfg, args.jobs)
    _write_results(cfg, results, out)
    code = _report(results, sys.stdout)
    if sweep:
        summary = lambda2_summary(results, cfg.lambda2_bound)
        summary["lambda1_ref"] = lambda1_ref
        write_json(out / "sweep_summary.json", "sweep", summary, cfg.hash)
        if "bounded" in summary:
            print(f"lambda2 fit: max |lambda2| = {summary['max_abs_lambda2']:.4g}, "
                  f"max/min ratio = {summary['ratio']:.3g}, bound M = {cfg.lambda2_bound:g}: "
                  f"{'bounded' if summary['bounded'] else 'NOT bounded'}")
    print(f"outputs in {out}")
    return code


def cmd_figures(args, cfg: RunConfig):
    from .eigensolver import solve_lambda
    from .mode_assembly import assemble_mode, figure_data

    out = cfg.resolved_output_dir()
    out.mkdir(parents=True, exist_ok=True)
    eps = next((e for e in cfg.epsilon if e > 0), 0.1)
    prof = figure_data("profiles", epsilon=eps)
    c = prof.columns
    (out / "profiles.svg").write_text(line_plot(
        [(c["r"], c["base"], "#1f4e9c", "w0(r) = 1/(1+r^2)"),
         (c["r"], c["perturbed"], "#c0392b", f"w_eps(r), eps = {eps:g}")],
        "r", "vorticity", f"Radial profiles, eps = {eps:g}"))
    gap_eps = min(eps, 0.01) if args.gap_eps is None else args.gap_eps
    for name, zoom in (("c_gap.svg", False), ("c_gap_zoom.svg", True)):
        d = figure_data("c_gap", epsilon=gap_eps, zoom=zoom)
        r, cv, br = d.columns["r"], d.columns["c"], d.columns["branch"]
        m = d.meta
        (out / name).write_text(line_plot(
            [(r[br == 0], cv[br == 0], "#1f4e9c", "c(r), r < 1 - eps/2"),
             (r[br == 1], cv[br == 1], "#c0392b", "c(r), r > 1 + eps/2")],
            "r", "c(r)", f"c(r) for eps = {gap_eps:g}" + (", zoom at r = 1" if zoom else ""),
            band=(m["band_lo"], m["band_hi"], "#2e8b57"),
            markers=[(m["r_star"], -m["lambda_star"], "#2e8b57", "r*")]))
    res = solve_lambda(eps, cfg.n, tol=cfg.root_tol, eps0=cfg.eps0, ode_rtol=cfg.ode_rtol,
                       quad_rtol=cfg.quad_rtol)
    md = figure_data("mode", mode=assemble_mode(res))
    hm = md.heatmap
    (out / "mode_heatmap.svg").write_text(polar_heatmap(
        hm["r"], hm["theta"], hm["value"],
        f"W_n(r) cos(n theta), n = {cfg.n}, eps = {eps:g}, lambda = {res.lam.total:.6f}"))
    write_csv(out / "mode_heatmap.csv", "heatmap", hm, md.meta, cfg.hash)
    print(f"figures in {out}")
    return EXIT_OK


def cmd_profile(args, cfg: RunConfig):
    from .profiles import VortexProfile

    eps = cfg.epsilon[0]
    prof = VortexProfile(eps)
    r = np.linspace(0.0, 3.0, 601)
    r_c = np.where(r == 0, 1e-12, r)
    cols = {"r": r, "base": prof.base(r), "perturbed": prof.value(r),
            "derivative": prof.derivative(r), "c": prof.c(r_c)}
    text = csv_text("profile", cols, {"epsilon": eps}, cfg.hash)
    if args.dump and args.dump != "-":
        Path(args.dump).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _parse_eps(text):
    try:
        return tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise ConfigError(f"bad epsilon list {text!r}") from None


def build_parser():
    p = argparse.ArgumentParser(prog="vortex-modes",
                                description="Rotating eigenmodes of a plateaued vortex")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", help="key=value (sectioned) or JSON configuration file")
        sp.add_argument("--eps", help="epsilon value or comma-separated list")
        sp.add_argument("--n", type=int, help="azimuthal wavenumber")
        sp.add_argument("--out", help=f"output directory (the {OUT_ENV} variable overrides it)")
        sp.add_argument("--jobs", type=int, default=1, help="worker processes for sweeps")

    c = sub.add_parser("check", help="fast invariant suite")
    c.add_argument("--json", action="store_true")
    common(sub.add_parser("solve", help="solve at one or more eps"))
    common(sub.add_parser("sweep", help="solve a list of eps and summarise the lambda fit"))
    f = sub.add_parser("figures", help="write SVG figures")
    common(f)
    f.add_argument("--gap-eps", type=float, help="eps for the c(r) gap plots (default 0.01)")
    pr = sub.add_parser("profile", help="tabulate the profiles and c(r)")
    common(pr)
    pr.add_argument("--dump", nargs="?", const="-", default="-", help="CSV path, or - for stdout")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.command == "check":
        return cmd_check(args)
    try:
        cfg = load_config(args.config) if args.config else RunConfig()
        cfg = cfg.with_overrides(epsilon=_parse_eps(args.eps) if args.eps else None, n=args.n,
                                 output_dir=args.out)
        if args.jobs < 1:
            raise ConfigError("--jobs must be at least 1")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.command in ("solve", "sweep"):
        return cmd_solve(args, cfg, sweep=args.command == "sweep")
    if args.command == "figures":
        return cmd_figures(args, cfg)
    return cmd_profile(args, cfg)


if __name__ == "__main__":
    sys.exit(main())
