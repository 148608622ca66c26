"""Command line interface.

Subcommands::

    viscogreen fig1      temporal Green profiles (elastic vs power laws)
    viscogreen fig2      spatial Green maps at a fixed time
    viscogreen fig3      operator-model convergence in eps
    viscogreen localize  array imaging of a point source
    viscogreen kk-check  causality residuals of the dispersion
    viscogreen green     Green tensor time series at one offset
    viscogreen correct   de-attenuate a single trace from CSV

Every run writes ``manifest.json`` (all resolved parameters) before any
data file, then CSV tables and a plot script.  Exit status: 0 when all
run assertions passed, 1 when a numerical check failed, 2 on usage or
configuration errors.
"""

import argparse
import json
import os
import sys

import numpy as np

from .config import load_config
from .deatten import apply_L_tilde_star, invert_attenuation
from .green import SourceReceiverGeometry, green_time_tensor
from .harness import (
    run_fig1,
    run_fig2,
    run_fig3,
    run_kk_check,
    run_localize,
    write_manifest,
)
from .medium import FrequencyGrid

__all__ = ["main"]


def _add_common(sub):
    sub.add_argument("--config", default=None, help="INI experiment config (schema = 1)")
    sub.add_argument("--out", default=None, help="output directory (default ./out/<scenario>)")
    sub.add_argument("--seed", type=int, default=None, help="override run.seed")
    for flag, key in (
        ("--rho", "rho"),
        ("--c-p", "c_p"),
        ("--c-s", "c_s"),
        ("--nu-p", "nu_p"),
        ("--nu-s", "nu_s"),
        ("--y", "y"),
    ):
        sub.add_argument(flag, type=float, default=None, dest="medium_" + key)
    sub.add_argument("--n", type=int, default=None, help="override grids.n")
    sub.add_argument("--omega-max", type=float, default=None, help="override grids.omega_max")


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="viscogreen",
        description="Green's functions, de-attenuation, and source imaging "
        "for power-law visco-elastic media.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("fig1", "fig2", "fig3", "localize", "kk-check", "green", "correct"):
        p = sub.add_parser(name)
        _add_common(p)
        if name == "localize":
            p.add_argument("--snr-db", type=float, default=None, help="add noise at this SNR")
            p.add_argument("--trials", type=int, default=10, help="ablation trial count")
        if name == "kk-check":
            p.add_argument("--doublings", type=int, default=3, help="band doublings to test")
        if name == "green":
            p.add_argument("--r", type=float, default=0.015, help="source-receiver distance")
        if name == "correct":
            p.add_argument("input", help="CSV with columns t,value")
            p.add_argument(
                "--method",
                choices=("first_order", "ode"),
                default="first_order",
                help="inversion method",
            )
    return parser


def _config_from_args(args, scenario):
    overrides = {}
    for key in ("rho", "c_p", "c_s", "nu_p", "nu_s", "y"):
        overrides["medium." + key] = getattr(args, "medium_" + key)
    overrides["grids.n"] = args.n
    overrides["grids.omega_max"] = args.omega_max
    if args.seed is not None:
        overrides["run.seed"] = args.seed
    overrides["run.scenario"] = scenario
    return load_config(args.config, overrides)


def _print_report(report):
    for check in report["checks"]:
        status = "PASS" if check["passed"] else "FAIL"
        print("[%s] %s: %s" % (status, check["name"], check["detail"]))
    print("result: %s (%s)" % ("ok" if report["passed"] else "FAILED", report["outdir"]))


def _run_green(args, outdir):
    cfg = _config_from_args(args, "custom")
    med = cfg.make_medium()
    n = int(cfg.grids.get("n", 4096))
    omega_max = float(cfg.grids.get("omega_max", 3.2e4))
    grid = FrequencyGrid.from_band(n, omega_max)
    geom = SourceReceiverGeometry(np.zeros(3), np.array([args.r, 0.0, 0.0]))
    write_manifest(outdir, cfg, ["green.csv"], {"r": args.r, "n": n, "omega_max": omega_max})
    series = green_time_tensor(med, geom, grid)
    header = ["t"] + ["g%d%d" % (i + 1, j + 1) for i in range(3) for j in range(3)]
    data = np.column_stack([series.t, series.g.reshape(len(series.t), 9)])
    np.savetxt(
        os.path.join(outdir, "green.csv"),
        data,
        delimiter=",",
        header=",".join(header),
        comments="",
    )
    print("wrote %s (max asymmetry %.2e)" % (os.path.join(outdir, "green.csv"), series.max_asymmetry()))
    return 0


def _run_correct(args, outdir):
    cfg = _config_from_args(args, "custom")
    med = cfg.make_medium()
    table = np.genfromtxt(args.input, delimiter=",", names=True)
    t = np.asarray(table["t"], dtype=float)
    value = np.asarray(table["value"], dtype=float)
    eps = med.nu_s / med.c_s ** 2
    write_manifest(
        outdir, cfg, ["corrected.csv"], {"input": os.path.abspath(args.input), "eps": eps, "method": args.method}
    )
    if eps == 0.0:
        corrected = value.copy()
    else:
        corrected = invert_attenuation(apply_L_tilde_star(value, t, eps), t, eps, method=args.method)
    np.savetxt(
        os.path.join(outdir, "corrected.csv"),
        np.column_stack([t, value, corrected]),
        delimiter=",",
        header="t,measured,corrected",
        comments="",
    )
    print("wrote %s (eps = %.3g)" % (os.path.join(outdir, "corrected.csv"), eps))
    return 0


def main(argv=None):
    args = _build_parser().parse_args(argv)
    scenario = {"kk-check": "kk"}.get(args.command, args.command)
    outdir = args.out or os.path.join("out", args.command)
    os.makedirs(outdir, exist_ok=True)
    try:
        if args.command == "green":
            return _run_green(args, outdir)
        if args.command == "correct":
            return _run_correct(args, outdir)
        cfg = _config_from_args(args, scenario)
        if args.command == "fig1":
            report = run_fig1(cfg, outdir)
        elif args.command == "fig2":
            report = run_fig2(cfg, outdir)
        elif args.command == "fig3":
            report = run_fig3(cfg, outdir)
        elif args.command == "localize":
            report = run_localize(cfg, outdir, n_trials=args.trials, snr_db=args.snr_db)
        else:
            report = run_kk_check(cfg, outdir, n_doublings=args.doublings)
    except (ValueError, OSError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2
    _print_report(report)
    with open(os.path.join(outdir, "report.json"), "w") as fh:
        json.dump(report, fh, indent=2, default=float)
        fh.write("\n")
    return 0 if report["passed"] else 1


if __name__ == "__main__":
    sys.exit(main())
