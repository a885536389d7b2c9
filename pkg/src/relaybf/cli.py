"""Command-line driver for the AF relay beamforming toolbox.

Subcommands: gen-channels, solve, randomize, sweep, verify, simulate.  All
inputs are JSON, results are JSON or CSV; every run is deterministic given the
--seed flag.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys

import numpy as np

from . import analysis, gaussrand, linksim
from .forms import build_forms, sinr_per_user
from .network import (
    ConfigError,
    channels_to_dict,
    load_channels,
    load_scenario,
    sample_channels,
    save_channels,
)
from .sdr import R1, R2, SolverFailure, bisect_sdr

VARIANTS = {"bf": R1, "bfa": R2}


def _write_json(data, path):
    text = json.dumps(data, indent=2)
    if path is None or path == "-":
        print(text)
    else:
        with open(path, "w") as fh:
            fh.write(text + "\n")


def _mat_to_json(W):
    if W is None:
        return None
    return {"re": np.asarray(W).real.tolist(), "im": np.asarray(W).imag.tolist()}


def _mat_from_json(d):
    if d is None:
        return None
    return np.asarray(d["re"], dtype=float) + 1j * np.asarray(d["im"], dtype=float)


def _load_channels_arg(args, cfg):
    if args.channels:
        return load_channels(args.channels)
    return sample_channels(cfg, args.seed)


def cmd_gen_channels(args):
    cfg = load_scenario(args.scenario)
    ch = sample_channels(cfg, args.seed)
    if args.out:
        save_channels(ch, args.out)
    else:
        print(json.dumps(channels_to_dict(ch)))
    return 0


def cmd_solve(args):
    cfg = load_scenario(args.scenario)
    ch = _load_channels_arg(args, cfg)
    forms = build_forms(cfg, ch)
    sol = bisect_sdr(forms, VARIANTS[args.variant], tol_rel=args.tol)
    data = sol.summary()
    data["W1"] = _mat_to_json(sol.W1)
    data["W2"] = _mat_to_json(sol.W2)
    _write_json(data, args.out)
    return 0 if sol.status == "optimal" else 1


def cmd_randomize(args):
    cfg = load_scenario(args.scenario)
    ch = _load_channels_arg(args, cfg)
    forms = build_forms(cfg, ch)
    with open(args.solution) as fh:
        sol_data = json.load(fh)
    variant = sol_data["variant"]
    sol = _SolutionShim(sol_data)
    rounder = gaussrand.randomize_r1 if variant == R1 else gaussrand.randomize_r2
    report = rounder(forms, sol, n_trials=args.trials, seed=args.seed)
    data = report.summary()
    data["w1"] = _mat_to_json(report.best.w1)
    data["w2"] = _mat_to_json(report.best.w2)
    data["theta"] = report.best.theta
    _write_json(data, args.out)
    return 0


class _SolutionShim:
    """Rehydrate just enough of a serialized solution for randomization."""

    def __init__(self, data):
        self.variant = data["variant"]
        self.status = data["status"]
        self.W1 = _mat_from_json(data["W1"])
        self.W2 = _mat_from_json(data.get("W2"))
        self.value = data["value"]


def cmd_sweep(args):
    from .network import scenario_from_dict
    from .sweep import SweepSpec, run_sweep, write_sweep_csv

    with open(args.spec) as fh:
        spec_data = json.load(fh)
    spec = SweepSpec(
        base=scenario_from_dict(spec_data["scenario"]),
        param=spec_data["param"],
        values=tuple(spec_data["values"]),
        n_channels=spec_data.get("n_channels", 20),
        n_randomizations=spec_data.get("n_randomizations", 200),
        schemes=tuple(spec_data.get("schemes", ["bf", "bfa"])),
        seed=spec_data.get("seed", args.seed),
        tol_rel=spec_data.get("tol_rel", args.tol),
    )
    rows = run_sweep(spec)
    write_sweep_csv(rows, args.out or "sweep.csv")
    failed = [r for r in rows if r["status"] != "ok"]
    print(f"{len(rows)} rows written ({len(failed)} failed cells)")
    return 0


def cmd_verify(args):
    cfg = load_scenario(args.scenario)
    ch = sample_channels(cfg, args.seed)
    forms = build_forms(cfg, ch)
    checks = []

    def record(name, empirical, bound, ok, **extra):
        checks.append(
            {"check": name, "empirical": empirical, "bound": bound, "ok": bool(ok), **extra}
        )

    consts = analysis.bound_constant(forms.n_users, forms.n_constraints, 0.5)
    record("bound_constant", consts.c, None, 0 < consts.c <= 1, v=consts.v)

    if cfg.n_groups == 1:
        rc = analysis.multicast_equivalence(cfg, ch, tol=args.tol_gap)
        record("multicast_equivalence", rc.value_gap, args.tol_gap, rc.value_gap <= args.tol_gap)
        rng = np.random.default_rng(args.seed)
        worst = 0.0
        for _ in range(20):
            w2 = rng.standard_normal(forms.dim) + 1j * rng.standard_normal(forms.dim)
            worst = max(worst, analysis.verify_rotation_identities(forms, w2).max_residual)
        record("rotation_identities", worst, 1e-10, worst <= 1e-10)

    sol = bisect_sdr(forms, R2, tol_rel=args.tol)
    slack = 3.0 * np.sqrt(0.125 / args.trials)
    if sol.W2 is not None and np.trace(sol.W2).real > 1e-9 * np.trace(sol.W1).real:
        try:
            omega = analysis.omega_of(forms, sol.W1, sol.W2)
        except ValueError:
            omega = 0.0
        rho = omega / (7.0 * np.sqrt(forms.n_users))
        v = 2.0 * np.log(16.0 * forms.n_constraints)
        p = analysis.joint_success_probability(forms, sol, rho, v, trials=args.trials, seed=args.seed)
        record("joint_success_probability", p, 0.125, p >= 0.125 - slack, rho=rho, v=v)

    for j in range(forms.n_constraints):
        emp, bound = analysis.empirical_tail_power(
            forms.R[j], forms.R_bar[j], sol.W1, sol.W2, v=2.0 * np.log(16.0 * forms.n_constraints),
            trials=args.trials, seed=args.seed + j,
        )
        record(f"power_tail_{forms.labels[j]}", emp, bound, emp <= bound + slack)

    report = {"checks": checks, "all_ok": all(c["ok"] for c in checks)}
    _write_json(report, args.out)
    return 0 if report["all_ok"] else 1


def cmd_simulate(args):
    cfg = load_scenario(args.scenario)
    ch = _load_channels_arg(args, cfg)
    forms = build_forms(cfg, ch)
    with open(args.beamformer) as fh:
        bf = json.load(fh)
    w1 = _mat_from_json(bf["w1"])
    w2 = _mat_from_json(bf.get("w2"))
    use_bfa = w2 is not None and np.any(np.abs(w2) > 0)
    analytic = sinr_per_user(forms, w1, w2 if use_bfa else None)
    if use_bfa:
        result = linksim.simulate_bfa(
            cfg, ch, linksim.weights_matrix(cfg, w1), linksim.weights_matrix(cfg, w2),
            args.symbols, args.seed,
        )
    else:
        result = linksim.simulate_bf(cfg, ch, linksim.weights_matrix(cfg, w1), args.symbols, args.seed)

    out = args.out or "simulate.csv"
    with open(out, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["user_index", "sinr_analytic", "sinr_empirical", "ber", "n_sym", "seed"])
        for u in range(cfg.n_users):
            writer.writerow(
                [u, f"{analytic[u]:.8g}", f"{result.sinr[u]:.8g}", f"{result.ber[u]:.8g}",
                 result.n_sym, args.seed]
            )
    return 0


def build_parser():
    parser = argparse.ArgumentParser(prog="relaybf", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", default=None)

    p = sub.add_parser("gen-channels", help="sample a channel realization for a scenario")
    p.add_argument("--scenario", required=True)
    common(p)
    p.set_defaults(func=cmd_gen_channels)

    p = sub.add_parser("solve", help="solve the SDR for one channel realization")
    p.add_argument("--scenario", required=True)
    p.add_argument("--channels", default=None)
    p.add_argument("--variant", choices=sorted(VARIANTS), default="bfa")
    p.add_argument("--tol", type=float, default=1e-4)
    common(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("randomize", help="round a solved SDR to a feasible beamformer")
    p.add_argument("--scenario", required=True)
    p.add_argument("--channels", default=None)
    p.add_argument("--solution", required=True)
    p.add_argument("--trials", type=int, default=gaussrand.DEFAULT_N_TRIALS)
    common(p)
    p.set_defaults(func=cmd_randomize)

    p = sub.add_parser("sweep", help="run a parameter sweep to CSV")
    p.add_argument("--spec", required=True)
    p.add_argument("--tol", type=float, default=1e-4)
    common(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("verify", help="run the analytical-claims verification suite")
    p.add_argument("--scenario", required=True)
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("--tol", type=float, default=1e-4)
    p.add_argument("--tol-gap", type=float, default=1e-3)
    common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("simulate", help="symbol-level simulation of a beamformer")
    p.add_argument("--scenario", required=True)
    p.add_argument("--channels", default=None)
    p.add_argument("--beamformer", required=True)
    p.add_argument("--symbols", type=int, default=100_000)
    common(p)
    p.set_defaults(func=cmd_simulate)
    return parser


def cli_main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if exc.code is not None else 2
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError, KeyError, AssertionError, SolverFailure) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main():
    raise SystemExit(cli_main())


if __name__ == "__main__":
    main()
