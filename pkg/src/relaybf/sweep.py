"""Batch experiment driver: parameter sweeps over random channel realizations.

Each cell (sweep value x channel realization) builds the problem data, solves
the requested relaxations, rounds by Gaussian randomization, and records both
the relaxation value and the rounded worst-user SINR.  Cells are deterministic
functions of (spec, master seed); failed cells are recorded and skipped rather
than aborting the run.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import gaussrand
from .forms import build_forms
from .network import NetworkConfig, db_to_linear, linear_to_db, make_config, sample_channels
from .sdr import R1, R2, SolverFailure, bisect_sdr, numeric_rank

PARAM_TOTAL_POWER_DB = "total_power_db"
PARAM_N_USERS = "n_users"
PARAM_N_PER_RELAY = "n_per_relay_constraints"
PARAM_N_PRIMAL = "n_primal_users"
SWEEP_PARAMS = (PARAM_TOTAL_POWER_DB, PARAM_N_USERS, PARAM_N_PER_RELAY, PARAM_N_PRIMAL)

SCHEME_VARIANTS = {"bf": R1, "bfa": R2}

CSV_FIELDS = (
    "sweep_param",
    "value",
    "channel_idx",
    "scheme",
    "sdr_value_db",
    "rounded_value_db",
    "rank_w1",
    "rank_w2",
    "status",
    "seed",
)


@dataclass
class SweepSpec:
    base: NetworkConfig
    param: str
    values: tuple
    n_channels: int = 20
    n_randomizations: int = 200
    schemes: tuple = ("bf", "bfa")
    seed: int = 0
    tol_rel: float = 1e-4

    def __post_init__(self):
        if self.param not in SWEEP_PARAMS:
            raise ValueError(f"unknown sweep parameter {self.param!r}")
        if len(self.values) == 0:
            raise ValueError("sweep values must be non-empty")
        if list(self.values) != sorted(self.values):
            raise ValueError("sweep values must be sorted")
        if self.n_channels < 1:
            raise ValueError("need at least one channel per point")
        unknown = set(self.schemes) - set(SCHEME_VARIANTS)
        if unknown:
            raise ValueError(f"unknown schemes {sorted(unknown)}")


def apply_sweep_value(base: NetworkConfig, param, value):
    """Derive the scenario at one sweep point from the base scenario."""
    if param == PARAM_TOTAL_POWER_DB:
        return replace(base, total_budget=db_to_linear(value))
    if param == PARAM_N_USERS:
        G = base.n_groups
        m, extra = divmod(int(value), G)
        sizes = tuple(m + (1 if k < extra else 0) for k in range(G))
        return make_config(
            kind=base.kind,
            n_relays=base.n_relays,
            group_sizes=sizes,
            tx_power=base.tx_power,
            relay_noise=base.relay_noise,
            user_noise=base.user_noise[0],
            total_budget=base.total_budget,
            per_relay_budgets=base.per_relay_budgets,
            interference_caps=base.interference_caps,
            pu_noise=base.pu_noise[0] if base.pu_noise else 0.25,
        )
    if param == PARAM_N_PER_RELAY:
        n = int(value)
        if n == 0:
            return replace(base, per_relay_budgets=None)
        if base.per_relay_budgets is None:
            raise ValueError("base scenario needs a per-relay budget template")
        return replace(base, per_relay_budgets=(base.per_relay_budgets[0],) * n)
    if param == PARAM_N_PRIMAL:
        n = int(value)
        if n == 0:
            return replace(base, interference_caps=(), pu_noise=())
        if not base.interference_caps:
            raise ValueError("base scenario needs an interference-cap template")
        return replace(
            base,
            interference_caps=(base.interference_caps[0],) * n,
            pu_noise=(base.pu_noise[0],) * n,
        )
    raise ValueError(f"unknown sweep parameter {param!r}")


def run_sweep(spec: SweepSpec):
    """Run every cell of the sweep; returns one row dict per (cell, scheme)."""
    rows = []
    for vi, value in enumerate(spec.values):
        cfg = apply_sweep_value(spec.base, spec.param, value)
        for ci in range(spec.n_channels):
            # Channel seed depends on the channel index only, so sweep values
            # are compared on paired channel realizations.
            ch = sample_channels(cfg, (spec.seed, ci))
            forms = build_forms(cfg, ch)
            for scheme in spec.schemes:
                variant = SCHEME_VARIANTS[scheme]
                row = {
                    "sweep_param": spec.param,
                    "value": value,
                    "channel_idx": ci,
                    "scheme": scheme,
                    "sdr_value_db": "",
                    "rounded_value_db": "",
                    "rank_w1": "",
                    "rank_w2": "",
                    "status": "ok",
                    "seed": spec.seed,
                }
                try:
                    sol = bisect_sdr(forms, variant, tol_rel=spec.tol_rel)
                    rounder = gaussrand.randomize_r1 if variant == R1 else gaussrand.randomize_r2
                    report = rounder(
                        forms, sol, n_trials=spec.n_randomizations,
                        seed=(spec.seed, ci, vi, 1 if scheme == "bfa" else 0),
                    )
                    row["sdr_value_db"] = f"{linear_to_db(sol.value):.6f}"
                    row["rounded_value_db"] = f"{linear_to_db(max(report.best.theta, 1e-300)):.6f}"
                    row["rank_w1"] = sol.ranks[0]
                    row["rank_w2"] = sol.ranks[1] if len(sol.ranks) > 1 else ""
                except SolverFailure as exc:
                    row["status"] = f"solver_failure:{exc}"
                rows.append(row)
    rows.sort(key=lambda r: (r["sweep_param"], r["value"], r["channel_idx"], r["scheme"]))
    return rows


def write_sweep_csv(rows, path):
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_FIELDS)
        writer.writeheader()
        writer.writerows(rows)


def aggregate_sweep(rows):
    """Mean and standard error of the dB values per (value, scheme) point."""
    points = {}
    for row in rows:
        if row["status"] != "ok":
            continue
        key = (row["value"], row["scheme"])
        points.setdefault(key, []).append(
            (float(row["sdr_value_db"]), float(row["rounded_value_db"]))
        )
    out = {}
    for key, vals in points.items():
        arr = np.asarray(vals)
        n = len(arr)
        stderr = arr.std(axis=0, ddof=1) / math.sqrt(n) if n > 1 else np.zeros(2)
        out[key] = {
            "n": n,
            "sdr_mean_db": float(arr[:, 0].mean()),
            "sdr_stderr_db": float(stderr[0]),
            "rounded_mean_db": float(arr[:, 1].mean()),
            "rounded_stderr_db": float(stderr[1]),
        }
    return out
