"""Scenario configuration and random channel generation for two-hop AF relay networks.

A scenario describes a network of L single-antenna relays serving G multicast
groups (M users in total), optionally coexisting with U primal users whose
interference temperature is capped.  All powers and noise variances are kept in
linear units internally; dB values are converted at the interface boundary.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

DISTRIBUTED = "distributed"
MIMO = "mimo"
KINDS = (DISTRIBUTED, MIMO)


class ConfigError(ValueError):
    """Raised when a scenario violates the model assumptions."""


def db_to_linear(x_db):
    """Convert a dB quantity (scalar or array) to linear scale."""
    x = np.asarray(x_db, dtype=float)
    if not np.all(np.isfinite(x)):
        raise ValueError("dB value must be finite")
    out = 10.0 ** (x / 10.0)
    return float(out) if np.isscalar(x_db) else out


def linear_to_db(x):
    """Convert a linear quantity (scalar or array) to dB."""
    out = 10.0 * np.log10(np.asarray(x, dtype=float))
    return float(out) if np.isscalar(x) else out


@dataclass(frozen=True)
class NetworkConfig:
    """Immutable scenario description.

    kind              "distributed" (diagonal AF matrix) or "mimo" (full matrix)
    n_relays          L
    group_sizes       (m_1, ..., m_G), sum = M
    tx_power          per-group transmit power P_j, linear
    relay_noise       per-relay noise variance, linear
    user_noise        per-user noise variance (flat (k, i) order), linear
    total_budget      total relay power budget, or None if absent
    per_relay_budgets per-relay power budgets, or None if absent
    interference_caps per-primal-user interference caps (empty if U = 0)
    pu_noise          per-primal-user noise variance
    """

    kind: str
    n_relays: int
    group_sizes: tuple
    tx_power: tuple
    relay_noise: tuple
    user_noise: tuple
    total_budget: float | None = None
    per_relay_budgets: tuple | None = None
    interference_caps: tuple = ()
    pu_noise: tuple = ()

    @property
    def n_groups(self):
        return len(self.group_sizes)

    @property
    def n_users(self):
        return int(sum(self.group_sizes))

    @property
    def n_primal(self):
        return len(self.interference_caps)

    @property
    def n_constraints(self):
        """Total number of generalized power constraints J."""
        j = len(self.interference_caps)
        if self.total_budget is not None:
            j += 1
        if self.per_relay_budgets is not None:
            j += len(self.per_relay_budgets)
        return j

    @property
    def user_groups(self):
        """Group index of each user in flat (k, i) order."""
        return tuple(
            k for k, m in enumerate(self.group_sizes) for _ in range(m)
        )


def _as_tuple(value, n, name):
    """Broadcast a scalar to an n-tuple, or validate the length of a sequence."""
    if np.isscalar(value):
        return (float(value),) * n
    out = tuple(float(v) for v in value)
    if len(out) != n:
        raise ConfigError(f"{name} must have length {n}, got {len(out)}")
    return out


def make_config(
    kind,
    n_relays,
    group_sizes,
    tx_power=1.0,
    relay_noise=0.25,
    user_noise=0.25,
    total_budget=None,
    per_relay_budgets=None,
    interference_caps=(),
    pu_noise=0.25,
):
    """Build and validate a NetworkConfig, broadcasting scalar parameters."""
    group_sizes = tuple(int(m) for m in np.atleast_1d(group_sizes))
    n_groups = len(group_sizes)
    n_users = int(sum(group_sizes))
    caps = tuple(float(c) for c in np.atleast_1d(interference_caps)) if len(
        np.atleast_1d(interference_caps)
    ) else ()
    cfg = NetworkConfig(
        kind=kind,
        n_relays=int(n_relays),
        group_sizes=group_sizes,
        tx_power=_as_tuple(tx_power, n_groups, "tx_power"),
        relay_noise=_as_tuple(relay_noise, int(n_relays), "relay_noise"),
        user_noise=_as_tuple(user_noise, n_users, "user_noise"),
        total_budget=None if total_budget is None else float(total_budget),
        # A shorter budget list constrains only the first relays.
        per_relay_budgets=None
        if per_relay_budgets is None
        else (
            (float(per_relay_budgets),) * int(n_relays)
            if np.isscalar(per_relay_budgets)
            else tuple(float(b) for b in per_relay_budgets)
        ),
        interference_caps=caps,
        pu_noise=_as_tuple(pu_noise, len(caps), "pu_noise") if caps else (),
    )
    return validate_config(cfg)


def validate_config(cfg):
    """Check every model invariant; raise ConfigError listing all violations."""
    problems = []
    if cfg.kind not in KINDS:
        problems.append(f"kind must be one of {KINDS}, got {cfg.kind!r}")
    if cfg.n_relays < 1:
        problems.append("relay count must be >= 1")
    if len(cfg.group_sizes) < 1:
        problems.append("at least one group required")
    if any(m < 1 for m in cfg.group_sizes):
        problems.append("every group size must be >= 1")
    if len(cfg.tx_power) != cfg.n_groups or any(p <= 0 for p in cfg.tx_power):
        problems.append("tx power must be positive for every group")
    if len(cfg.relay_noise) != cfg.n_relays or any(s <= 0 for s in cfg.relay_noise):
        problems.append("relay noise must be positive")
    if len(cfg.user_noise) != cfg.n_users or any(s <= 0 for s in cfg.user_noise):
        problems.append("user noise must be positive")
    if cfg.total_budget is not None and cfg.total_budget <= 0:
        problems.append("total power budget must be positive")
    if cfg.per_relay_budgets is not None and (
        len(cfg.per_relay_budgets) == 0
        or len(cfg.per_relay_budgets) > cfg.n_relays
        or any(b <= 0 for b in cfg.per_relay_budgets)
    ):
        problems.append("per-relay budgets must be positive (at most one per relay)")
    if any(c <= 0 for c in cfg.interference_caps):
        problems.append("interference caps must be positive")
    if cfg.interference_caps and (
        len(cfg.pu_noise) != cfg.n_primal or any(s <= 0 for s in cfg.pu_noise)
    ):
        problems.append("primal-user noise must be positive for every primal user")
    if cfg.n_constraints < 1:
        problems.append("no constraints: at least one power or interference constraint required")
    if problems:
        raise ConfigError("; ".join(problems))
    return cfg


@dataclass(frozen=True)
class ChannelSet:
    """One realization of all complex channel vectors.

    f  (G, L)  source -> relays, per group
    g  (M, L)  relays -> user, flat (k, i) order
    h  (U, L)  relays -> primal user
    """

    f: np.ndarray
    g: np.ndarray
    h: np.ndarray


def sample_channels(cfg, seed):
    """Draw one i.i.d. CN(0, 1) channel realization, deterministic in the seed.

    Each entry has unit total variance: 1/2 per real and imaginary component.
    """
    rng = np.random.default_rng(seed)
    L = cfg.n_relays

    def cn(shape):
        return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)

    return ChannelSet(
        f=cn((cfg.n_groups, L)),
        g=cn((cfg.n_users, L)),
        h=cn((cfg.n_primal, L)),
    )


# --- scenario JSON interface -------------------------------------------------

def scenario_from_dict(d):
    """Build a config from the scenario JSON schema.

    Keys: kind, L, G (optional), group_sizes, tx_power_db, relay_noise,
    user_noise, total_budget_db, per_relay_budgets_db, interference_caps_db,
    pu_noise.  Missing optional budgets mean the constraint family is absent.
    """
    def from_db(value):
        if value is None:
            return None
        if np.isscalar(value):
            return db_to_linear(value)
        return tuple(db_to_linear(v) for v in value)

    try:
        caps = from_db(d.get("interference_caps_db")) or ()
        return make_config(
            kind=d["kind"],
            n_relays=d["L"],
            group_sizes=d["group_sizes"],
            tx_power=from_db(d.get("tx_power_db", 0.0)),
            relay_noise=d.get("relay_noise", 0.25),
            user_noise=d.get("user_noise", 0.25),
            total_budget=from_db(d.get("total_budget_db")),
            per_relay_budgets=from_db(d.get("per_relay_budgets_db")),
            interference_caps=caps,
            pu_noise=d.get("pu_noise", 0.25) if caps else (),
        )
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"malformed scenario: {exc}") from exc


def load_scenario(path):
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"scenario file is not valid JSON: {exc}") from exc
    return scenario_from_dict(data)


def channels_to_dict(ch):
    def enc(a):
        return {"re": a.real.tolist(), "im": a.imag.tolist()}

    return {"f": enc(ch.f), "g": enc(ch.g), "h": enc(ch.h)}


def channels_from_dict(d):
    def dec(e):
        return np.asarray(e["re"], dtype=float) + 1j * np.asarray(e["im"], dtype=float)

    return ChannelSet(f=dec(d["f"]), g=dec(d["g"]), h=dec(d["h"]))


def save_channels(ch, path):
    Path(path).write_text(json.dumps(channels_to_dict(ch)))


def load_channels(path):
    with open(path) as fh:
        return channels_from_dict(json.load(fh))
