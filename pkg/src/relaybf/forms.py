"""Hermitian quadratic-form data for the AF beamformer design problems.

For each user the rank-one desired-signal matrices (A, A_bar) and the
interference-plus-noise matrices (C, C_bar) are built, together with one
homogeneous list of constraint triples (R_j, R_bar_j, budget_j) covering the
total-power, per-relay-power, and interference-temperature families.  The
unbarred matrices act on the first beamformer, the barred ones on the second
(Alamouti) beamformer; for the rank-one scheme the barred side is simply zero.

The "+1" in every SINR denominator comes from normalizing A and C by the user
noise variance at build time.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .network import DISTRIBUTED, MIMO, ChannelSet, NetworkConfig


@dataclass
class ProblemForms:
    """Problem data for the beamformer design problems and their SDRs.

    Matrix stacks are indexed by flat user index (A, A_bar, C, C_bar; shape
    (M, dim, dim)) or by constraint index (R, R_bar; shape (J, dim, dim)).
    dim is L for distributed relays and L^2 for MIMO relays.
    """

    kind: str
    dim: int
    group_sizes: tuple
    A: np.ndarray
    A_bar: np.ndarray
    C: np.ndarray
    C_bar: np.ndarray
    R: np.ndarray
    R_bar: np.ndarray
    budgets: np.ndarray
    labels: tuple
    cfg: NetworkConfig | None = None
    channels: ChannelSet | None = None

    @property
    def n_users(self):
        return int(sum(self.group_sizes))

    @property
    def n_constraints(self):
        return len(self.budgets)


@dataclass
class BeamformerPair:
    """A feasible beamformer pair; w2 is all-zero for the rank-one scheme."""

    w1: np.ndarray
    w2: np.ndarray
    theta: float


def _outer(v):
    return np.outer(v, np.conj(v))


def build_forms(cfg: NetworkConfig, ch: ChannelSet) -> ProblemForms:
    """Build all quadratic-form matrices for one channel realization."""
    L = cfg.n_relays
    if ch.f.shape != (cfg.n_groups, L) or ch.g.shape != (cfg.n_users, L):
        raise ValueError("channel set does not match the configuration")
    if ch.h.shape[0] != cfg.n_primal:
        raise ValueError("primal-user channels do not match the configuration")

    mimo = cfg.kind == MIMO
    dim = L * L if mimo else L
    sigma_relay = np.asarray(cfg.relay_noise)
    P = np.asarray(cfg.tx_power)

    def steer(f_vec, g_vec, barred):
        # Effective channel of stream f through weights onto receive channel g.
        f_eff = f_vec if barred else np.conj(f_vec)
        if mimo:
            return np.kron(f_eff, g_vec)
        return f_eff * g_vec

    M = cfg.n_users
    A = np.zeros((M, dim, dim), dtype=complex)
    A_bar = np.zeros_like(A)
    C = np.zeros_like(A)
    C_bar = np.zeros_like(A)
    groups = cfg.user_groups
    for u in range(M):
        k = groups[u]
        g_vec = ch.g[u]
        s2 = cfg.user_noise[u]
        A[u] = P[k] * _outer(steer(ch.f[k], g_vec, False)) / s2
        A_bar[u] = P[k] * _outer(steer(ch.f[k], g_vec, True)) / s2
        for m in range(cfg.n_groups):
            if m == k:
                continue
            C[u] += P[m] * _outer(steer(ch.f[m], g_vec, False)) / s2
            C_bar[u] += P[m] * _outer(steer(ch.f[m], g_vec, True)) / s2
        if mimo:
            noise = np.kron(np.diag(sigma_relay), _outer(g_vec)) / s2
        else:
            noise = np.diag(np.abs(g_vec) ** 2 * sigma_relay) / s2
        C[u] += noise
        C_bar[u] += noise

    # Power constraint matrices.
    if mimo:
        Q = sum(P[j] * _outer(np.conj(ch.f[j])) for j in range(cfg.n_groups))
        Q = Q + np.diag(sigma_relay)
        Q_bar = sum(P[j] * _outer(ch.f[j]) for j in range(cfg.n_groups))
        Q_bar = Q_bar + np.diag(sigma_relay)

        def d_total():
            return np.kron(Q, np.eye(L)), np.kron(Q_bar, np.eye(L))

        def d_relay(ell):
            E = np.zeros((L, L))
            E[ell, ell] = 1.0
            return np.kron(Q, E), np.kron(Q_bar, E)

    else:
        base = (P[:, None] * np.abs(ch.f) ** 2).sum(axis=0) + sigma_relay

        def d_total():
            D = np.diag(base).astype(complex)
            return D, D.copy()

        def d_relay(ell):
            D = np.zeros((L, L), dtype=complex)
            D[ell, ell] = base[ell]
            return D, D.copy()

    R, R_bar, budgets, labels = [], [], [], []
    if cfg.total_budget is not None:
        D, Db = d_total()
        R.append(D)
        R_bar.append(Db)
        budgets.append(cfg.total_budget)
        labels.append("total")
    if cfg.per_relay_budgets is not None:
        for ell, b in enumerate(cfg.per_relay_budgets):
            D, Db = d_relay(ell)
            R.append(D)
            R_bar.append(Db)
            budgets.append(b)
            labels.append(f"relay_{ell}")
    for u in range(cfg.n_primal):
        h_vec = ch.h[u]
        s2 = cfg.pu_noise[u]
        Gu = sum(
            P[j] * _outer(steer(ch.f[j], h_vec, False)) for j in range(cfg.n_groups)
        ) / s2
        Gu_bar = sum(
            P[j] * _outer(steer(ch.f[j], h_vec, True)) for j in range(cfg.n_groups)
        ) / s2
        R.append(Gu)
        R_bar.append(Gu_bar)
        budgets.append(cfg.interference_caps[u])
        labels.append(f"primal_{u}")

    return ProblemForms(
        kind=cfg.kind,
        dim=dim,
        group_sizes=cfg.group_sizes,
        A=A,
        A_bar=A_bar,
        C=C,
        C_bar=C_bar,
        R=np.asarray(R),
        R_bar=np.asarray(R_bar),
        budgets=np.asarray(budgets, dtype=float),
        labels=tuple(labels),
        cfg=cfg,
        channels=ch,
    )


# --- evaluators --------------------------------------------------------------

def _traces(stack, W):
    """Real trace inner products of a matrix stack with W."""
    return np.real(np.einsum("kij,ji->k", stack, W))


def eval_theta(forms, W1, W2=None):
    """Worst-user SINR level of the two-variable relaxation at (W1, W2)."""
    num = _traces(forms.A, W1)
    den = _traces(forms.C, W1) + 1.0
    if W2 is not None:
        num = num + _traces(forms.A_bar, W2)
        den = den + _traces(forms.C_bar, W2)
    return float(np.min(num / den))


def eval_gamma(forms, W):
    """Worst-user SINR level of the one-variable relaxation at W."""
    return eval_theta(forms, W, None)


def constraint_usage(forms, W1, W2=None):
    """Left-hand side of each power/interference constraint; feasible iff <= budgets."""
    usage = _traces(forms.R, W1)
    if W2 is not None:
        usage = usage + _traces(forms.R_bar, W2)
    return usage


def sinr_per_user(forms, w1, w2=None):
    """Per-user SINR achieved by a beamformer (pair)."""
    num = np.real(np.einsum("i,kij,j->k", np.conj(w1), forms.A, w1))
    den = np.real(np.einsum("i,kij,j->k", np.conj(w1), forms.C, w1)) + 1.0
    if w2 is not None:
        num = num + np.real(np.einsum("i,kij,j->k", np.conj(w2), forms.A_bar, w2))
        den = den + np.real(np.einsum("i,kij,j->k", np.conj(w2), forms.C_bar, w2))
    return num / den


# --- serialization -----------------------------------------------------------

def _mat_to_flat(a):
    """Row-major flattening with interleaved real/imag parts."""
    flat = np.asarray(a, dtype=complex).reshape(-1)
    out = np.empty(2 * flat.size)
    out[0::2] = flat.real
    out[1::2] = flat.imag
    return out.tolist()

def _mat_from_flat(data, shape):
    arr = np.asarray(data, dtype=float)
    return (arr[0::2] + 1j * arr[1::2]).reshape(shape)


def forms_to_dict(forms):
    return {
        "kind": forms.kind,
        "dim": forms.dim,
        "group_sizes": list(forms.group_sizes),
        "labels": list(forms.labels),
        "budgets": forms.budgets.tolist(),
        "A": _mat_to_flat(forms.A),
        "A_bar": _mat_to_flat(forms.A_bar),
        "C": _mat_to_flat(forms.C),
        "C_bar": _mat_to_flat(forms.C_bar),
        "R": _mat_to_flat(forms.R),
        "R_bar": _mat_to_flat(forms.R_bar),
    }


def forms_from_dict(d):
    dim = d["dim"]
    M = int(sum(d["group_sizes"]))
    J = len(d["budgets"])
    return ProblemForms(
        kind=d["kind"],
        dim=dim,
        group_sizes=tuple(d["group_sizes"]),
        A=_mat_from_flat(d["A"], (M, dim, dim)),
        A_bar=_mat_from_flat(d["A_bar"], (M, dim, dim)),
        C=_mat_from_flat(d["C"], (M, dim, dim)),
        C_bar=_mat_from_flat(d["C_bar"], (M, dim, dim)),
        R=_mat_from_flat(d["R"], (J, dim, dim)),
        R_bar=_mat_from_flat(d["R_bar"], (J, dim, dim)),
        budgets=np.asarray(d["budgets"], dtype=float),
        labels=tuple(d["labels"]),
    )


def save_forms(forms, path):
    Path(path).write_text(json.dumps(forms_to_dict(forms)))


def load_forms(path):
    with open(path) as fh:
        return forms_from_dict(json.load(fh))
