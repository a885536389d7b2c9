"""Tests for the quadratic-form problem data.

The oracle for every matrix is the physical signal model itself: for a random
weighting the quadratic-form SINR and power must equal the values computed
directly from the channels and the relay chain.
"""

import numpy as np
import pytest

import relaybf as rb


def _dist_cfg(G=2, L=4, caps=False):
    return rb.make_config(
        kind="distributed", n_relays=L, group_sizes=[2] * G, tx_power=1.3,
        relay_noise=0.25, user_noise=0.4, total_budget=10.0,
        per_relay_budgets=5.0,
        interference_caps=[1.0] if caps else (), pu_noise=0.3,
    )


def _mimo_cfg(G=2, L=3, caps=True):
    return rb.make_config(
        kind="mimo", n_relays=L, group_sizes=[2] * G, tx_power=0.8,
        relay_noise=0.5, user_noise=0.25, total_budget=8.0,
        interference_caps=[2.0] if caps else (), pu_noise=0.2,
    )


@pytest.mark.parametrize("make", [_dist_cfg, _mimo_cfg])
def test_stacks_hermitian_psd(make):
    cfg = make()
    ch = rb.sample_channels(cfg, 0)
    forms = rb.build_forms(cfg, ch)
    for stack in (forms.A, forms.A_bar, forms.C, forms.C_bar, forms.R, forms.R_bar):
        assert np.allclose(stack, np.conj(np.transpose(stack, (0, 2, 1))))
        for X in stack:
            assert np.linalg.eigvalsh(X)[0] > -1e-10


def test_dimensions():
    cfg = _dist_cfg()
    forms = rb.build_forms(cfg, rb.sample_channels(cfg, 1))
    assert forms.dim == cfg.n_relays
    cfgm = _mimo_cfg()
    formsm = rb.build_forms(cfgm, rb.sample_channels(cfgm, 1))
    assert formsm.dim == cfgm.n_relays ** 2


def test_desired_signal_matrices_rank_one():
    cfg = _mimo_cfg()
    forms = rb.build_forms(cfg, rb.sample_channels(cfg, 2))
    for u in range(forms.n_users):
        assert rb.numeric_rank(forms.A[u]) == 1
        assert rb.numeric_rank(forms.A_bar[u]) == 1


def _direct_sinr(cfg, ch, V, u):
    """SINR of user u computed straight from the physical model."""
    k = cfg.user_groups[u]
    g = ch.g[u]
    sig = cfg.tx_power[k] * np.abs(np.conj(g) @ V @ ch.f[k]) ** 2
    intf = sum(
        cfg.tx_power[m] * np.abs(np.conj(g) @ V @ ch.f[m]) ** 2
        for m in range(cfg.n_groups) if m != k
    )
    noise = np.real(
        np.conj(g) @ V @ np.diag(cfg.relay_noise) @ V.conj().T @ g
    ) + cfg.user_noise[u]
    return sig / (intf + noise)


@pytest.mark.parametrize("make", [_dist_cfg, _mimo_cfg])
def test_sinr_matches_physical_model(make):
    cfg = make()
    ch = rb.sample_channels(cfg, 3)
    forms = rb.build_forms(cfg, ch)
    rng = np.random.default_rng(7)
    w = rng.standard_normal(forms.dim) + 1j * rng.standard_normal(forms.dim)
    V = rb.weights_matrix(cfg, w)
    s = rb.sinr_per_user(forms, w)
    for u in range(cfg.n_users):
        assert s[u] == pytest.approx(_direct_sinr(cfg, ch, V, u), rel=1e-10)


@pytest.mark.parametrize("make", [_dist_cfg, _mimo_cfg])
def test_constraint_usage_matches_physical_model(make):
    cfg = make(caps=True)
    ch = rb.sample_channels(cfg, 4)
    forms = rb.build_forms(cfg, ch)
    rng = np.random.default_rng(8)
    w = rng.standard_normal(forms.dim) + 1j * rng.standard_normal(forms.dim)
    V = rb.weights_matrix(cfg, w)
    W = np.outer(w, np.conj(w))
    usage = rb.constraint_usage(forms, W)

    Q = sum(
        cfg.tx_power[j] * np.outer(ch.f[j], np.conj(ch.f[j])) for j in range(cfg.n_groups)
    ) + np.diag(cfg.relay_noise)
    total = np.real(np.trace(V @ Q @ V.conj().T))
    assert usage[forms.labels.index("total")] == pytest.approx(total, rel=1e-10)

    if cfg.per_relay_budgets is not None:
        for ell in range(len(cfg.per_relay_budgets)):
            per = np.real((V @ Q @ V.conj().T)[ell, ell])
            assert usage[forms.labels.index(f"relay_{ell}")] == pytest.approx(per, rel=1e-10)

    for p in range(cfg.n_primal):
        h = ch.h[p]
        temp = sum(
            cfg.tx_power[j] * np.abs(np.conj(h) @ V @ ch.f[j]) ** 2
            for j in range(cfg.n_groups)
        ) / cfg.pu_noise[p]
        assert usage[forms.labels.index(f"primal_{p}")] == pytest.approx(temp, rel=1e-10)


def test_barred_forms_swap_conjugation():
    # The barred steering uses f in place of conj(f): for real channels the
    # barred and unbarred stacks coincide.
    cfg = _dist_cfg()
    ch = rb.sample_channels(cfg, 5)
    real_ch = rb.ChannelSet(f=ch.f.real + 0j, g=ch.g.real + 0j, h=ch.h.real + 0j)
    forms = rb.build_forms(cfg, real_ch)
    assert np.allclose(forms.A, forms.A_bar)
    assert np.allclose(forms.C, forms.C_bar)
    assert np.allclose(forms.R, forms.R_bar)


def test_eval_theta_and_gamma():
    cfg = _dist_cfg()
    forms = rb.build_forms(cfg, rb.sample_channels(cfg, 6))
    rng = np.random.default_rng(9)
    w = rng.standard_normal(forms.dim) + 1j * rng.standard_normal(forms.dim)
    W = np.outer(w, np.conj(w))
    assert rb.eval_gamma(forms, W) == pytest.approx(min(rb.sinr_per_user(forms, w)), rel=1e-12)
    assert rb.eval_theta(forms, W, W) == pytest.approx(
        min(rb.sinr_per_user(forms, w, w)), rel=1e-12
    )


def test_forms_serialization_roundtrip(tmp_path):
    cfg = _mimo_cfg()
    forms = rb.build_forms(cfg, rb.sample_channels(cfg, 10))
    path = tmp_path / "forms.json"
    rb.save_forms(forms, path)
    loaded = rb.load_forms(path)
    assert loaded.kind == forms.kind and loaded.dim == forms.dim
    assert loaded.labels == forms.labels
    for name in ("A", "A_bar", "C", "C_bar", "R", "R_bar"):
        assert np.array_equal(getattr(loaded, name), getattr(forms, name))
    assert np.array_equal(loaded.budgets, forms.budgets)


def test_build_forms_rejects_mismatched_channels():
    cfg = _dist_cfg()
    other = rb.make_config(kind="distributed", n_relays=5, group_sizes=[2, 2], total_budget=1.0)
    ch = rb.sample_channels(other, 0)
    with pytest.raises(ValueError):
        rb.build_forms(cfg, ch)
