"""Tests for the symbol-level QPSK link simulator.

The analytic SINR formulas are the oracle: long simulations must agree with
them within Monte Carlo tolerance, for both the plain beamformed chain and the
Alamouti-structured two-slot chain.
"""

import numpy as np
import pytest

import relaybf as rb
from relaybf.linksim import alamouti_encode


def test_alamouti_encode_orthogonal():
    x = np.array([1 + 2j, -0.5 + 1j])
    X = alamouti_encode(x)
    assert X.shape == (2, 2)
    assert X[0, 0] == x[0] and X[0, 1] == x[1]
    assert X[1, 0] == -np.conj(x[1]) and X[1, 1] == np.conj(x[0])
    gram = X @ X.conj().T
    assert np.allclose(gram, np.sum(np.abs(x) ** 2) * np.eye(2))


def test_weights_matrix_shapes():
    cfg_d = rb.make_config(kind="distributed", n_relays=3, group_sizes=[1], total_budget=1.0)
    V = rb.weights_matrix(cfg_d, np.arange(3) + 1.0)
    assert np.allclose(V, np.diag([1.0, 2.0, 3.0]))
    with pytest.raises(ValueError):
        rb.weights_matrix(cfg_d, np.ones(9))

    cfg_m = rb.make_config(kind="mimo", n_relays=2, group_sizes=[1], total_budget=1.0)
    w = np.arange(4) + 0.0
    V = rb.weights_matrix(cfg_m, w)
    # column-stacking convention
    assert np.allclose(V, np.array([[0.0, 2.0], [1.0, 3.0]]))


def test_distributed_rejects_offdiagonal_matrix():
    cfg = rb.make_config(kind="distributed", n_relays=2, group_sizes=[1], total_budget=1.0)
    ch = rb.sample_channels(cfg, 0)
    with pytest.raises(ValueError):
        rb.simulate_bf(cfg, ch, np.ones((2, 2)), 10, 0)


def _instance(kind="distributed", G=2, seed=0):
    cfg = rb.make_config(
        kind=kind, n_relays=3, group_sizes=[2] * G, tx_power=1.0,
        relay_noise=0.25, user_noise=0.25, total_budget=10.0,
    )
    ch = rb.sample_channels(cfg, seed)
    forms = rb.build_forms(cfg, ch)
    rng = np.random.default_rng(seed + 100)
    w = rng.standard_normal(forms.dim) + 1j * rng.standard_normal(forms.dim)
    w *= rb.feasibility_scale(forms, w)
    return cfg, ch, forms, w


@pytest.mark.parametrize("kind", ["distributed", "mimo"])
def test_bf_sinr_matches_formula(kind):
    cfg, ch, forms, w = _instance(kind=kind)
    analytic = rb.sinr_per_user(forms, w)
    res = rb.simulate_bf(cfg, ch, rb.weights_matrix(cfg, w), 150_000, 1)
    assert np.max(np.abs(res.sinr - analytic) / analytic) < 0.05
    # relay transmit power matches the total-power quadratic form
    usage = rb.constraint_usage(forms, np.outer(w, np.conj(w)))
    assert res.relay_power == pytest.approx(usage[0], rel=0.05)


@pytest.mark.parametrize("kind", ["distributed", "mimo"])
def test_bfa_sinr_matches_formula(kind):
    cfg, ch, forms, w1 = _instance(kind=kind, seed=1)
    rng = np.random.default_rng(200)
    w2 = rng.standard_normal(forms.dim) + 1j * rng.standard_normal(forms.dim)
    t = rb.feasibility_scale(forms, w1, w2)
    w1, w2 = t * w1, t * w2
    analytic = rb.sinr_per_user(forms, w1, w2)
    res = rb.simulate_bfa(
        cfg, ch, rb.weights_matrix(cfg, w1), rb.weights_matrix(cfg, w2), 150_000, 2
    )
    assert np.max(np.abs(res.sinr - analytic) / analytic) < 0.05
    W1 = np.outer(w1, np.conj(w1))
    W2 = np.outer(w2, np.conj(w2))
    usage = rb.constraint_usage(forms, W1, W2)
    assert res.relay_power == pytest.approx(usage[0], rel=0.05)


def test_ber_decreases_with_power():
    cfg, ch, forms, w = _instance(G=1)
    sols = []
    for scale in (0.2, 1.0):
        res = rb.simulate_bf(cfg, ch, rb.weights_matrix(cfg, scale * w), 50_000, 3)
        sols.append(np.mean(res.ber))
    assert sols[1] < sols[0]


def test_simulation_deterministic():
    cfg, ch, forms, w = _instance()
    a = rb.simulate_bf(cfg, ch, rb.weights_matrix(cfg, w), 5_000, 4)
    b = rb.simulate_bf(cfg, ch, rb.weights_matrix(cfg, w), 5_000, 4)
    assert np.array_equal(a.sinr, b.sinr)
    assert np.array_equal(a.ber, b.ber)
