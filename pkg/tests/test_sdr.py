"""Tests for the bisection SDR solver and its linear-algebra utilities."""

import numpy as np
import pytest
import scipy.linalg

import relaybf as rb


def _rand_hermitian(rng, n):
    X = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return X + X.conj().T


def test_hermitian_to_real_structure():
    rng = np.random.default_rng(0)
    H = _rand_hermitian(rng, 4)
    S = rb.hermitian_to_real(H)
    assert np.allclose(S, S.T)
    # eigenvalues doubled in multiplicity
    ev_h = np.linalg.eigvalsh(H)
    ev_s = np.linalg.eigvalsh(S)
    assert np.allclose(np.sort(np.repeat(ev_h, 2)), np.sort(ev_s), atol=1e-10)
    # inner products halve
    B = _rand_hermitian(rng, 4)
    lhs = np.real(np.trace(H @ B))
    rhs = 0.5 * np.trace(S @ rb.hermitian_to_real(B))
    assert lhs == pytest.approx(rhs, rel=1e-10)


def test_hermitian_to_real_rejects_non_hermitian():
    with pytest.raises(ValueError):
        rb.hermitian_to_real(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_numeric_rank():
    rng = np.random.default_rng(1)
    v = rng.standard_normal(5) + 1j * rng.standard_normal(5)
    W = np.outer(v, np.conj(v))
    assert rb.numeric_rank(W) == 1
    assert rb.numeric_rank(np.zeros((3, 3))) == 0
    assert rb.numeric_rank(np.eye(4)) == 4
    assert rb.numeric_rank(W + 1e-9 * np.eye(5)) == 1  # below the ratio threshold


def test_extract_rank_one_roundtrip():
    rng = np.random.default_rng(2)
    v = rng.standard_normal(6) + 1j * rng.standard_normal(6)
    W = np.outer(v, np.conj(v))
    w = rb.extract_rank_one(W)
    assert np.allclose(np.outer(w, np.conj(w)), W, atol=1e-10)
    pivot = np.argmax(np.abs(w))
    assert w[pivot].imag == pytest.approx(0.0, abs=1e-12)
    assert w[pivot].real > 0
    with pytest.raises(ValueError):
        rb.extract_rank_one(np.eye(3))


def _small_forms(seed=0, G=1, L=3, kind="distributed", budget=10.0):
    cfg = rb.make_config(
        kind=kind, n_relays=L, group_sizes=[2] * G, tx_power=1.0,
        relay_noise=0.25, user_noise=0.25, total_budget=budget,
    )
    return rb.build_forms(cfg, rb.sample_channels(cfg, seed)), cfg


def test_feasibility_monotone_in_level():
    forms, _ = _small_forms()
    sol = rb.bisect_sdr(forms, rb.R1)
    below = rb.solve_feasibility(forms, 0.5 * sol.value, rb.R1)
    above = rb.solve_feasibility(forms, 2.0 * sol.value, rb.R1)
    assert below.feasible and not above.feasible
    assert below.W1 is not None
    usage = rb.constraint_usage(forms, below.W1)
    assert np.all(usage <= forms.budgets + 1e-6)


def test_upper_bound_dominates_optimum():
    for seed in range(5):
        forms, _ = _small_forms(seed=seed, G=2)
        bound = rb.upper_bound_gamma(forms, rb.R2)
        sol = rb.bisect_sdr(forms, rb.R2)
        assert sol.value <= bound * (1 + 1e-6)


def test_upper_bound_per_relay_fallback():
    cfg = rb.make_config(
        kind="distributed", n_relays=3, group_sizes=[1], per_relay_budgets=4.0,
    )
    forms = rb.build_forms(cfg, rb.sample_channels(cfg, 3))
    bound = rb.upper_bound_gamma(forms, rb.R1)
    sol = rb.bisect_sdr(forms, rb.R1)
    assert 0 < sol.value <= bound * (1 + 1e-6)


def test_bisect_matches_single_user_closed_form():
    # One user, one total-power constraint: the optimum is the generalized
    # eigenvalue of the desired-signal matrix against (interference + power/budget).
    cfg = rb.make_config(
        kind="distributed", n_relays=3, group_sizes=[1], tx_power=1.0,
        relay_noise=0.25, user_noise=0.25, total_budget=5.0,
    )
    for seed in range(3):
        forms = rb.build_forms(cfg, rb.sample_channels(cfg, seed))
        oracle = cfg.total_budget * scipy.linalg.eigh(
            forms.A[0], forms.C[0] * cfg.total_budget + forms.R[0], eigvals_only=True
        )[-1]
        sol = rb.bisect_sdr(forms, rb.R1, tol_rel=1e-5)
        assert sol.value == pytest.approx(oracle, rel=1e-4)


def test_bisect_solution_contract():
    forms, _ = _small_forms(seed=7, G=2)
    sol = rb.bisect_sdr(forms, rb.R2)
    assert sol.status == "optimal"
    assert sol.W1 is not None and sol.W2 is not None
    assert sol.gap <= 1e-4 * sol.value + 1e-7 or sol.n_iterations >= 60
    assert np.all(sol.usage <= forms.budgets + 1e-6)
    assert rb.eval_theta(forms, sol.W1, sol.W2) >= sol.value - 1e-6
    # witness really is Hermitian PSD
    assert np.allclose(sol.W1, sol.W1.conj().T)
    assert np.linalg.eigvalsh(sol.W1)[0] >= -1e-12


def test_r2_dominates_r1():
    for seed in range(5):
        forms, _ = _small_forms(seed=seed, G=2, L=3)
        s1 = rb.bisect_sdr(forms, rb.R1)
        s2 = rb.bisect_sdr(forms, rb.R2)
        assert s2.value >= s1.value - (s1.gap + s2.gap)


def test_solution_summary_serializable():
    import json

    forms, _ = _small_forms(seed=1)
    sol = rb.bisect_sdr(forms, rb.R2)
    json.dumps(sol.summary())


def test_bad_variant_rejected():
    forms, _ = _small_forms()
    with pytest.raises(ValueError):
        rb.bisect_sdr(forms, "r3")
    with pytest.raises(ValueError):
        rb.bisect_sdr(forms, rb.R1, tol_rel=0.0)
