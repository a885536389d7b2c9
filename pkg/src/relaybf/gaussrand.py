"""Gaussian randomization rounding of SDR solutions into feasible beamformers.

Components of the SDR solution that are already (numerically) rank one are
fixed to their eigenvector across all trials; higher-rank components are
redrawn from CN(0, W*) each trial.  Every trial is jointly rescaled so the
tightest power/interference constraint holds with equality, and the trial with
the best worst-user SINR wins.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .forms import BeamformerPair, sinr_per_user
from .sdr import extract_rank_one, numeric_rank

DEFAULT_N_TRIALS = 1000


@dataclass
class RandomizationReport:
    n_trials: int
    best: BeamformerPair
    per_trial_theta: np.ndarray
    scale_min: float
    scale_median: float
    seed: int

    def summary(self):
        return {
            "n_trials": self.n_trials,
            "best_theta": self.best.theta,
            "scale_min": self.scale_min,
            "scale_median": self.scale_median,
            "seed": self.seed,
        }


def sample_gaussian(W, rng):
    """Draw xi ~ CN(0, W) for a PSD matrix W."""
    evals, evecs = np.linalg.eigh(W)
    evals = np.clip(evals, 0.0, None)
    n = W.shape[0]
    z = (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / np.sqrt(2.0)
    return (evecs * np.sqrt(evals)) @ z


def feasibility_scale(forms, xi1, xi2=None):
    """Largest scale t so (t xi1, t xi2) satisfies every constraint.

    Single min across the power and interference families, i.e. min{t1, t2}
    of the randomization algorithm.  Returns 1.0 if every constraint usage is
    zero (the vectors are trivially feasible).
    """
    usage = np.real(np.einsum("i,jik,k->j", np.conj(xi1), forms.R, xi1))
    if xi2 is not None:
        usage = usage + np.real(np.einsum("i,jik,k->j", np.conj(xi2), forms.R_bar, xi2))
    active = usage > 0
    if not np.any(active):
        return 1.0
    return float(np.min(np.sqrt(forms.budgets[active] / usage[active])))


def _run_trials(forms, components, n_trials, seed, clamp_scale):
    """Shared trial loop for the one- and two-variable roundings.

    components: list of (W, fixed_vector_or_None) with barred matrices implied
    by position (first entry unbarred, second barred).
    """
    if n_trials < 1:
        raise ValueError("need at least one randomization")
    children = np.random.SeedSequence(seed).spawn(n_trials)
    thetas = np.empty(n_trials)
    scales = np.empty(n_trials)
    best = None
    for n in range(n_trials):
        rng = np.random.default_rng(children[n])
        for _ in range(100):
            vecs = [
                fixed if fixed is not None else sample_gaussian(W, rng)
                for W, fixed in components
            ]
            t = feasibility_scale(forms, vecs[0], vecs[1] if len(vecs) > 1 else None)
            if np.isfinite(t) and t > 0:
                break
        if clamp_scale:
            t = min(t, 1.0)
        vecs = [t * v for v in vecs]
        w1 = vecs[0]
        w2 = vecs[1] if len(vecs) > 1 else None
        theta = float(np.min(sinr_per_user(forms, w1, w2)))
        thetas[n] = theta
        scales[n] = t
        if best is None or theta > best.theta:
            dim = forms.dim
            best = BeamformerPair(
                w1=w1,
                w2=w2 if w2 is not None else np.zeros(dim, dtype=complex),
                theta=theta,
            )
    return RandomizationReport(
        n_trials=n_trials,
        best=best,
        per_trial_theta=thetas,
        scale_min=float(scales.min()),
        scale_median=float(np.median(scales)),
        seed=seed,
    )


def randomize_r2(forms, sol, n_trials=DEFAULT_N_TRIALS, seed=0):
    """Round a two-variable relaxation solution to a feasible beamformer pair."""
    if sol.status != "optimal":
        raise ValueError("randomization needs an optimal SDR solution")
    components = []
    for W in (sol.W1, sol.W2):
        fixed = extract_rank_one(W) if numeric_rank(W) <= 1 else None
        components.append((W, fixed))
    clamp = all(fixed is not None for _, fixed in components)
    return _run_trials(forms, components, n_trials, seed, clamp)


def randomize_r1(forms, sol, n_trials=DEFAULT_N_TRIALS, seed=0):
    """Round a one-variable relaxation solution to a feasible beamformer (w2 = 0)."""
    if sol.status != "optimal":
        raise ValueError("randomization needs an optimal SDR solution")
    fixed = extract_rank_one(sol.W1) if numeric_rank(sol.W1) <= 1 else None
    return _run_trials(forms, [(sol.W1, fixed)], n_trials, seed, fixed is not None)
