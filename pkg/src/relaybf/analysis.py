"""Approximation-quality constants, multicast phase-rotation identities, and
Monte Carlo verification of the tail bounds behind the randomization guarantee.

For single-group (multicast) networks the second beamformer can be phase
rotated so that every barred quadratic form maps onto its unbarred
counterpart; the two relaxations then share one optimal value.  The guarantee
constant c and the two tail lemmas are checked empirically here.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .forms import build_forms, constraint_usage
from .network import DISTRIBUTED, MIMO
from .sdr import R1, R2, bisect_sdr


@dataclass
class BoundConstants:
    """Constants of the randomization approximation guarantee."""

    n_users: int
    n_constraints: int
    omega: float
    rho_a: float
    rho_b: float
    v: float
    c: float


@dataclass
class RotationCheck:
    """Result of the multicast phase-rotation verification."""

    e: np.ndarray | None
    max_residual: float
    value_gap: float | None = None


def bound_constant(n_users, n_constraints, omega):
    """Guarantee constant c = max{omega/(7 sqrt(M)), 1/(8M)} / (2 ln(16J) + 1).

    Natural logarithms throughout: the choice v = 2 ln(16J) makes
    2J exp(-v/2) = 1/8 in the success-probability accounting.
    """
    M, J = int(n_users), int(n_constraints)
    if M < 1 or J < 1:
        raise ValueError("need at least one user and one constraint")
    if not 0 <= omega <= 0.5:
        raise ValueError("omega must lie in [0, 1/2]")
    rho_a = omega / (7.0 * np.sqrt(M))
    rho_b = 1.0 / (8.0 * M)
    v = 2.0 * np.log(16.0 * J)
    c = max(rho_a, rho_b) / (2.0 * np.log(16.0 * J) + 1.0)
    return BoundConstants(M, J, float(omega), rho_a, rho_b, v, c)


def omega_of(forms, W1, W2):
    """Balance of desired power between the two SDR components (in [0, 1/2])."""
    num1 = np.real(np.einsum("kij,ji->k", forms.A, W1))
    num2 = np.real(np.einsum("kij,ji->k", forms.A_bar, W2))
    total = num1 + num2
    if np.any(total <= 0):
        raise ValueError("a user has zero desired power at this solution")
    return float(np.min(np.minimum(num1, num2) / total))


def phase_vector(f, kind):
    """Unit-modulus rotation aligning the barred quadratic forms with the
    unbarred ones in the multicast case.

    The rotation e_l = exp(-2i arg f_l) satisfies conj(e_l) conj(f_l) = f_l,
    which is what the conjugated inner products of the barred forms require;
    for MIMO relays the per-source rotation is replicated across each
    weighting-matrix column.
    """
    f = np.asarray(f)
    if np.any(f == 0):
        raise ValueError("phase undefined for a zero channel entry")
    e = np.exp(-2j * np.angle(f))
    if kind == MIMO:
        return np.kron(e, np.ones(len(f)))
    if kind == DISTRIBUTED:
        return e
    raise ValueError(f"unknown kind {kind!r}")


def verify_rotation_identities(forms, w2, tol=1e-10):
    """Check that rotating w2 maps every barred form onto its unbarred twin.

    With w2_rot = w2 * e, each barred quadratic form evaluated at w2 equals
    the corresponding unbarred form at w2_rot (desired signal, interference
    plus noise, power, and interference-cap families alike).
    """
    if len(forms.group_sizes) != 1:
        raise ValueError("rotation identities hold for multicast (G = 1) only")
    if forms.channels is None:
        raise ValueError("forms were built without channel data")
    e = phase_vector(forms.channels.f[0], forms.kind)
    w2 = np.asarray(w2, dtype=complex)
    w2_rot = w2 * e

    def quad(stack, w):
        return np.real(np.einsum("i,kij,j->k", np.conj(w), stack, w))

    residual = 0.0
    for barred, plain in ((forms.A_bar, forms.A), (forms.C_bar, forms.C), (forms.R_bar, forms.R)):
        lhs = quad(barred, w2)
        rhs = quad(plain, w2_rot)
        scale = np.maximum(np.abs(lhs), 1e-300)
        residual = max(residual, float(np.max(np.abs(lhs - rhs) / scale)))
    if residual > tol:
        raise AssertionError(f"rotation identity residual {residual:.3e} exceeds {tol:.1e}")
    return RotationCheck(e=e, max_residual=residual)


def multicast_equivalence(cfg, ch, tol=1e-3, tol_rel=1e-4, solver=None):
    """Solve both relaxations on a multicast instance and compare optima.

    For G = 1 the two optimal values agree; the relative gap is asserted to
    stay below `tol` (set by the bisection accuracy).
    """
    if cfg.n_groups != 1:
        raise ValueError("multicast equivalence requires G = 1")
    forms = build_forms(cfg, ch)
    kwargs = {} if solver is None else {"solver": solver}
    sol1 = bisect_sdr(forms, R1, tol_rel=tol_rel, **kwargs)
    sol2 = bisect_sdr(forms, R2, tol_rel=tol_rel, **kwargs)
    gap = abs(sol2.value - sol1.value) / max(sol1.value, 1e-300)
    if gap > tol:
        raise AssertionError(
            f"multicast relative gap {gap:.3e} exceeds {tol:.1e} "
            f"(r1={sol1.value:.6g}, r2={sol2.value:.6g})"
        )
    e = phase_vector(ch.f[0], cfg.kind)
    return RotationCheck(e=e, max_residual=0.0, value_gap=gap)


# --- Monte Carlo tail-bound verification -------------------------------------

def _gaussian_batch(W, n, rng):
    """n rows, each ~ CN(0, W)."""
    evals, evecs = np.linalg.eigh(W)
    evals = np.clip(evals, 0.0, None)
    d = W.shape[0]
    z = (rng.standard_normal((n, d)) + 1j * rng.standard_normal((n, d))) / np.sqrt(2.0)
    return z @ (evecs * np.sqrt(evals)).T


def _quad_batch(X, A):
    """Per-row quadratic form x^H A x."""
    return np.real(np.einsum("ni,ij,nj->n", np.conj(X), A, X))


def empirical_tail_ratio(A, A_bar, C, C_bar, W1, W2, rho, trials=100_000, seed=0):
    """Estimate the probability that a Gaussian draw loses a factor rho of the
    SINR-style ratio, against the two analytic tail bounds.

    Returns (empirical probability, bound 4 rho/(1 - 2 rho) for rho < 1/2,
    bound (4 rho/(omega - 2 rho))^2 for rho < omega/2); a bound is None outside
    its validity range.
    """
    a1 = float(np.real(np.trace(A @ W1)))
    a2 = float(np.real(np.trace(A_bar @ W2)))
    if a1 <= 0 or a2 <= 0:
        raise ValueError("both desired-power inner products must be positive")
    omega = min(a1, a2) / (a1 + a2)
    ratio_star = (a1 + a2) / (
        float(np.real(np.trace(C @ W1))) + float(np.real(np.trace(C_bar @ W2))) + 1.0
    )
    bound_a = 4.0 * rho / (1.0 - 2.0 * rho) if rho < 0.5 else None
    bound_b = (4.0 * rho / (omega - 2.0 * rho)) ** 2 if rho < omega / 2.0 else None
    if bound_a is None and bound_b is None:
        raise ValueError("rho outside the validity range of both bounds")

    rng = np.random.default_rng(seed)
    xi = _gaussian_batch(W1, trials, rng)
    eta = _gaussian_batch(W2, trials, rng)
    ratio = (_quad_batch(xi, A) + _quad_batch(eta, A_bar)) / (
        _quad_batch(xi, C) + _quad_batch(eta, C_bar) + 1.0
    )
    empirical = float(np.mean(ratio <= rho * ratio_star))
    return empirical, bound_a, bound_b


def empirical_tail_power(D, D_bar, W1, W2, v, trials=100_000, seed=0):
    """Estimate the probability of exceeding v times the mean constraint usage,
    against the analytic bound 2 exp(-v/2) (valid for v >= 2)."""
    if v < 2:
        raise ValueError("the power tail bound requires v >= 2")
    mean_usage = float(np.real(np.trace(D @ W1))) + float(np.real(np.trace(D_bar @ W2)))
    bound = 2.0 * np.exp(-v / 2.0)
    if mean_usage == 0:
        return 0.0, bound  # usage is zero almost surely
    rng = np.random.default_rng(seed)
    xi = _gaussian_batch(W1, trials, rng)
    eta = _gaussian_batch(W2, trials, rng)
    usage = _quad_batch(xi, D) + _quad_batch(eta, D_bar)
    empirical = float(np.mean(usage >= v * mean_usage))
    return empirical, bound


def joint_success_probability(forms, sol, rho, v, trials=10_000, seed=0):
    """Estimate the probability that one Gaussian draw simultaneously keeps a
    factor rho of the SDR objective and stays within v times every optimal
    constraint usage.  At the analytic (rho, v) choices this exceeds 1/8."""
    if sol.W2 is None:
        raise ValueError("joint success probability is defined for two-variable solutions")
    rng = np.random.default_rng(seed)
    xi = _gaussian_batch(sol.W1, trials, rng)
    eta = _gaussian_batch(sol.W2, trials, rng)

    theta_star = np.inf
    ratios = None
    for i in range(forms.n_users):
        ni = _quad_batch(xi, forms.A[i]) + _quad_batch(eta, forms.A_bar[i])
        di = _quad_batch(xi, forms.C[i]) + _quad_batch(eta, forms.C_bar[i]) + 1.0
        star = (
            np.real(np.trace(forms.A[i] @ sol.W1)) + np.real(np.trace(forms.A_bar[i] @ sol.W2))
        ) / (
            np.real(np.trace(forms.C[i] @ sol.W1))
            + np.real(np.trace(forms.C_bar[i] @ sol.W2))
            + 1.0
        )
        theta_star = min(theta_star, star)
        ratios = ni / di if ratios is None else np.minimum(ratios, ni / di)

    ok = ratios >= rho * theta_star
    opt_usage = constraint_usage(forms, sol.W1, sol.W2)
    for j in range(forms.n_constraints):
        usage = _quad_batch(xi, forms.R[j]) + _quad_batch(eta, forms.R_bar[j])
        ok &= usage <= v * opt_usage[j] + 1e-12
    return float(np.mean(ok))
