"""Bisection SDR solver for the max-min-fair AF design problems.

The fractional SDPs (one-variable and two-variable) are quasi-convex: for a
fixed SINR level the feasibility question is a convex SDP.  Bisection on the
level therefore solves them to any accuracy.  Each feasibility test is posed as
a max-margin SDP (maximize the worst slack) so that a strictly positive margin
certifies feasibility and the witness tracks the max-min optimizer.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import cvxpy as cp
import numpy as np
import scipy.linalg

from .forms import constraint_usage

R1 = "r1"
R2 = "r2"

STATUS_OPTIMAL = "optimal"
STATUS_INFEASIBLE = "infeasible"
STATUS_SOLVER_FAILURE = "solver_failure"

DEFAULT_SOLVER = "CLARABEL"
FALLBACK_SOLVER = "SCS"


class SolverFailure(RuntimeError):
    """The conic solver did not converge; never silently treated as infeasible."""


def hermitian_to_real(H):
    """Map a Hermitian n x n matrix to its real symmetric 2n x 2n image.

    [[Re H, -Im H], [Im H, Re H]].  The image is PSD iff H is, its eigenvalues
    are those of H with doubled multiplicity, and real inner products satisfy
    A . B = image(A) . image(B) / 2.
    """
    H = np.asarray(H)
    if not np.allclose(H, H.conj().T, atol=1e-10 * max(1.0, np.abs(H).max())):
        raise ValueError("input is not Hermitian")
    re, im = H.real, H.imag
    return np.block([[re, -im], [im, re]])


def numeric_rank(W, ratio_tol=1e-6):
    """Count eigenvalues above ratio_tol times the largest; 0 for W = 0."""
    evals = np.linalg.eigvalsh(W)
    top = evals[-1]
    if top <= 0:
        return 0
    return int(np.sum(evals > ratio_tol * top))


def extract_rank_one(W):
    """Recover w with w w^H = W from a (numerically) rank-one PSD matrix.

    The global phase is fixed so the largest-magnitude entry is real
    nonnegative, which makes serialized outputs reproducible.
    """
    W = np.asarray(W)
    if numeric_rank(W, 1e-6) > 1:
        raise ValueError("matrix has numeric rank > 1")
    evals, evecs = np.linalg.eigh(W)
    lam = evals[-1]
    if lam <= 0:
        return np.zeros(W.shape[0], dtype=complex)
    w = np.sqrt(lam) * evecs[:, -1]
    pivot = np.argmax(np.abs(w))
    phase = w[pivot] / np.abs(w[pivot])
    return w * np.conj(phase)


@dataclass
class FeasibilityResult:
    feasible: bool
    W1: np.ndarray | None
    W2: np.ndarray | None
    margin: float
    solver_status: str


@dataclass
class SdrSolution:
    variant: str
    W1: np.ndarray | None
    W2: np.ndarray | None
    value: float
    gap: float
    ranks: tuple
    status: str
    n_iterations: int
    usage: np.ndarray | None = None

    def summary(self):
        return {
            "variant": self.variant,
            "value": self.value,
            "gap": self.gap,
            "ranks": list(self.ranks),
            "status": self.status,
            "iterations": self.n_iterations,
            "usage": None if self.usage is None else self.usage.tolist(),
        }


class FeasibilityOracle:
    """Reusable level-feasibility SDP with the level as a cvxpy Parameter.

    Building the problem once per (forms, variant) keeps the per-bisection-step
    cost down to a single conic solve.
    """

    def __init__(self, forms, variant=R2, solver=DEFAULT_SOLVER):
        if variant not in (R1, R2):
            raise ValueError(f"unknown variant {variant!r}")
        self.forms = forms
        self.variant = variant
        self.solver = solver
        dim = forms.dim
        self._W1 = cp.Variable((dim, dim), hermitian=True)
        self._W2 = cp.Variable((dim, dim), hermitian=True) if variant == R2 else None
        self._level = cp.Parameter(nonneg=True)
        margin = cp.Variable()

        def dot(stack_u, stack_b, i):
            expr = cp.real(cp.trace(stack_u[i] @ self._W1))
            if self._W2 is not None:
                expr = expr + cp.real(cp.trace(stack_b[i] @ self._W2))
            return expr

        cons = [self._W1 >> 0]
        if self._W2 is not None:
            cons.append(self._W2 >> 0)
        for i in range(forms.n_users):
            desired = dot(forms.A, forms.A_bar, i)
            interference = dot(forms.C, forms.C_bar, i)
            cons.append(desired - self._level * interference - self._level >= margin)
        for j in range(forms.n_constraints):
            cons.append(dot(forms.R, forms.R_bar, j) <= forms.budgets[j])
        self._margin = margin
        self._problem = cp.Problem(cp.Maximize(margin), cons)

    def check(self, level, feas_tol=1e-7, polish=False):
        """Decide feasibility of the given SINR level; return a witness if feasible.

        With polish=True the solve runs at much tighter solver tolerances,
        which cleans spurious small eigenvalues from the witness matrices.
        """
        self._level.value = float(level)
        status = None
        for solver in dict.fromkeys((self.solver, FALLBACK_SOLVER)):
            opts = {}
            if polish and solver == "CLARABEL":
                opts = dict(tol_gap_abs=1e-11, tol_gap_rel=1e-11, tol_feas=1e-11)
            try:
                with warnings.catch_warnings():
                    # Inaccurate solutions are handled via the status below.
                    warnings.simplefilter("ignore", UserWarning)
                    self._problem.solve(solver=solver, **opts)
                status = self._problem.status
            except cp.error.SolverError as exc:
                status = f"error:{exc}"
                continue
            if status in (cp.OPTIMAL, cp.OPTIMAL_INACCURATE):
                break
        if status not in (cp.OPTIMAL, cp.OPTIMAL_INACCURATE):
            raise SolverFailure(f"solver returned status {status}")
        margin = float(self._margin.value)
        feasible = margin >= -feas_tol
        W1 = W2 = None
        if feasible:
            W1 = _psd_clean(self._W1.value)
            if self._W2 is not None:
                W2 = _psd_clean(self._W2.value)
        return FeasibilityResult(feasible, W1, W2, margin, status)


def _psd_clean(W):
    """Hermitianize and clip tiny negative eigenvalues from a solver witness."""
    W = 0.5 * (W + W.conj().T)
    evals, evecs = np.linalg.eigh(W)
    evals = np.clip(evals, 0.0, None)
    return (evecs * evals) @ evecs.conj().T


def solve_feasibility(forms, level, variant=R2, solver=DEFAULT_SOLVER, feas_tol=1e-7):
    """One-off feasibility check at a fixed SINR level."""
    return FeasibilityOracle(forms, variant, solver).check(level, feas_tol)


def upper_bound_gamma(forms, variant=R2):
    """Finite overestimate of the SDR optimum used to initialize bisection.

    Uses the first constraint whose matrices are positive definite (the total
    power budget for relay problems): for each user the desired power is at
    most max(lam_max(A; R), lam_max(A_bar; R_bar)) times the constraint usage,
    which is capped by the budget.  If no single constraint is positive
    definite but a full per-relay set exists, their sum is used.
    """
    candidates = []
    for j in range(forms.n_constraints):
        R, Rb, b = forms.R[j], forms.R_bar[j], forms.budgets[j]
        if np.linalg.eigvalsh(R)[0] > 0 and np.linalg.eigvalsh(Rb)[0] > 0:
            candidates.append((R, Rb, b))
            break
    if not candidates:
        relay_idx = [j for j, lab in enumerate(forms.labels) if lab.startswith("relay_")]
        if relay_idx:
            R = forms.R[relay_idx].sum(axis=0)
            Rb = forms.R_bar[relay_idx].sum(axis=0)
            if np.linalg.eigvalsh(R)[0] > 0 and np.linalg.eigvalsh(Rb)[0] > 0:
                candidates.append((R, Rb, forms.budgets[relay_idx].sum()))
    if not candidates:
        raise ValueError("no positive-definite constraint available for the bound")
    R, Rb, b = candidates[0]
    bound = 0.0
    for i in range(forms.n_users):
        lam = scipy.linalg.eigh(forms.A[i], R, eigvals_only=True)[-1]
        if variant == R2:
            lam = max(lam, scipy.linalg.eigh(forms.A_bar[i], Rb, eigvals_only=True)[-1])
        bound = max(bound, b * lam)
    return float(bound)


def _witness_key(res):
    """Ordering key preferring low-rank witnesses with small residual spectrum."""
    total_rank = 0
    residual = 0.0
    for W in (res.W1, res.W2):
        if W is None:
            continue
        total_rank += numeric_rank(W)
        evals = np.linalg.eigvalsh(W)
        if len(evals) > 1 and evals[-1] > 0:
            residual = max(residual, evals[-2] / evals[-1])
    return (total_rank, residual)


def bisect_sdr(
    forms,
    variant=R2,
    tol_rel=1e-4,
    tol_abs=1e-7,
    max_iter=60,
    solver=DEFAULT_SOLVER,
):
    """Solve the one- or two-variable SDR by bisection on the SINR level.

    Returns the last feasible level with a bracket of width `gap` around the
    true SDR optimum, together with the witness matrices from that level.
    """
    if tol_rel <= 0 or tol_abs <= 0:
        raise ValueError("tolerances must be positive")
    oracle = FeasibilityOracle(forms, variant, solver)
    hi = upper_bound_gamma(forms, variant) * (1.0 + 1e-6) + tol_abs
    res = oracle.check(0.0)
    if not res.feasible:
        return SdrSolution(variant, None, None, 0.0, hi, (), STATUS_INFEASIBLE, 0)
    lo, best = 0.0, res

    # hi is strictly above the optimum by construction, so it needs no probe.
    n_iter = 1
    while hi - lo > tol_rel * max(lo, 0.0) + tol_abs and n_iter < max_iter:
        mid = 0.5 * (lo + hi)
        res = oracle.check(mid)
        n_iter += 1
        if res.feasible:
            lo, best = mid, res
        else:
            hi = mid

    # Final high-accuracy solve at the accepted level.  Both witnesses are
    # feasible at the same level; keep whichever has the cleaner spectrum
    # (lower numeric rank, then smaller residual eigenvalue mass).
    try:
        res = FeasibilityOracle(forms, variant, solver).check(lo, polish=True)
        if res.feasible and _witness_key(res) < _witness_key(best):
            best = res
    except SolverFailure:
        pass  # keep the bisection witness

    W1, W2 = best.W1, best.W2
    ranks = (numeric_rank(W1),) if W2 is None else (numeric_rank(W1), numeric_rank(W2))
    usage = constraint_usage(forms, W1, W2)
    return SdrSolution(
        variant=variant,
        W1=W1,
        W2=W2,
        value=lo,
        gap=hi - lo,
        ranks=ranks,
        status=STATUS_OPTIMAL,
        n_iterations=n_iter,
        usage=usage,
    )
