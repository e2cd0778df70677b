"""Iterative regularization by projection onto Krylov spaces.

Step k solves the projected problem min_y ||B_k y - beta_1 e_1|| and lifts
the solution back, x_k = Q_k y_k, which is exactly the minimizer of
||A x - b|| over the k-th Krylov space of (A'A, A'b).  On noisy data the
realized error falls, bottoms out at the semi-convergence index kstar, and
rises again as the iterates start inverting noise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bidiag import BidiagState, bidiag_run
from .csvio import write_csv
from .linalg import least_squares
from .noise import NoisyInstance, picard_diagnostic

__all__ = [
    "LsqrTrace",
    "lsqr_iterate",
    "lsqr_sweep",
    "default_kmax",
    "write_lsqr_csv",
]


def lsqr_iterate(state: BidiagState, k: int) -> np.ndarray:
    """The k-th projected solution x_k = Q_k B_k^+ (beta_1 e_1)."""
    if not 1 <= k <= state.max_k:
        raise ValueError(f"k={k} outside available range 1..{state.max_k}")
    B = state.B(k)
    rhs = np.zeros(B.shape[0])
    rhs[0] = state.betas[0]
    y = least_squares(B, rhs)
    return state.Q_k(k) @ y


@dataclass(frozen=True)
class LsqrTrace:
    """Realized errors/residuals of the projected iterates x_1..x_K.

    ``kstar`` is the semi-convergence index (argmin of the realized error,
    ties to the smallest k); ``breakdown`` names the recurrence entry that
    stopped the sweep early, if any.
    """

    ks: np.ndarray
    rel_errors: np.ndarray
    residuals: np.ndarray
    kstar: int
    semi_convergent: bool
    breakdown: str | None


def default_kmax(instance: NoisyInstance) -> int:
    """Default sweep length min(n, 4 * k0 + 20); n on noiseless data."""
    n = instance.problem.n
    if instance.eta <= 0.0:
        return n
    k0 = picard_diagnostic(instance).k0
    return min(n, 4 * k0 + 20)


def lsqr_sweep(
    instance: NoisyInstance,
    kmax: int | None = None,
    state: BidiagState | None = None,
) -> LsqrTrace:
    """Run the projected iteration for k = 1..kmax and locate kstar.

    A fresh factorization is built unless a state with enough steps is
    supplied.  Breakdown truncates the trace and is recorded, not raised.
    """
    prob = instance.problem
    if kmax is None:
        kmax = default_kmax(instance)
    if kmax < 1:
        raise ValueError("kmax must be at least 1")
    breakdown = None
    if state is None:
        state, err = bidiag_run(
            prob.A, instance.b, steps=kmax, norm_A=float(prob.svd.sigma[0])
        )
        breakdown = err.entry if err is not None else None
    elif state.breakdown is not None:
        breakdown = state.breakdown
    K = min(kmax, state.max_k)
    if K < 1:
        raise ValueError("factorization broke down before the first iterate")
    nx = float(np.linalg.norm(prob.x_true))
    ks = np.arange(1, K + 1)
    rel_errors = np.empty(K)
    residuals = np.empty(K)
    for k in ks:
        x = lsqr_iterate(state, int(k))
        rel_errors[k - 1] = np.linalg.norm(x - prob.x_true) / nx
        residuals[k - 1] = np.linalg.norm(prob.A @ x - instance.b)
    best = int(np.argmin(rel_errors))
    semi = bool(rel_errors[-1] > rel_errors[best] + 1e-12)
    return LsqrTrace(
        ks=ks,
        rel_errors=rel_errors,
        residuals=residuals,
        kstar=best + 1,
        semi_convergent=semi,
        breakdown=breakdown,
    )


def write_lsqr_csv(trace: LsqrTrace, path) -> None:
    """Export the trace as CSV (kind ``lsqr``); flags the kstar row."""
    rows = [
        [int(k), trace.rel_errors[i], trace.residuals[i], bool(k == trace.kstar)]
        for i, k in enumerate(trace.ks)
    ]
    write_csv(path, "lsqr", ["k", "rel_error", "residual", "is_kstar"], rows)
