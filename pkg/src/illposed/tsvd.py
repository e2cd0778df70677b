"""Truncated-SVD regularization: the spectral-cutoff reference method.

The rank-k solution keeps the first k spectral components of the data,

    x_k = sum_{i<=k} (u_i' b / sigma_i) v_i,

and the sweep locates the truncation level of smallest realized error,
which serves as the reference every iterative method is compared against.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .csvio import write_csv
from .linalg import SvdFactorization, as_vector
from .noise import NoisyInstance

__all__ = [
    "RANK_FLOOR_REL",
    "TsvdSweep",
    "tsvd_solution",
    "tsvd_sweep",
    "write_tsvd_csv",
]

#: Components with sigma_k at or below this multiple of sigma_1 are not
#: inverted; they carry no information at working precision.
RANK_FLOOR_REL = 1e-14


def tsvd_solution(fact: SvdFactorization, b, k: int) -> np.ndarray:
    """The rank-k spectral-cutoff solution.

    Raises ``ValueError`` when k is outside 1..n or sigma_k sits at the
    numerical rank floor (``1e-14 * sigma_1``).
    """
    b = as_vector(b)
    s = fact.sigma
    if not 1 <= k <= s.size:
        raise ValueError(f"k={k} outside 1..{s.size}")
    if s[k - 1] <= RANK_FLOOR_REL * s[0]:
        raise ValueError(
            f"sigma_{k} = {s[k - 1]:.3e} is at the numerical rank floor; "
            "the truncated solution is not defined there"
        )
    c = fact.coefficients(b)[:k]
    return fact.V[:, :k] @ (c / s[:k])


@dataclass(frozen=True)
class TsvdSweep:
    """Realized errors and residuals of x_1..x_kmax.

    ``best_k`` is the truncation level of smallest relative error (ties
    resolved to the smallest k); it realizes the transition index of the
    instance and anchors the semi-convergence comparisons.
    """

    ks: np.ndarray
    rel_errors: np.ndarray
    residuals: np.ndarray
    best_k: int
    best_error: float


def tsvd_sweep(instance: NoisyInstance, kmax: int | None = None) -> TsvdSweep:
    """Sweep truncation levels k = 1..kmax (capped at the rank floor)."""
    prob = instance.problem
    fact = prob.svd
    s = fact.sigma
    rank = int(np.sum(s > RANK_FLOOR_REL * s[0]))
    kmax = rank if kmax is None else min(kmax, rank)
    if kmax < 1:
        raise ValueError("matrix has no components above the rank floor")
    c = fact.coefficients(instance.b)[:kmax]
    # Column k-1 of the cumulative sum is x_k; one pass gives the whole sweep.
    X = np.cumsum(fact.V[:, :kmax] * (c / s[:kmax]), axis=1)
    nx = float(np.linalg.norm(prob.x_true))
    rel_errors = np.linalg.norm(X - prob.x_true[:, None], axis=0) / nx
    residuals = np.linalg.norm(prob.A @ X - instance.b[:, None], axis=0)
    best = int(np.argmin(rel_errors))
    return TsvdSweep(
        ks=np.arange(1, kmax + 1),
        rel_errors=rel_errors,
        residuals=residuals,
        best_k=best + 1,
        best_error=float(rel_errors[best]),
    )


def write_tsvd_csv(sweep: TsvdSweep, path) -> None:
    """Export the sweep as CSV (kind ``tsvd``)."""
    rows = [
        [int(k), sweep.rel_errors[i], sweep.residuals[i]]
        for i, k in enumerate(sweep.ks)
    ]
    write_csv(path, "tsvd", ["k", "rel_error", "residual"], rows)
