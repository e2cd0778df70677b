"""Spectral diagnostics for the projected factorization.

Everything here quantifies how well the k-step Krylov space captures the
dominant right singular subspace and what that implies for the projected
matrix: the low-rank approximation gap gamma_k = ||A - P_{k+1} B_k Q_k'||,
the Ritz values of B_k against the singular values of A, the tangent-style
subspace distance Delta_k, the classical Lagrange interpolation factors, and
the a-priori bounds assembling all of them into per-step reports.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bidiag import BidiagState
from .csvio import write_csv
from .gallery import SpectrumModel
from .linalg import SvdFactorization, spectral_norm
from .noise import PicardDiagnostic

__all__ = [
    "IllConditionedError",
    "AnalysisRecord",
    "BoundReport",
    "gamma_exact",
    "gamma_via_Gk",
    "ritz_values",
    "natural_order_check",
    "cauchy_interlace_check",
    "mirsky_gap_check",
    "delta_norm_via_angles",
    "delta_matrix_via_projection",
    "delta_direct",
    "sigma_delta_norm",
    "lagrange_factor",
    "near_best_predicate",
    "xi_factor",
    "bound_report",
    "decay_diagnostic",
    "write_analysis_csv",
    "write_ritz_csv",
]

#: Vandermonde systems with condition estimates beyond this are refused.
VANDERMONDE_COND_LIMIT = 1e12
#: sin(theta) this close to 1 marks the tangent as infinite.
SIN_SATURATION = 1.0 - 1e-12


class IllConditionedError(ValueError):
    """A small-scale oracle was asked to solve a hopeless linear system."""


# Low-rank approximation gap ==================================================
def gamma_exact(A, Q) -> float:
    """||A (I - Q Q')|| via SVD of the explicit residual matrix.

    ``Q`` may be an (n, k) orthonormal basis or a :class:`BidiagState`,
    in which case its full current Krylov basis is used.
    """
    if isinstance(Q, BidiagState):
        Q = Q.Q_k(Q.max_k)
    resid = A - (A @ Q) @ Q.T
    return spectral_norm(resid)


def gamma_via_Gk(state: BidiagState, k: int) -> float:
    """The same gap from the trailing block of the bidiagonal matrix.

    For a complete factorization, deleting the leading (k+1) x k part of
    the full bidiagonal matrix leaves the (n-k+1) x (n-k) block G_k with
    diagonal alpha_{k+1}..alpha_n and subdiagonal beta_{k+2}..beta_{n+1},
    and ||G_k|| equals gamma_k exactly.  On a breakdown-truncated run the
    missing trailing entries are below the breakdown tolerance, so the
    value is accurate to roughly n * 1e-14 * ||A||.
    """
    if not state.terminal:
        raise ValueError("gamma_via_Gk needs a complete or broken-down factorization")
    a = state.alpha[k:]
    b = state.beta[k + 1 :]
    if a.size == 0:
        raise ValueError(f"no trailing block at k={k} (have {len(state.alphas)} alphas)")
    if b.size == a.size:
        G = np.zeros((a.size + 1, a.size))
    elif b.size == a.size - 1:
        G = np.zeros((a.size, a.size))
    else:
        raise ValueError("inconsistent coefficient arrays")
    G[np.arange(a.size), np.arange(a.size)] = a
    G[np.arange(1, b.size + 1), np.arange(b.size)] = b
    return spectral_norm(G)


# Ritz values ================================================================
def ritz_values(state: BidiagState, k: int) -> np.ndarray:
    """Singular values of B_k in descending order (the k Ritz values)."""
    return np.linalg.svd(state.B(k), compute_uv=False)


def natural_order_check(theta, sigma, tol: float | None = None) -> bool:
    """True iff sigma_{i+1} < theta_i < sigma_i for every i <= k.

    ``tol`` is an additive slack (default ``1e-12 * sigma_1``) absorbing
    roundoff ties: converged Ritz values can sit within machine precision
    of the singular value they approximate.
    """
    theta = np.asarray(theta, dtype=float)
    sigma = np.asarray(sigma, dtype=float)
    k = theta.size
    if sigma.size < k + 1:
        raise ValueError("need sigma_1..sigma_{k+1} to test the natural order")
    if tol is None:
        tol = 1e-12 * sigma[0]
    lower = sigma[1 : k + 1] - tol < theta
    upper = theta < sigma[:k] + tol
    return bool(np.all(lower & upper))


def cauchy_interlace_check(theta, sigma, tol: float | None = None) -> bool:
    """Strict interlacing sigma_{n-k+i} < theta_i < sigma_i (with slack)."""
    theta = np.asarray(theta, dtype=float)
    sigma = np.asarray(sigma, dtype=float)
    k = theta.size
    n = sigma.size
    if k > n:
        raise ValueError("more Ritz values than singular values")
    if tol is None:
        tol = 1e-12 * sigma[0]
    lower = sigma[n - k :] - tol < theta
    upper = theta < sigma[:k] + tol
    return bool(np.all(lower & upper))


def mirsky_gap_check(theta, sigma, gamma, tol: float | None = None) -> bool:
    """True iff 0 < sigma_i - theta_i <= gamma_k for every i <= k.

    Both arms carry an additive slack (default ``1e-10 * sigma_1``): the
    positive gap is guaranteed by strict interlacing but shrinks below
    machine precision once a Ritz value converges.
    """
    theta = np.asarray(theta, dtype=float)
    sigma = np.asarray(sigma, dtype=float)
    k = theta.size
    if sigma.size < k:
        raise ValueError("need at least k singular values")
    if tol is None:
        tol = 1e-10 * sigma[0]
    gap = sigma[:k] - theta
    return bool(np.all((gap > -tol) & (gap <= gamma + tol)))


# Subspace distance ==========================================================
def delta_norm_via_angles(V, Q):
    """Largest principal angle between span(V_k) and the Krylov space.

    Parameters
    ----------
    V : (n, >=k) ndarray
        Right singular vectors (columns 1..k are used).
    Q : (n, k) ndarray
        Orthonormal Krylov basis.

    Returns
    -------
    (sin_theta, delta_norm) : tuple of float
        ``sin_theta = ||(I - Q Q') V_k||`` and the tangent
        ``delta_norm = sin/sqrt(1 - sin^2)``; ``inf`` once sin saturates
        within 1e-12 of 1.
    """
    k = Q.shape[1]
    Vk = V[:, :k]
    sin_theta = min(spectral_norm(Vk - Q @ (Q.T @ Vk)), 1.0)
    if sin_theta >= SIN_SATURATION:
        return sin_theta, math.inf
    return sin_theta, sin_theta / math.sqrt((1.0 - sin_theta) * (1.0 + sin_theta))


def delta_matrix_via_projection(V, Q):
    """The (n-k) x k distance matrix Delta_k recovered from the Krylov basis.

    Writing the coordinates of Q in the right singular basis as
    M = V' Q = [M1; M2], the Krylov space equals the graph subspace
    spanned by V_k + V_perp Delta_k exactly when Delta_k = M2 M1^{-1}.
    Returns ``None`` when M1 is numerically singular (a right angle).
    """
    k = Q.shape[1]
    M = V.T @ Q
    M1 = M[:k]
    M2 = M[k:]
    try:
        return np.linalg.solve(M1.T, M2.T).T
    except np.linalg.LinAlgError:
        return None


def delta_direct(fact: SvdFactorization, b, k: int) -> np.ndarray:
    """Delta_k from its defining formula (small-scale oracle).

    With D = diag(sigma_j u_j' b) and T_k the n x k Vandermonde matrix in
    the squared singular values (row j = (1, sigma_j^2, ..., sigma_j^{2k-2})),
    split after the first k rows into D_1, D_2, T_{k1}, T_{k2}:

        Delta_k = D_2 T_{k2} T_{k1}^{-1} D_1^{-1}.

    Raises
    ------
    IllConditionedError
        When cond(T_{k1}) exceeds 1e12; beyond that the formula's value is
        numerically meaningless and the angle route must be used instead.
    ValueError
        When some coefficient sigma_j u_j' b with j <= k vanishes exactly
        (names the index).
    """
    s = fact.sigma
    n = s.size
    if not 1 <= k <= n - 1:
        raise ValueError(f"k={k} outside 1..{n - 1}")
    d = s * fact.coefficients(b)
    zero = np.nonzero(d[:k] == 0.0)[0]
    if zero.size:
        raise ValueError(f"coefficient sigma_j * u_j'b vanishes at j={zero[0] + 1}")
    T = np.vander(s**2, k, increasing=True)
    T1 = T[:k]
    T2 = T[k:]
    cond = np.linalg.cond(T1)
    if not np.isfinite(cond) or cond > VANDERMONDE_COND_LIMIT:
        raise IllConditionedError(
            f"cond(T_k1) = {cond:.3e} exceeds {VANDERMONDE_COND_LIMIT:g} at k={k}"
        )
    M = np.linalg.solve(T1.T, T2.T).T
    return (d[k:, None] * M) / d[None, :k]


def sigma_delta_norm(fact: SvdFactorization, b, k: int, Q=None) -> float:
    """||Delta_k Sigma_k|| (equivalently ||Sigma_k Delta_k'||).

    Uses the defining small-scale formula by default; pass the Krylov basis
    ``Q`` to use the projection route, which stays well-conditioned at
    scale.  Returns ``inf`` when the projection route meets a right angle.
    """
    if Q is None:
        delta = delta_direct(fact, b, k)
    else:
        delta = delta_matrix_via_projection(fact.V, Q)
        if delta is None:
            return math.inf
    return spectral_norm(delta * fact.sigma[:k])


# Interpolation factors =======================================================
def lagrange_factor(sigma, k: int):
    """Lagrange factors |L_j^{(k)}(0)| of the squared singular values.

    ``|L_j^{(k)}(0)| = prod_{i<=k, i!=j} sigma_i^2 / |sigma_j^2 - sigma_i^2|``
    for j = 1..k, with the k = 1 value defined as 1.  Returns the array of
    factors and their maximum.

    Raises ``ValueError`` when two of sigma_1..sigma_k coincide within
    1e-14 relative (the factors blow up on repeated singular values).
    """
    sigma = np.asarray(sigma, dtype=float)
    if not 1 <= k <= sigma.size:
        raise ValueError(f"k={k} outside 1..{sigma.size}")
    if k == 1:
        return np.ones(1), 1.0
    s = sigma[:k]
    gaps = s[:-1] - s[1:]
    tied = np.nonzero(gaps <= 1e-14 * sigma[0])[0]
    if tied.size:
        raise ValueError(
            f"singular values {tied[0] + 1} and {tied[0] + 2} coincide within 1e-14 relative"
        )
    s2 = s**2
    denom = np.abs(s2[None, :] - s2[:, None])
    np.fill_diagonal(denom, 1.0)  # the j = i term is excluded from the product
    ratio = s2[:, None] / denom
    np.fill_diagonal(ratio, 1.0)
    factors = np.prod(ratio, axis=0)
    return factors, float(np.max(factors))


# Predicates and bounds ======================================================
def near_best_predicate(gamma, sigma_k, sigma_k1, tol: float = 0.0) -> bool:
    """Is the rank-k approximation near best:
    sigma_{k+1} <= gamma_k < (sigma_k + sigma_{k+1}) / 2 (additive slack)."""
    return bool((gamma >= sigma_k1 - tol) and (gamma < 0.5 * (sigma_k + sigma_k1) + tol))


def xi_factor(delta_norm: float) -> float:
    """The projection factor xi_k entering the gap bounds.

    Equals sqrt((d/(1+d^2))^2 + 1) for d = ||Delta_k|| < 1; for d >= 1
    (or an infinite tangent) only the bound sqrt(5)/2 is available and is
    returned.
    """
    if not math.isfinite(delta_norm) or delta_norm >= 1.0:
        return math.sqrt(5.0) / 2.0
    return math.sqrt((delta_norm / (1.0 + delta_norm**2)) ** 2 + 1.0)


@dataclass(frozen=True)
class AnalysisRecord:
    """Per-step spectral diagnostics of one run."""

    k: int
    gamma: float
    gamma_Gk: float
    sigma_k1: float
    ritz: np.ndarray
    delta_norm: float
    sin_theta: float
    sigma_delta: float
    lagrange_max: float
    near_best: bool
    natural_order: bool
    alpha_beta_sum: float


@dataclass(frozen=True)
class BoundReport:
    """Right-hand sides of the a-priori bounds, evaluated per step.

    Every bound is evaluated twice: with the realized coefficient ratio

        R_k = max_{k<i<=n} |u_i'b| / min_{i<=k} |u_i'b|

    and with its decay-model simplification (``(sigma_{k+1}/sigma_k)^(1+beta)``
    for k <= k0, and 1 past the transition index).  Unbounded O(.) factors
    in the severe-decay constants are evaluated as their finite part 1; the
    audits therefore flag rather than fail up to a factor 2.
    """

    k: int
    regime: str
    k0_used: int
    ratio_realized: float
    ratio_asymptotic: float
    xi_k: float
    eta_k: float
    eta_k_asymptotic: float
    epsilon_k_bound: float
    delta_bound: float
    delta_bound_asymptotic: float
    sigma_delta_bound: float
    sigma_delta_bound_asymptotic: float
    near_best_condition: bool
    natural_order_condition: bool


def bound_report(
    fact: SvdFactorization,
    picard: PicardDiagnostic,
    spectrum: SpectrumModel,
    delta_norm: float,
    k: int,
) -> BoundReport:
    """Evaluate the decay-regime bounds at step k with realized quantities.

    Requires a non-empirical spectrum model (fit one first for
    kernel-defined problems) and a positive transition index in the
    diagnostic.  Raises ``ValueError`` when a leading coefficient
    vanishes exactly (names the index).
    """
    if spectrum.kind == "empirical":
        raise ValueError("bound_report needs a decay model; fit one for empirical spectra")
    s = fact.sigma
    n = s.size
    if not 1 <= k <= n - 1:
        raise ValueError(f"k={k} outside 1..{n - 1}")
    k0 = picard.k0
    if k0 < 1:
        raise ValueError("transition index k0 = 0: bounds are undefined")
    head = picard.coef[:k]
    zero = np.nonzero(head == 0.0)[0]
    if zero.size:
        raise ValueError(f"coefficient u_j'b vanishes at j={zero[0] + 1}")
    ratio = float(np.max(picard.coef[k:]) / np.min(head))
    beta = spectrum.beta_picard if spectrum.beta_picard is not None else picard.beta_fit
    if k <= k0 and beta is not None and math.isfinite(beta):
        ratio_asym = float((s[k] / s[k - 1]) ** (1.0 + beta))
    elif k <= k0:
        ratio_asym = math.nan
    else:
        ratio_asym = 1.0
    xi = xi_factor(delta_norm)

    if spectrum.kind == "severe":
        crowd = 1.0 if k <= k0 else math.sqrt(k - k0 + 1.0)
        decay = s[k] / s[k - 1]
        delta_b = decay * ratio
        delta_b_asym = decay * ratio_asym
        sd_b = s[k] * ratio * crowd
        sd_b_asym = s[k] * ratio_asym * crowd
        eta = xi * ratio * crowd
        eta_asym = xi * ratio_asym * crowd
        natural_cond = spectrum.rho >= 1.0 + math.sqrt(2.0)
    else:
        alpha = spectrum.alpha
        lag = 1.0 if k == 1 else lagrange_factor(s, k)[1]
        if k == 1:
            poly_plain = math.sqrt(1.0 / (2.0 * alpha - 1.0))
            poly_split = poly_plain
        else:
            poly_plain = math.sqrt(k**2 / (4.0 * alpha**2 - 1.0) + k / (2.0 * alpha - 1.0))
            if k <= k0:
                poly_split = poly_plain
            else:
                poly_split = math.sqrt(
                    k * k0 / (4.0 * alpha**2 - 1.0)
                    + k * (k - k0 + 1.0) / (2.0 * alpha - 1.0)
                )
        delta_b = ratio * poly_plain * lag
        delta_b_asym = ratio_asym * poly_plain * lag
        sd_b = s[k - 1] * ratio * poly_split * lag
        sd_b_asym = s[k - 1] * ratio_asym * poly_split * lag
        eta = xi * (s[k - 1] / s[k]) * ratio * poly_split * lag
        eta_asym = xi * (s[k - 1] / s[k]) * ratio_asym * poly_split * lag
        natural_cond = 1.0 + math.sqrt(1.0 + eta**2) < ((k + 1.0) / k) ** alpha

    near_cond = math.sqrt(1.0 + eta**2) < 0.5 * (s[k - 1] / s[k]) + 0.5
    return BoundReport(
        k=k,
        regime=spectrum.kind,
        k0_used=int(k0),
        ratio_realized=ratio,
        ratio_asymptotic=ratio_asym,
        xi_k=xi,
        eta_k=eta,
        eta_k_asymptotic=eta_asym,
        epsilon_k_bound=eta * s[k],
        delta_bound=delta_b,
        delta_bound_asymptotic=delta_b_asym,
        sigma_delta_bound=sd_b,
        sigma_delta_bound_asymptotic=sd_b_asym,
        near_best_condition=bool(near_cond),
        natural_order_condition=bool(natural_cond),
    )


# Decay of the recurrence coefficients =======================================
def decay_diagnostic(state: BidiagState, kmax: int | None = None):
    """Pairs (alpha_{k+1} + beta_{k+2}, gamma_k via the trailing block).

    Returns a list of ``(k, coefficient_sum, gamma_Gk)`` rows; the trailing
    block norm is nan when the factorization is still running.
    """
    navail = min(len(state.alphas) - 1, len(state.betas) - 2)
    if kmax is not None:
        navail = min(navail, kmax)
    rows = []
    for k in range(1, navail + 1):
        coeff_sum = state.alphas[k] + state.betas[k + 1]
        gk = gamma_via_Gk(state, k) if state.terminal else math.nan
        rows.append((k, coeff_sum, gk))
    return rows


# CSV export =================================================================
ANALYSIS_COLUMNS = [
    "k",
    "gamma",
    "gamma_Gk",
    "sigma_k1",
    "delta_norm",
    "sin_theta",
    "sigma_delta",
    "lagrange_max",
    "near_best",
    "natural_order",
    "alpha_beta_sum",
    "regime",
    "k0_used",
    "ratio_realized",
    "ratio_asymptotic",
    "xi_k",
    "eta_k",
    "eta_k_asymptotic",
    "epsilon_k_bound",
    "delta_bound",
    "delta_bound_asymptotic",
    "sigma_delta_bound",
    "sigma_delta_bound_asymptotic",
    "near_best_condition",
    "natural_order_condition",
]


def write_analysis_csv(records, reports, path) -> None:
    """Export per-step records (and bound reports, where present) as CSV.

    ``reports`` aligns with ``records``; entries may be ``None`` when no
    decay model was available, in which case the bound columns are nan.
    """
    rows = []
    for rec, rep in zip(records, reports):
        row = [
            rec.k,
            rec.gamma,
            rec.gamma_Gk,
            rec.sigma_k1,
            rec.delta_norm,
            rec.sin_theta,
            rec.sigma_delta,
            rec.lagrange_max,
            rec.near_best,
            rec.natural_order,
            rec.alpha_beta_sum,
        ]
        if rep is None:
            row += ["none", -1] + [math.nan] * 10 + ["nan", "nan"]
        else:
            row += [
                rep.regime,
                rep.k0_used,
                rep.ratio_realized,
                rep.ratio_asymptotic,
                rep.xi_k,
                rep.eta_k,
                rep.eta_k_asymptotic,
                rep.epsilon_k_bound,
                rep.delta_bound,
                rep.delta_bound_asymptotic,
                rep.sigma_delta_bound,
                rep.sigma_delta_bound_asymptotic,
                rep.near_best_condition,
                rep.natural_order_condition,
            ]
        rows.append(row)
    write_csv(path, "analysis", ANALYSIS_COLUMNS, rows)


def write_ritz_csv(records, path) -> None:
    """Export Ritz values in long format (columns k, i, theta)."""
    rows = []
    for rec in records:
        for i, theta in enumerate(rec.ritz, start=1):
            rows.append([rec.k, i, float(theta)])
    write_csv(path, "ritz", ["k", "i", "theta"], rows)
