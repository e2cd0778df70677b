"""Gaussian white-noise model and the coefficient-decay diagnostic.

The diagnostic inspects the coefficients |u_i' b| of the data in the left
singular basis: for a problem whose noise-free coefficients decay, they fall
with i until they hit the noise floor eta = ||e||/sqrt(m) and stay there.
The index where that transition happens governs every truncation decision in
the laboratory.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .csvio import write_csv
from .gallery import IllPosedProblem

__all__ = [
    "NoisyInstance",
    "PicardDiagnostic",
    "add_noise",
    "noiseless_instance",
    "picard_diagnostic",
    "write_picard_csv",
]

#: Median window half-width used by the transition-index rule.
WINDOW_HALF = 2
#: The windowed rule requires the median to exceed this multiple of the floor.
FLOOR_FACTOR = 2.0


@dataclass(frozen=True)
class NoisyInstance:
    """A problem together with one realization of additive white noise.

    Invariants: ``b = b_true + e``, the realized noise level
    ``||e|| / ||b_true||`` equals ``epsilon`` to within 1e-14, and
    ``eta = ||e|| / sqrt(m)`` is the per-coefficient noise floor.
    """

    problem: IllPosedProblem
    epsilon: float
    seed: int | None
    e: np.ndarray
    b: np.ndarray
    eta: float
    generator: str = "numpy-pcg64"


def add_noise(problem: IllPosedProblem, epsilon: float, seed: int) -> NoisyInstance:
    """Perturb ``b_true`` with seeded Gaussian noise of exact relative size.

    The Gaussian draw is rescaled so that ``||e|| / ||b_true||`` equals
    ``epsilon`` exactly (up to roundoff), which pins the noise floor
    ``eta`` deterministically for a given seed.

    Raises ``ValueError`` unless ``0 < epsilon < 1``.
    """
    if not (0.0 < epsilon < 1.0):
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon}")
    rng = np.random.default_rng(seed)
    g = rng.standard_normal(problem.m)
    ng = float(np.linalg.norm(g))
    if ng == 0.0:
        raise ValueError("degenerate zero noise draw")
    e = g * (epsilon * float(np.linalg.norm(problem.b_true)) / ng)
    b = problem.b_true + e
    eta = float(np.linalg.norm(e)) / np.sqrt(problem.m)
    return NoisyInstance(
        problem=problem, epsilon=float(epsilon), seed=int(seed), e=e, b=b, eta=eta
    )


def noiseless_instance(problem: IllPosedProblem) -> NoisyInstance:
    """The exact-data instance: ``e = 0``, ``eta = 0``."""
    return NoisyInstance(
        problem=problem,
        epsilon=0.0,
        seed=None,
        e=np.zeros(problem.m),
        b=problem.b_true.copy(),
        eta=0.0,
        generator="none",
    )


@dataclass(frozen=True)
class PicardDiagnostic:
    """Coefficient-decay diagnostic of one noisy instance.

    Attributes
    ----------
    sigma : (n,) ndarray
        Computed singular values.
    coef : (n,) ndarray
        |u_i' b| for the noisy data.
    coef_true : (n,) ndarray
        |u_i' b_true| for the noise-free data.
    noise_floor : float
        The floor eta the indices were measured against.
    k0 : int
        Transition index by the windowed rule: the largest k whose
        5-index median of |u_i' b| (window clamped at the ends) exceeds
        twice the floor; 0 when no window qualifies.
    k0_naive : int
        First-crossing index: the largest k with |u_i' b| above the floor
        for every i <= k (n when the coefficients never cross).
    beta_fit : float
        Slope-derived decay exponent: fitting log|u_i' b_true| to
        (1 + beta) log sigma_i over i <= k0 gives beta; nan when k0 < 2.
    warnings : tuple of str
    """

    sigma: np.ndarray
    coef: np.ndarray
    coef_true: np.ndarray
    noise_floor: float
    k0: int
    k0_naive: int
    beta_fit: float
    warnings: tuple = ()


def picard_diagnostic(instance: NoisyInstance, noise_floor: float | None = None) -> PicardDiagnostic:
    """Locate the transition index of the coefficient sequence |u_i' b|.

    ``noise_floor`` defaults to the instance's realized ``eta``; pass an
    explicit positive floor to diagnose noiseless data against an analytic
    threshold.
    """
    floor = instance.eta if noise_floor is None else float(noise_floor)
    if floor <= 0.0:
        raise ValueError("noise floor must be positive; pass one explicitly for noiseless data")
    fact = instance.problem.svd
    coef = np.abs(fact.coefficients(instance.b))
    coef_true = np.abs(fact.coefficients(instance.problem.b_true))
    n = coef.size

    k0 = 0
    for k in range(1, n + 1):
        lo = max(1, k - WINDOW_HALF)
        hi = min(n, k + WINDOW_HALF)
        if np.median(coef[lo - 1 : hi]) > FLOOR_FACTOR * floor:
            k0 = k

    below = np.nonzero(coef <= floor)[0]
    k0_naive = int(below[0]) if below.size else n

    warnings = []
    if k0 == 0:
        warnings.append("all coefficient windows sit at or below the noise floor")

    beta_fit = float("nan")
    if k0 >= 2:
        s_head = fact.sigma[:k0]
        c_head = coef_true[:k0]
        good = (s_head > 0.0) & (c_head > 0.0)
        if int(good.sum()) >= 2:
            slope = np.polyfit(np.log(s_head[good]), np.log(c_head[good]), 1)[0]
            beta_fit = float(slope - 1.0)

    return PicardDiagnostic(
        sigma=fact.sigma.copy(),
        coef=coef,
        coef_true=coef_true,
        noise_floor=floor,
        k0=int(k0),
        k0_naive=int(k0_naive),
        beta_fit=beta_fit,
        warnings=tuple(warnings),
    )


def write_picard_csv(diag: PicardDiagnostic, path) -> None:
    """Export the diagnostic as CSV (kind ``picard``)."""
    header = ["i", "sigma_i", "abs_uiTb", "abs_uiTbtrue", "eta"]
    rows = [
        [i + 1, diag.sigma[i], diag.coef[i], diag.coef_true[i], diag.noise_floor]
        for i in range(diag.sigma.size)
    ]
    write_csv(path, "picard", header, rows)
