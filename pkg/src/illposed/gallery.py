"""Discrete ill-posed test problems with known solutions and spectra.

Each constructor returns an :class:`IllPosedProblem` holding the matrix, the
exact solution, the consistent noise-free right-hand side ``b_true = A @
x_true``, a decay model for the singular spectrum, and the (eagerly computed)
SVD that every downstream diagnostic consumes.

The integral-equation kernels are discretized with the classical recipes:
midpoint quadrature for the image-restoration and gravity-survey kernels, a
Galerkin scheme with orthonormal box functions for the second-derivative
kernel, and a lower-triangular Toeplitz quadrature for the causal heat
kernel.  The exact formulas live in the constructor docstrings so the unit
oracles can evaluate them independently.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np

from .linalg import SvdFactorization, as_matrix, as_vector, orthonormalize, svd

__all__ = [
    "SpectrumModel",
    "IllPosedProblem",
    "make_shaw",
    "make_gravity",
    "make_deriv2",
    "make_heat",
    "make_prescribed",
    "make_picard_synthetic",
    "fit_spectrum_model",
    "write_matrix",
    "read_matrix",
]

#: Relative gap under which two singular values are reported as degenerate.
DEGENERACY_GAP = 1e-12


# Spectrum models =============================================================
@dataclass(frozen=True)
class SpectrumModel:
    """Decay model for a singular spectrum.

    kind
        ``"severe"``    : sigma_j = zeta * rho**(-j),   rho > 1
        ``"moderate_or_mild"`` : sigma_j = zeta * j**(-alpha), alpha > 1/2
        ``"empirical"`` : no closed form (kernel-defined spectra)
    beta_picard
        Exponent used when synthesizing right-hand sides whose coefficients
        follow ``|u_i' b_true| = sigma_i**(1+beta)``; optional otherwise.
    """

    kind: str
    rho: float | None = None
    alpha: float | None = None
    zeta: float = 1.0
    beta_picard: float | None = None

    def __post_init__(self):
        if self.kind not in ("severe", "moderate_or_mild", "empirical"):
            raise ValueError(f"unknown spectrum kind {self.kind!r}")
        if self.zeta <= 0.0:
            raise ValueError("zeta must be positive")
        if self.kind == "severe":
            if self.rho is None or self.rho <= 1.0:
                raise ValueError("severe decay requires rho > 1")
        elif self.kind == "moderate_or_mild":
            if self.alpha is None or self.alpha <= 0.5:
                raise ValueError("moderate_or_mild decay requires alpha > 1/2")

    def sigma(self, n: int) -> np.ndarray:
        """Model singular values sigma_1..sigma_n."""
        if self.kind == "empirical":
            raise ValueError("empirical spectra have no closed form")
        j = np.arange(1, n + 1, dtype=float)
        if self.kind == "severe":
            s = self.zeta * self.rho ** (-j)
        else:
            s = self.zeta * j ** (-self.alpha)
        if not np.all(s > 0.0):
            raise ValueError("model spectrum underflows to zero at this size")
        return s


# Problem container ===========================================================
@dataclass(frozen=True)
class IllPosedProblem:
    """A matrix with its exact solution, consistent data, and spectrum."""

    name: str
    A: np.ndarray
    x_true: np.ndarray
    b_true: np.ndarray
    spectrum: SpectrumModel
    svd: SvdFactorization
    warnings: tuple = field(default=())

    @property
    def m(self) -> int:
        return self.A.shape[0]

    @property
    def n(self) -> int:
        return self.A.shape[1]

    def export(self, directory) -> None:
        """Write A, x_true, b_true as plain-text matrices into a directory."""
        os.makedirs(directory, exist_ok=True)
        write_matrix(os.path.join(directory, "A.txt"), self.A)
        write_matrix(os.path.join(directory, "x_true.txt"), self.x_true[:, None])
        write_matrix(os.path.join(directory, "b_true.txt"), self.b_true[:, None])


def _finalize(name, A, x_true, spectrum, b_true=None) -> IllPosedProblem:
    """Validate invariants shared by all constructors and attach the SVD."""
    A = as_matrix(A)
    x_true = as_vector(x_true, "x_true")
    if b_true is None:
        b_true = A @ x_true
    else:
        b_true = as_vector(b_true, "b_true")
    nb = float(np.linalg.norm(b_true))
    if nb == 0.0:
        raise ValueError(f"{name}: b_true is identically zero")
    resid = float(np.linalg.norm(A @ x_true - b_true))
    if resid > 1e-12 * nb:
        raise ValueError(f"{name}: A @ x_true differs from b_true ({resid:.3e})")
    fact = svd(A)
    warnings = []
    s = fact.sigma
    if s.size > 1:
        gaps = (s[:-1] - s[1:]) / s[0]
        tied = np.nonzero(gaps < DEGENERACY_GAP)[0]
        if tied.size:
            warnings.append(
                f"degenerate spectrum: relative gap below {DEGENERACY_GAP:g} "
                f"first occurs between sigma_{tied[0] + 1} and sigma_{tied[0] + 2}"
            )
    return IllPosedProblem(
        name=name,
        A=A,
        x_true=x_true,
        b_true=b_true,
        spectrum=spectrum,
        svd=fact,
        warnings=tuple(warnings),
    )


# Kernel-defined problems =====================================================
def make_shaw(n: int) -> IllPosedProblem:
    """One-dimensional image restoration (severely ill-posed, symmetric).

    Midpoint quadrature on [-pi/2, pi/2] with n nodes s_i = -pi/2 + (i-1/2)h,
    h = pi/n, of the kernel

        K(s, t) = (cos s + cos t)^2 * (sin(u)/u)^2,  u = pi (sin s + sin t),

    with the limit sin(u)/u -> 1 as u -> 0, so A_ij = h K(s_i, s_j).  The
    exact solution is the two-hump profile

        x(t) = 2 exp(-6 (t - 0.8)^2) + exp(-2 (t + 0.5)^2).

    Requires even n.
    """
    if n < 2 or n % 2:
        raise ValueError("make_shaw requires an even order n >= 2")
    h = np.pi / n
    s = -np.pi / 2 + (np.arange(n) + 0.5) * h
    cos_sum = np.cos(s)[:, None] + np.cos(s)[None, :]
    u = np.pi * (np.sin(s)[:, None] + np.sin(s)[None, :])
    # np.sinc(x) = sin(pi x)/(pi x), so sinc(u/pi) = sin(u)/u with the 0 limit.
    A = h * cos_sum**2 * np.sinc(u / np.pi) ** 2
    x_true = 2.0 * np.exp(-6.0 * (s - 0.8) ** 2) + np.exp(-2.0 * (s + 0.5) ** 2)
    return _finalize("shaw", A, x_true, SpectrumModel(kind="empirical"))


def make_gravity(n: int, depth: float = 0.25) -> IllPosedProblem:
    """Gravity surveying on [0, 1] (severely ill-posed, symmetric, positive).

    Midpoint quadrature with nodes t_i = (i-1/2)/n and weight h = 1/n of

        K(s, t) = d * (d^2 + (s - t)^2)^(-3/2),

    where ``d = depth`` is the observation depth.  The exact solution is
    x(t) = sin(pi t) + 0.5 sin(2 pi t).
    """
    if n < 2:
        raise ValueError("make_gravity requires n >= 2")
    if depth <= 0.0:
        raise ValueError("depth must be positive")
    h = 1.0 / n
    t = (np.arange(n) + 0.5) * h
    diff = t[:, None] - t[None, :]
    A = h * depth / (depth**2 + diff**2) ** 1.5
    x_true = np.sin(np.pi * t) + 0.5 * np.sin(2.0 * np.pi * t)
    return _finalize("gravity", A, x_true, SpectrumModel(kind="empirical"))


def make_deriv2(n: int) -> IllPosedProblem:
    """Second-derivative problem (moderately ill-posed, symmetric).

    Galerkin discretization with orthonormal box functions of the Green's
    function for the second derivative on [0, 1],

        K(s, t) = s (t - 1)  for s <  t,
                  t (s - 1)  for s >= t,

    which yields, with h = 1/n,

        A_ii = h^2 ((i^2 - i + 1/4) h - (i - 2/3)),
        A_ij = h^2 (j - 1/2) ((i - 1/2) h - 1)   for j < i,

    and symmetrically above the diagonal.  The exact solution holds the
    Galerkin coefficients of x(t) = t, namely x_i = h^(3/2) (i - 1/2).
    """
    if n < 2:
        raise ValueError("make_deriv2 requires n >= 2")
    h = 1.0 / n
    i = np.arange(1, n + 1, dtype=float)
    A = h**2 * (i[None, :] - 0.5) * ((i[:, None] - 0.5) * h - 1.0)
    A = np.tril(A, -1)
    A = A + A.T
    np.fill_diagonal(A, h**2 * ((i**2 - i + 0.25) * h - (i - 2.0 / 3.0)))
    x_true = h**1.5 * (i - 0.5)
    return _finalize("deriv2", A, x_true, SpectrumModel(kind="empirical"))


def make_heat(n: int, kappa: float = 1.0) -> IllPosedProblem:
    """Inverse heat equation (causal Volterra kernel, lower triangular).

    Midpoint quadrature of the first-kind Volterra equation with convolution
    kernel

        k(t) = t^(-3/2) / (2 kappa sqrt(pi)) * exp(-1 / (4 kappa^2 t)),

    on [0, 1] with nodes t_l = (l-1/2)h, h = 1/n, giving the lower-triangular
    Toeplitz matrix A_ij = h k(t_{i-j+1}) for j <= i and 0 above the
    diagonal.  The exact solution is the standard piecewise initial profile:
    with s_i = 20 i / n for i <= n/2,

        x_i = 0.75 s_i^2 / 4          for s_i < 2,
        x_i = 0.75 + (s_i-2)(3-s_i)   for 2 <= s_i < 3,
        x_i = 0.75 exp(-2 (s_i - 3))  for s_i >= 3,

    and x_i = 0 for i > n/2.
    """
    if n < 2:
        raise ValueError("make_heat requires n >= 2")
    if kappa <= 0.0:
        raise ValueError("kappa must be positive")
    h = 1.0 / n
    t = (np.arange(1, n + 1) - 0.5) * h
    c = h / (2.0 * kappa * np.sqrt(np.pi))
    kvals = c * t**-1.5 * np.exp(-1.0 / (4.0 * kappa**2 * t))
    idx = np.arange(n)
    lag = idx[:, None] - idx[None, :]
    A = np.where(lag >= 0, kvals[np.clip(lag, 0, n - 1)], 0.0)
    si = 20.0 * np.arange(1, n // 2 + 1) / n
    head = np.where(
        si < 2.0,
        0.75 * si**2 / 4.0,
        np.where(si < 3.0, 0.75 + (si - 2.0) * (3.0 - si), 0.75 * np.exp(-2.0 * (si - 3.0))),
    )
    x_true = np.zeros(n)
    x_true[: n // 2] = head
    return _finalize("heat", A, x_true, SpectrumModel(kind="empirical"))


# Synthetic problems with prescribed spectra ==================================
def _random_orthogonal(rng, rows: int, cols: int) -> np.ndarray:
    """Orthonormal factor of a seeded Gaussian matrix (sign-fixed QR)."""
    return orthonormalize(rng.standard_normal((rows, cols)))


def make_prescribed(n: int, spectrum: SpectrumModel, seed: int, m: int | None = None) -> IllPosedProblem:
    """Matrix with an exactly prescribed singular spectrum.

    ``A = U diag(sigma) V.T`` with U (m x n) and V (n x n) drawn as
    orthonormal factors of seeded Gaussian matrices, sigma from the decay
    model, and ``x_true = ones(n)``.  The same seed reproduces the same
    matrix bit for bit (generator: numpy PCG64).
    """
    m = n if m is None else m
    if m < n:
        raise ValueError("make_prescribed requires m >= n")
    sig = spectrum.sigma(n)
    rng = np.random.default_rng(seed)
    U = _random_orthogonal(rng, m, n)
    V = _random_orthogonal(rng, n, n)
    A = (U * sig) @ V.T
    x_true = np.ones(n)
    return _finalize(f"prescribed-{spectrum.kind}", A, x_true, spectrum)


def make_picard_synthetic(n: int, spectrum: SpectrumModel, seed: int, m: int | None = None) -> IllPosedProblem:
    """Prescribed spectrum plus a right-hand side with power-law coefficients.

    On top of the :func:`make_prescribed` construction, the data is built in
    the singular basis so that the noise-free coefficients obey

        u_i' b_true = sigma_i**(1 + beta),   x_true = V @ sigma**beta,

    with ``beta = spectrum.beta_picard`` (must be set, >= 0).  By
    construction ``A @ x_true = b_true`` to machine precision.
    """
    beta = spectrum.beta_picard
    if beta is None or beta < 0.0:
        raise ValueError("make_picard_synthetic requires spectrum.beta_picard >= 0")
    m = n if m is None else m
    if m < n:
        raise ValueError("make_picard_synthetic requires m >= n")
    sig = spectrum.sigma(n)
    rng = np.random.default_rng(seed)
    U = _random_orthogonal(rng, m, n)
    V = _random_orthogonal(rng, n, n)
    A = (U * sig) @ V.T
    x_true = V @ sig**beta
    b_true = U @ sig ** (1.0 + beta)
    return _finalize(f"picard-{spectrum.kind}", A, x_true, spectrum, b_true=b_true)


# Spectrum fitting ============================================================
def fit_spectrum_model(sigma, floor_rel: float = 1e-13) -> SpectrumModel:
    """Fit a decay model to a computed spectrum.

    Regresses log(sigma_k) against k (geometric decay) and against log k
    (power-law decay) over the window above ``floor_rel * sigma_1`` and
    returns whichever admissible model fits with smaller squared residual.

    Raises ``ValueError`` when fewer than 3 values sit above the floor or
    neither fitted model is admissible (rho > 1, alpha > 1/2).
    """
    s = as_vector(sigma, "sigma")
    if s.size == 0 or s[0] <= 0.0:
        raise ValueError("spectrum must start positive")
    keep = s > floor_rel * s[0]
    j = np.arange(1, s.size + 1, dtype=float)[keep]
    y = np.log(s[keep])
    if j.size < 3:
        raise ValueError("fewer than 3 spectrum values above the fit floor")
    candidates = []
    slope, icept = np.polyfit(j, y, 1)
    sse = float(np.sum((y - (slope * j + icept)) ** 2))
    rho = float(np.exp(-slope))
    if rho > 1.0:
        candidates.append((sse, SpectrumModel(kind="severe", rho=rho, zeta=float(np.exp(icept)))))
    slope, icept = np.polyfit(np.log(j), y, 1)
    sse = float(np.sum((y - (slope * np.log(j) + icept)) ** 2))
    alpha = -float(slope)
    if alpha > 0.5:
        candidates.append(
            (sse, SpectrumModel(kind="moderate_or_mild", alpha=alpha, zeta=float(np.exp(icept))))
        )
    if not candidates:
        raise ValueError("no admissible decay model fits this spectrum")
    return min(candidates, key=lambda c: c[0])[1]


# Plain-text matrix format ====================================================
def write_matrix(path, M) -> None:
    """Write a matrix as ``rows cols`` header plus row-major ASCII floats."""
    M = as_matrix(M, "M")
    r, c = M.shape
    lines = [f"{r} {c}"]
    for row in M:
        lines.append(" ".join(repr(float(v)) for v in row))
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def read_matrix(path) -> np.ndarray:
    """Read a matrix written by :func:`write_matrix`."""
    with open(path, "r", encoding="ascii") as fh:
        tokens = fh.read().split()
    if len(tokens) < 2:
        raise ValueError(f"{path}: truncated matrix file")
    r, c = int(tokens[0]), int(tokens[1])
    vals = tokens[2:]
    if len(vals) != r * c:
        raise ValueError(f"{path}: expected {r * c} entries, found {len(vals)}")
    return np.array([float(v) for v in vals]).reshape(r, c)
