"""Regularization laboratory for linear discrete ill-posed problems.

The package builds classical ill-posed test problems, perturbs them with
seeded white noise, regularizes them by spectral truncation and by projected
(Krylov) iteration, and quantifies -- per step k -- how well the Krylov space
tracks the dominant right singular subspace: the low-rank gap gamma_k, the
Ritz-value ordering, the subspace-distance norms, and the a-priori bounds
tying all of them to the decay regime of the spectrum.

Typical flow::

    from illposed import make_shaw, add_noise, tsvd_sweep, lsqr_sweep

    problem = make_shaw(256)
    instance = add_noise(problem, 1e-3, seed=42)
    reference = tsvd_sweep(instance)
    trace = lsqr_sweep(instance)
    assert trace.kstar <= reference.best_k

The same pipeline, with CSV/SVG artifacts and an invariant audit, runs from
the command line as ``illposed run`` / ``illposed compare``.
"""

from .analysis import (
    AnalysisRecord,
    BoundReport,
    IllConditionedError,
    bound_report,
    cauchy_interlace_check,
    decay_diagnostic,
    delta_direct,
    delta_matrix_via_projection,
    delta_norm_via_angles,
    gamma_exact,
    gamma_via_Gk,
    lagrange_factor,
    mirsky_gap_check,
    natural_order_check,
    near_best_predicate,
    ritz_values,
    sigma_delta_norm,
    xi_factor,
)
from .bidiag import (
    BidiagState,
    BreakdownError,
    bidiag_complete,
    bidiag_run,
    bidiag_start,
    bidiag_step,
    lower_bidiagonal,
    recurrence_residuals,
)
from .experiment import (
    ConfigError,
    ExperimentConfig,
    InvariantViolation,
    build_problem,
    compare,
    load_config,
    render_panels,
    run,
)
from .gallery import (
    IllPosedProblem,
    SpectrumModel,
    fit_spectrum_model,
    make_deriv2,
    make_gravity,
    make_heat,
    make_picard_synthetic,
    make_prescribed,
    make_shaw,
    read_matrix,
    write_matrix,
)
from .linalg import (
    RankDeficientError,
    SvdFactorization,
    least_squares,
    orthonormalize,
    spectral_norm,
    svd,
)
from .lsqr import LsqrTrace, default_kmax, lsqr_iterate, lsqr_sweep
from .noise import (
    NoisyInstance,
    PicardDiagnostic,
    add_noise,
    noiseless_instance,
    picard_diagnostic,
)
from .tsvd import TsvdSweep, tsvd_solution, tsvd_sweep

__version__ = "0.1.0"

__all__ = [
    "AnalysisRecord",
    "BidiagState",
    "BoundReport",
    "BreakdownError",
    "ConfigError",
    "ExperimentConfig",
    "IllConditionedError",
    "IllPosedProblem",
    "InvariantViolation",
    "LsqrTrace",
    "NoisyInstance",
    "PicardDiagnostic",
    "RankDeficientError",
    "SpectrumModel",
    "SvdFactorization",
    "TsvdSweep",
    "add_noise",
    "bidiag_complete",
    "bidiag_run",
    "bidiag_start",
    "bidiag_step",
    "bound_report",
    "build_problem",
    "cauchy_interlace_check",
    "compare",
    "decay_diagnostic",
    "default_kmax",
    "delta_direct",
    "delta_matrix_via_projection",
    "delta_norm_via_angles",
    "fit_spectrum_model",
    "gamma_exact",
    "gamma_via_Gk",
    "lagrange_factor",
    "least_squares",
    "load_config",
    "lower_bidiagonal",
    "lsqr_iterate",
    "lsqr_sweep",
    "make_deriv2",
    "make_gravity",
    "make_heat",
    "make_picard_synthetic",
    "make_prescribed",
    "make_shaw",
    "mirsky_gap_check",
    "natural_order_check",
    "near_best_predicate",
    "noiseless_instance",
    "orthonormalize",
    "picard_diagnostic",
    "read_matrix",
    "recurrence_residuals",
    "render_panels",
    "ritz_values",
    "run",
    "sigma_delta_norm",
    "spectral_norm",
    "svd",
    "tsvd_solution",
    "tsvd_sweep",
    "write_matrix",
    "xi_factor",
    "__version__",
]
