"""Configuration-driven experiment runner and artifact comparison.

One run turns a configuration into a directory of artifacts:

    config.txt      echo of the effective configuration (key=value lines)
    picard.csv      coefficient-decay diagnostic
    bidiag.csv      recurrence coefficients alpha_k, beta_{k+1}
    tsvd.csv        truncation sweep (relative errors, residuals)
    lsqr.csv        projected-iteration sweep with the kstar flag
    analysis.csv    per-step gap/subspace/bound report
    ritz.csv        Ritz values in long format
    summary.txt     headline indices and errors (key=value lines)
    panel_[abcd].svg  figure panels, rendered purely from the CSVs

The numbers behind every panel exist in CSV before any SVG is drawn, and a
rerun of the same configuration reproduces every file byte for byte.  After
writing the artifacts the runner audits the universal inequalities (gap
monotonicity, interlacing, ...) and raises :class:`InvariantViolation` if
any fails beyond slack; the comparison tool diffs two artifact directories
column by column with optional per-column tolerances.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, fields

from .analysis import (
    AnalysisRecord,
    bound_report,
    cauchy_interlace_check,
    delta_norm_via_angles,
    gamma_exact,
    gamma_via_Gk,
    lagrange_factor,
    mirsky_gap_check,
    natural_order_check,
    near_best_predicate,
    ritz_values,
    sigma_delta_norm,
    write_analysis_csv,
    write_ritz_csv,
)
from .bidiag import bidiag_run, recurrence_residuals, write_bidiag_csv
from .csvio import format_value, read_csv
from .gallery import (
    SpectrumModel,
    fit_spectrum_model,
    make_deriv2,
    make_gravity,
    make_heat,
    make_picard_synthetic,
    make_prescribed,
    make_shaw,
)
from .lsqr import lsqr_sweep, write_lsqr_csv
from .noise import add_noise, picard_diagnostic, write_picard_csv
from .svgplot import Chart
from .tsvd import tsvd_sweep, write_tsvd_csv

__all__ = [
    "ConfigError",
    "InvariantViolation",
    "ExperimentConfig",
    "RunResult",
    "CompareReport",
    "ColumnDiff",
    "parse_config_file",
    "load_config",
    "build_problem",
    "run",
    "render_panels",
    "compare",
    "ARTIFACT_CSVS",
    "NOISE_INDEPENDENT_COLUMNS",
]


class ConfigError(ValueError):
    """Invalid configuration; the CLI maps this to exit code 2."""


class InvariantViolation(RuntimeError):
    """A universal inequality failed beyond slack; CLI exit code 1."""


PROBLEMS = ("shaw", "gravity", "deriv2", "heat", "prescribed", "picard_synthetic")
DECAYS = ("severe", "moderate", "mild")
MAX_N = 4096

#: CSV artifacts of one run, in pipeline order.
ARTIFACT_CSVS = (
    "picard.csv",
    "bidiag.csv",
    "tsvd.csv",
    "lsqr.csv",
    "analysis.csv",
    "ritz.csv",
)

#: Columns that must agree between two runs differing only in the noise seed.
NOISE_INDEPENDENT_COLUMNS = frozenset(
    {"i", "k", "index", "sigma_i", "abs_uiTbtrue", "sigma_k1", "lagrange_max", "regime"}
)

#: Summary keys that may differ between two runs with different noise seeds.
_NOISE_DEPENDENT_SUMMARY_KEYS = frozenset(
    {
        "seed",
        "epsilon",
        "eta",
        "kstar",
        "semi_convergent",
        "k0_windowed",
        "k0_naive",
        "k0_realized",
        "best_lsqr_error",
        "best_tsvd_error",
        "first_natural_order_failure",
        "first_near_best_failure",
        "breakdown",
        "breakdown_step",
        "analysis_rows",
        "invariant_violations",
        "invariant_detail",
    }
)


# Configuration ===============================================================
@dataclass(frozen=True)
class ExperimentConfig:
    """Effective settings of one run (flat key=value file + flag overrides)."""

    problem: str = "shaw"
    n: int = 256
    noise: float = 1e-3
    seed: int = 0
    kmax: int | None = None
    out: str = "results"
    panels: str = "abcd"
    scale: float = 1.0
    depth: float = 0.25
    kappa: float = 1.0
    rho: float = 2.0
    alpha: float = 2.0
    zeta: float = 1.0
    beta: float = 0.0
    decay: str = "severe"
    reorth: bool = True

    @property
    def effective_n(self) -> int:
        """Problem size after the scale multiplier."""
        return int(round(self.n * self.scale))

    def effective_kmax(self, n: int) -> int:
        return min(n, 40) if self.kmax is None else min(self.kmax, n)

    def panel_set(self) -> str:
        return "" if self.panels in ("", "none") else self.panels

    def validate(self) -> None:
        if self.problem not in PROBLEMS:
            raise ConfigError(
                f"unknown problem {self.problem!r}; choose from {', '.join(PROBLEMS)}"
            )
        if self.scale <= 0.0:
            raise ConfigError("scale must be positive")
        n = self.effective_n
        if not 2 <= n <= MAX_N:
            raise ConfigError(f"effective n = {n} outside 2..{MAX_N}")
        if not 0.0 < self.noise < 1.0:
            raise ConfigError(f"noise must lie in (0, 1), got {self.noise}")
        if self.seed < 0:
            raise ConfigError("seed must be nonnegative")
        if self.kmax is not None and not 1 <= self.kmax <= n:
            raise ConfigError(f"kmax = {self.kmax} outside 1..{n}")
        bad = set(self.panel_set()) - set("abcd")
        if bad:
            raise ConfigError(f"panels must be a subset of abcd, got {self.panels!r}")
        if self.decay not in DECAYS:
            raise ConfigError(f"decay must be one of {', '.join(DECAYS)}")
        for key, lo in (("depth", 0.0), ("kappa", 0.0), ("zeta", 0.0)):
            if getattr(self, key) <= lo:
                raise ConfigError(f"{key} must be positive")
        if self.rho <= 1.0:
            raise ConfigError("rho must exceed 1")
        if self.alpha <= 0.5:
            raise ConfigError("alpha must exceed 1/2")
        if self.beta < 0.0:
            raise ConfigError("beta must be nonnegative")

    def echo_lines(self) -> list:
        """The configuration as re-parseable key=value lines."""
        out = []
        for f in fields(self):
            v = getattr(self, f.name)
            if v is None:
                text = "none"
            elif isinstance(v, bool):
                text = "true" if v else "false"
            elif isinstance(v, float):
                text = repr(v)
            else:
                text = str(v)
            out.append(f"{f.name}={text}")
        return out


_BOOL_WORDS = {
    "true": True, "1": True, "yes": True, "on": True,
    "false": False, "0": False, "no": False, "off": False,
}
_FIELD_NAMES = tuple(f.name for f in fields(ExperimentConfig))
_INT_KEYS = ("n", "seed")
_FLOAT_KEYS = ("noise", "scale", "depth", "kappa", "rho", "alpha", "zeta", "beta")


def _coerce(key: str, value):
    """Turn one raw config value (usually a string) into its field type."""
    if key not in _FIELD_NAMES:
        raise ConfigError(f"unknown config key {key!r}")
    if not isinstance(value, str):
        return value
    v = value.strip()
    try:
        if key in _INT_KEYS:
            return int(v)
        if key in _FLOAT_KEYS:
            return float(v)
        if key == "kmax":
            return None if v.lower() in ("none", "") else int(v)
        if key == "reorth":
            word = v.lower()
            if word not in _BOOL_WORDS:
                raise ValueError(f"not a boolean: {v!r}")
            return _BOOL_WORDS[word]
    except ValueError as err:
        raise ConfigError(f"bad value for {key}: {err}") from err
    return v


def parse_config_file(path) -> dict:
    """Read a flat key=value file (# comments and blank lines ignored)."""
    raw = {}
    try:
        with open(path, "r", encoding="ascii") as fh:
            lines = fh.readlines()
    except OSError as err:
        raise ConfigError(f"cannot read config file: {err}") from err
    for lineno, ln in enumerate(lines, start=1):
        text = ln.strip()
        if not text or text.startswith("#"):
            continue
        if "=" not in text:
            raise ConfigError(f"{path}:{lineno}: expected key=value, got {text!r}")
        key, _, value = text.partition("=")
        raw[key.strip()] = value.strip()
    return raw


def load_config(path=None, overrides=None) -> ExperimentConfig:
    """Build a validated config from an optional file plus overrides."""
    merged = {}
    if path is not None:
        merged.update(parse_config_file(path))
    for key, value in (overrides or {}).items():
        if value is not None:
            merged[key] = value
    config = ExperimentConfig(**{k: _coerce(k, v) for k, v in merged.items()})
    config.validate()
    return config


# Problem construction ========================================================
def build_problem(config: ExperimentConfig):
    """Instantiate the configured problem (constructor errors are config errors)."""
    n = config.effective_n
    try:
        if config.problem == "shaw":
            return make_shaw(n)
        if config.problem == "gravity":
            return make_gravity(n, depth=config.depth)
        if config.problem == "deriv2":
            return make_deriv2(n)
        if config.problem == "heat":
            return make_heat(n, kappa=config.kappa)
        if config.decay == "severe":
            spectrum = SpectrumModel(
                kind="severe", rho=config.rho, zeta=config.zeta, beta_picard=config.beta
            )
        else:
            spectrum = SpectrumModel(
                kind="moderate_or_mild",
                alpha=config.alpha,
                zeta=config.zeta,
                beta_picard=config.beta,
            )
        maker = make_prescribed if config.problem == "prescribed" else make_picard_synthetic
        return maker(n, spectrum, seed=config.seed)
    except ValueError as err:
        raise ConfigError(str(err)) from err


# The run pipeline ============================================================
@dataclass(frozen=True)
class RunResult:
    """Everything one run computed, plus the artifact directory."""

    config: ExperimentConfig
    problem: object
    instance: object
    picard: object
    state: object
    tsvd: object
    lsqr: object
    records: tuple
    reports: tuple
    summary: dict
    violations: tuple
    outdir: str


def _spectrum_for_bounds(problem):
    """The decay model the bound evaluators use: given, else fitted."""
    if problem.spectrum.kind != "empirical":
        return problem.spectrum, "given"
    try:
        return fit_spectrum_model(problem.svd.sigma), "fitted"
    except ValueError:
        return None, "none"


def _analysis_records(problem, instance, picard, state, kmax):
    """Per-step diagnostics and bound reports for k = 1..kmax."""
    fact = problem.svd
    sigma = fact.sigma
    slack = 1e-12 * sigma[0]
    model, source = _spectrum_for_bounds(problem)
    navail = min(len(state.alphas) - 1, len(state.betas) - 2)
    K = min(kmax, state.max_k, problem.n - 1)
    records, reports = [], []
    for k in range(1, K + 1):
        Q = state.Q_k(k)
        gamma = gamma_exact(problem.A, Q)
        gamma_gk = gamma_via_Gk(state, k) if state.terminal else math.nan
        theta = ritz_values(state, k)
        sin_theta, delta = delta_norm_via_angles(fact.V, Q)
        sd = sigma_delta_norm(fact, instance.b, k, Q=Q)
        try:
            lag = lagrange_factor(sigma, k)[1]
        except ValueError:
            lag = math.nan
        ab = state.alphas[k] + state.betas[k + 1] if k <= navail else math.nan
        records.append(
            AnalysisRecord(
                k=k,
                gamma=gamma,
                gamma_Gk=gamma_gk,
                sigma_k1=float(sigma[k]),
                ritz=theta,
                delta_norm=delta,
                sin_theta=sin_theta,
                sigma_delta=sd,
                lagrange_max=lag,
                near_best=near_best_predicate(gamma, sigma[k - 1], sigma[k], tol=slack),
                natural_order=natural_order_check(theta, sigma),
                alpha_beta_sum=ab,
            )
        )
        report = None
        if model is not None:
            try:
                report = bound_report(fact, picard, model, delta, k)
            except ValueError:
                report = None
        reports.append(report)
    return records, reports, model, source


def _check_invariants(records, sigma, state, lsqr, tsvd, reorth):
    """Audit the universal inequalities; returns human-readable violations."""
    sigma1 = float(sigma[0])
    slack = 1e-12 * sigma1
    viol = []
    for prev, rec in zip(records, records[1:]):
        if not rec.gamma < prev.gamma + slack:
            viol.append(
                f"gap not strictly decreasing at k={rec.k}: "
                f"{rec.gamma!r} vs {prev.gamma!r}"
            )
    navail = min(len(state.alphas) - 1, len(state.betas) - 2)
    for rec in records:
        k = rec.k
        if not rec.gamma >= rec.sigma_k1 - slack:
            viol.append(f"gap below sigma_{k + 1} at k={k}")
        if k <= navail:
            a, b = state.alphas[k], state.betas[k + 1]
            if not a < rec.gamma + slack:
                viol.append(f"alpha_{k + 1} = {a!r} not below gap {rec.gamma!r}")
            if not b < rec.gamma + slack:
                viol.append(f"beta_{k + 2} = {b!r} not below gap {rec.gamma!r}")
            if not 2.0 * a * b <= rec.gamma**2 + 1e-12 * sigma1**2:
                viol.append(f"2 alpha beta above gap^2 at k={k}")
        if not cauchy_interlace_check(rec.ritz, sigma):
            viol.append(f"interlacing fails at k={k}")
        if not mirsky_gap_check(rec.ritz, sigma, rec.gamma):
            viol.append(f"Ritz gap bound fails at k={k}")
    # One index of slack: near-flat error curves around the minimum can move
    # either argmin by one, so only a gap of two or more is a real violation.
    if lsqr.kstar > tsvd.best_k + 1:
        viol.append(
            f"semi-convergence index {lsqr.kstar} exceeds realized "
            f"transition index {tsvd.best_k} by more than one"
        )
    if reorth and records:
        resid = recurrence_residuals(state, records[-1].k)
        for key in ("ortho_P", "ortho_Q"):
            if resid[key] > 1e-10:
                viol.append(f"basis orthogonality lost: {key} = {resid[key]:.3e}")
        if resid["forward"] > 1e-10 * sigma1:
            viol.append(f"recurrence residual too large: {resid['forward']:.3e}")
    return viol


def _first_failure(records, attr) -> int | None:
    for rec in records:
        if not getattr(rec, attr):
            return rec.k
    return None


def _summary_dict(config, problem, instance, picard, state, tsvd, lsqr,
                  records, model, source, violations) -> dict:
    breakdown = state.breakdown
    nat_fail = _first_failure(records, "natural_order")
    near_fail = _first_failure(records, "near_best")
    if model is None:
        model_text = "none"
    elif model.kind == "severe":
        model_text = f"severe rho={model.rho!r}"
    else:
        model_text = f"moderate_or_mild alpha={model.alpha!r}"
    return {
        "problem": problem.name,
        "m": problem.m,
        "n": problem.n,
        "epsilon": instance.epsilon,
        "seed": instance.seed,
        "generator": instance.generator,
        "eta": instance.eta,
        "reorth": config.reorth,
        "kmax": config.effective_kmax(problem.n),
        "analysis_rows": len(records),
        "breakdown": breakdown if breakdown is not None else "none",
        "breakdown_step": state.steps if breakdown is not None else "none",
        "kstar": lsqr.kstar,
        "semi_convergent": lsqr.semi_convergent,
        "k0_windowed": picard.k0,
        "k0_naive": picard.k0_naive,
        "k0_realized": tsvd.best_k,
        "best_lsqr_error": float(lsqr.rel_errors[lsqr.kstar - 1]),
        "best_tsvd_error": tsvd.best_error,
        "first_natural_order_failure": nat_fail if nat_fail is not None else "none",
        "first_near_best_failure": near_fail if near_fail is not None else "none",
        "bound_model": model_text,
        "bound_model_source": source,
        "invariant_violations": len(violations),
        "invariant_detail": "; ".join(violations) if violations else "none",
    }


def _write_kv(path, pairs) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        for key, value in pairs:
            fh.write(f"{key}={format_value(value)}\n")


def run(config: ExperimentConfig) -> RunResult:
    """Execute one configured experiment and write its artifact directory.

    Raises :class:`ConfigError` before any computation on an invalid
    configuration, and :class:`InvariantViolation` -- after all artifacts
    are written -- when a universal inequality fails beyond slack.
    Breakdown of the recurrence is not an error: the sweeps and analysis
    are truncated at the breakdown step, which the summary records.
    """
    config.validate()
    problem = build_problem(config)
    instance = add_noise(problem, config.noise, config.seed)
    picard = picard_diagnostic(instance)
    sigma1 = float(problem.svd.sigma[0])
    kmax = config.effective_kmax(problem.n)

    state, _ = bidiag_run(
        problem.A, instance.b, steps=None, reorth=config.reorth, norm_A=sigma1
    )
    tsvd = tsvd_sweep(instance)
    lsqr = lsqr_sweep(instance, kmax=kmax, state=state)
    records, reports, model, source = _analysis_records(
        problem, instance, picard, state, kmax
    )
    violations = _check_invariants(
        records, problem.svd.sigma, state, lsqr, tsvd, config.reorth
    )

    outdir = config.out
    os.makedirs(outdir, exist_ok=True)

    def path(name):
        return os.path.join(outdir, name)

    with open(path("config.txt"), "w", encoding="ascii", newline="\n") as fh:
        fh.write("\n".join(config.echo_lines()) + "\n")
    write_picard_csv(picard, path("picard.csv"))
    write_bidiag_csv(state, path("bidiag.csv"))
    write_tsvd_csv(tsvd, path("tsvd.csv"))
    write_lsqr_csv(lsqr, path("lsqr.csv"))
    write_analysis_csv(records, reports, path("analysis.csv"))
    write_ritz_csv(records, path("ritz.csv"))
    summary = _summary_dict(
        config, problem, instance, picard, state, tsvd, lsqr,
        records, model, source, violations,
    )
    _write_kv(path("summary.txt"), summary.items())
    render_panels(outdir, config.panel_set())

    result = RunResult(
        config=config,
        problem=problem,
        instance=instance,
        picard=picard,
        state=state,
        tsvd=tsvd,
        lsqr=lsqr,
        records=tuple(records),
        reports=tuple(reports),
        summary=summary,
        violations=tuple(violations),
        outdir=outdir,
    )
    if violations:
        raise InvariantViolation(
            f"{len(violations)} invariant violation(s); see {path('summary.txt')}: "
            + "; ".join(violations)
        )
    return result


# Figure panels (pure functions of the CSV artifacts) ========================
def _columns(path, *names):
    """Named float columns of a CSV artifact."""
    _, header, rows = read_csv(path)
    out = []
    for name in names:
        j = header.index(name)
        out.append([float(r[j]) for r in rows])
    return out


def render_panels(outdir, panels: str = "abcd") -> list:
    """Render the requested figure panels by reading the CSVs in ``outdir``.

    The CSVs are the only input -- rendering twice from the same files
    produces identical SVGs.  Returns the list of files written.
    """

    def path(name):
        return os.path.join(outdir, name)

    written = []

    def emit(letter, chart):
        name = f"panel_{letter}.svg"
        with open(path(name), "w", encoding="ascii", newline="\n") as fh:
            fh.write(chart.render())
        written.append(name)

    if "a" in panels or "c" in panels:
        ks, gamma, sigma_k1, ab = _columns(
            path("analysis.csv"), "k", "gamma", "sigma_k1", "alpha_beta_sum"
        )
    if "a" in panels:
        chart = Chart(
            "Rank-k gap vs trailing singular value",
            "k", "value (log)", ylog=True,
        )
        chart.add_series("gamma_k", ks, gamma, marker=True)
        chart.add_series("sigma_{k+1}", ks, sigma_k1, dashed=True)
        emit("a", chart)
    if "b" in panels:
        _, _, ritz_rows = read_csv(path("ritz.csv"))
        rk = [float(r[0]) for r in ritz_rows]
        theta = [float(r[2]) for r in ritz_rows]
        ii, sig = _columns(path("picard.csv"), "i", "sigma_i")
        top = int(max(rk)) + 1 if rk else len(ii)
        chart = Chart("Ritz values against the spectrum", "index", "value (log)", ylog=True)
        chart.add_series("theta_i(k) at x=k", rk, theta, scatter=True)
        chart.add_series("sigma_i at x=i", ii[:top], sig[:top], dashed=True)
        emit("b", chart)
    if "c" in panels:
        chart = Chart(
            "Gap decay vs recurrence coefficients",
            "k", "value (log)", ylog=True,
        )
        chart.add_series("alpha_{k+1}+beta_{k+2}", ks, ab, marker=True)
        chart.add_series("gamma_k", ks, gamma, dashed=True)
        emit("c", chart)
    if "d" in panels:
        lk, lerr, flag = _columns(path("lsqr.csv"), "k", "rel_error", "is_kstar")
        tk, terr = _columns(path("tsvd.csv"), "k", "rel_error")
        best = min(range(len(terr)), key=terr.__getitem__) if terr else 0
        span = max(int(lk[-1]) if lk else 0, (best + 1) + 5)
        keep = [j for j, k in enumerate(tk) if k <= span]
        chart = Chart(
            "Semi-convergence of the iterates",
            "k", "relative error (log)", ylog=True,
        )
        chart.add_series("lsqr", lk, lerr, marker=True)
        chart.add_series("tsvd", [tk[j] for j in keep], [terr[j] for j in keep])
        kstar = [k for k, f in zip(lk, flag) if f > 0.0]
        if kstar:
            chart.add_vline(kstar[0], "k*")
        if terr:
            chart.add_vline(tk[best], "k0")
        emit("d", chart)
    return written


# Artifact comparison =========================================================
@dataclass(frozen=True)
class ColumnDiff:
    """One differing column (or structural mismatch) between two artifacts."""

    file: str
    column: str
    count: int
    max_rel: float
    tolerance: float
    noise_dependent: bool


@dataclass(frozen=True)
class CompareReport:
    """Outcome of comparing two artifact directories."""

    ok: bool
    diffs: tuple
    notes: tuple

    def lines(self) -> list:
        out = []
        for d in self.diffs:
            kind = "noise-dependent" if d.noise_dependent else "noise-independent"
            out.append(
                f"DIFF {d.file} column {d.column}: {d.count} cell(s), "
                f"max relative {d.max_rel:.3e}, tolerance {d.tolerance:g} ({kind})"
            )
        out.extend(f"NOTE {n}" for n in self.notes)
        out.append("RESULT " + ("match" if self.ok else "mismatch"))
        return out


def _parse_kv_file(path) -> dict:
    out = {}
    with open(path, "r", encoding="ascii") as fh:
        for ln in fh:
            ln = ln.rstrip("\n")
            if not ln:
                continue
            key, _, value = ln.partition("=")
            out[key] = value
    return out


def _cells_differ(a: str, b: str, tol: float):
    """(differs, relative difference) for two CSV cells."""
    if a == b:
        return False, 0.0
    try:
        fa, fb = float(a), float(b)
    except ValueError:
        return True, math.inf
    if math.isnan(fa) and math.isnan(fb):
        return False, 0.0
    if fa == fb:
        return False, 0.0
    scale = max(abs(fa), abs(fb))
    if not math.isfinite(scale):
        return True, math.inf
    rel = abs(fa - fb) / scale
    return rel > tol, rel


def compare(dir_a, dir_b, tolerances: dict | None = None) -> CompareReport:
    """Column-wise diff of two artifact directories.

    ``tolerances`` maps column names to relative tolerances (default exact).
    Returns a :class:`CompareReport`; raises :class:`ConfigError` when an
    artifact is unreadable or the schemas disagree.
    """
    tolerances = dict(tolerances or {})
    diffs, notes = [], []
    for name in ARTIFACT_CSVS:
        pa, pb = os.path.join(dir_a, name), os.path.join(dir_b, name)
        have_a, have_b = os.path.exists(pa), os.path.exists(pb)
        if not have_a and not have_b:
            continue
        if have_a != have_b:
            diffs.append(ColumnDiff(name, "<file>", 1, math.inf, 0.0, True))
            continue
        try:
            kind_a, header_a, rows_a = read_csv(pa)
            kind_b, header_b, rows_b = read_csv(pb)
        except ValueError as err:
            raise ConfigError(str(err)) from err
        if kind_a != kind_b or header_a != header_b:
            raise ConfigError(f"{name}: artifact schemas disagree")
        if len(rows_a) != len(rows_b):
            diffs.append(
                ColumnDiff(name, "<rows>", abs(len(rows_a) - len(rows_b)),
                           math.inf, 0.0, True)
            )
        for j, column in enumerate(header_a):
            tol = tolerances.get(column, 0.0)
            count, worst = 0, 0.0
            for ra, rb in zip(rows_a, rows_b):
                differs, rel = _cells_differ(ra[j], rb[j], tol)
                if differs:
                    count += 1
                    worst = max(worst, rel)
            if count:
                diffs.append(
                    ColumnDiff(name, column, count, worst, tol,
                               column not in NOISE_INDEPENDENT_COLUMNS)
                )
    sa, sb = os.path.join(dir_a, "summary.txt"), os.path.join(dir_b, "summary.txt")
    if os.path.exists(sa) and os.path.exists(sb):
        kva, kvb = _parse_kv_file(sa), _parse_kv_file(sb)
        for key in sorted(set(kva) | set(kvb)):
            va, vb = kva.get(key), kvb.get(key)
            if va != vb:
                differs, rel = _cells_differ(va or "", vb or "", tolerances.get(key, 0.0))
                if differs:
                    diffs.append(
                        ColumnDiff("summary.txt", key, 1, rel, tolerances.get(key, 0.0),
                                   key in _NOISE_DEPENDENT_SUMMARY_KEYS)
                    )
    for column, tol in sorted(tolerances.items()):
        notes.append(f"column {column}: tolerance relaxed to {tol:g}")
    notes.append("config echo and SVG panels are derived inputs/outputs; not compared")
    return CompareReport(ok=not diffs, diffs=tuple(diffs), notes=tuple(notes))
