"""Command-line interface: ``illposed run`` and ``illposed compare``.

Exit codes: 0 on success (compare: directories match), 1 on an invariant
violation (compare: directories differ), 2 on configuration errors.
"""

from __future__ import annotations

import argparse
import sys

from .csvio import format_value
from .experiment import (
    ConfigError,
    InvariantViolation,
    compare,
    load_config,
    run,
)

_RUN_FLAG_HELP = {
    "problem": "test problem (shaw, gravity, deriv2, heat, prescribed, picard_synthetic)",
    "n": "problem size",
    "noise": "relative noise level in (0, 1)",
    "seed": "noise / construction seed",
    "kmax": "largest analyzed step (default min(n, 40); 'none' for the default)",
    "out": "artifact directory",
    "panels": "figure panels to render, subset of abcd ('none' to skip)",
    "scale": "multiplier applied to n",
    "depth": "observation depth (gravity)",
    "kappa": "conductivity (heat)",
    "rho": "geometric decay ratio (severe spectra)",
    "alpha": "power-law decay exponent (moderate/mild spectra)",
    "zeta": "spectrum scale factor",
    "beta": "coefficient decay exponent (synthetic data)",
    "decay": "spectrum family for synthetic problems (severe, moderate, mild)",
    "reorth": "full reorthogonalization (true/false)",
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="illposed",
        description="Regularization laboratory for linear discrete ill-posed problems.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    runp = sub.add_parser("run", help="execute one configured experiment")
    runp.add_argument("--config", metavar="FILE", help="flat key=value config file")
    for key, text in _RUN_FLAG_HELP.items():
        runp.add_argument(f"--{key}", help=f"{text} (overrides the config file)")

    cmpp = sub.add_parser("compare", help="diff two artifact directories")
    cmpp.add_argument("dir_a")
    cmpp.add_argument("dir_b")
    cmpp.add_argument(
        "--tol",
        action="append",
        default=[],
        metavar="COLUMN=REL",
        help="relative tolerance for one column (repeatable)",
    )
    return parser


def _parse_tolerances(entries) -> dict:
    tolerances = {}
    for entry in entries:
        column, sep, value = entry.partition("=")
        if not sep or not column:
            raise ConfigError(f"--tol expects COLUMN=REL, got {entry!r}")
        try:
            tolerances[column] = float(value)
        except ValueError as err:
            raise ConfigError(f"--tol {entry!r}: {err}") from err
    return tolerances


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "run":
            overrides = {key: getattr(args, key) for key in _RUN_FLAG_HELP}
            config = load_config(args.config, overrides)
            result = run(config)
            for key, value in result.summary.items():
                print(f"{key}={format_value(value)}")
            print(f"artifacts written to {result.outdir}")
            return 0
        report = compare(args.dir_a, args.dir_b, _parse_tolerances(args.tol))
        print("\n".join(report.lines()))
        return 0 if report.ok else 1
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return 2
    except InvariantViolation as err:
        print(f"invariant violation: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
