"""Command-line entry point.

Exit status: 0 when every requested verification passes, 1 when one fails,
2 for configuration errors and 3 for solver errors.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import runs
from .config import apply_tolerance_override, load_config
from .errors import ConfigError, UnitransError

EXIT_OK, EXIT_FAILED, EXIT_CONFIG, EXIT_SOLVER = 0, 1, 2, 3


def _common(p):
    p.add_argument("--config", help="JSON run configuration (defaults apply when omitted)")
    p.add_argument("--out", default="unitrans-out", help="output directory")
    p.add_argument("--tol", type=float, help="override every verification tolerance")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="unitrans",
        description="Transform-method solvers for the half-line Schrodinger equation and the "
                    "quarter-plane Laplace equation with a potential.")
    sub = parser.add_subparsers(dest="command", required=True)

    _common(sub.add_parser("scattering", help="scattering functions and bound states"))

    solve = sub.add_parser("solve", help="spectral solution on a grid")
    solve_sub = solve.add_subparsers(dest="problem", required=True)
    for name in ("schrodinger", "laplace"):
        p = solve_sub.add_parser(name)
        _common(p)
        p.add_argument("--compare", action="append",
                       help="add a comparison (oracle, classical, representations)")

    lap = sub.add_parser("laplace", help="Laplace-specific certifications")
    lap_sub = lap.add_subparsers(dest="action", required=True)
    _common(lap_sub.add_parser("rh-jump", help="jump relation residual of a boundary transform"))

    oracle = sub.add_parser("oracle", help="finite-difference reference solutions")
    oracle_sub = oracle.add_subparsers(dest="problem", required=True)
    for name in ("schrodinger", "laplace"):
        _common(oracle_sub.add_parser(name))

    verify = sub.add_parser("verify", help="verification suites")
    verify_sub = verify.add_subparsers(dest="suite", required=True)
    for name in ("all", "completeness", "unitarity", "global-relation"):
        _common(verify_sub.add_parser(name))
    return parser


def _dispatch(args, doc, out):
    cmd = args.command
    if cmd == "scattering":
        return runs.run_scattering(doc, out)
    if cmd == "solve":
        fn = runs.run_solve_schrodinger if args.problem == "schrodinger" else runs.run_solve_laplace
        return fn(doc, out, compare=args.compare)
    if cmd == "laplace":
        return runs.run_rh_jump(doc, out)
    if cmd == "oracle":
        fn = runs.run_oracle_schrodinger if args.problem == "schrodinger" else runs.run_oracle_laplace
        return fn(doc, out)
    return runs.run_verify(doc, out, args.suite)


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        doc = apply_tolerance_override(load_config(args.config), args.tol)
        if getattr(args, "compare", None):
            bad = set(args.compare) - {"oracle", "classical", "representations"}
            if bad or (args.problem == "laplace" and set(args.compare) - {"oracle"}):
                raise ConfigError(f"unsupported comparison {sorted(set(args.compare))}")
        os.makedirs(args.out, exist_ok=True)
        report = _dispatch(args, doc, args.out)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (UnitransError, ValueError) as exc:
        print(f"solver error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    sys.stdout.write(report.text())
    return EXIT_OK if report.ok else EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
