'''
Command line driver: builds a named family of Lagrangian H-umbilical (or totally
geodesic) submanifolds of H^n, runs the selected check suites over a chart grid
and writes the report.

Exit status: 0 when every check passes, 1 when some check fails, 2 on usage or
evaluation errors.

    python humbilical_verifier.py --family pseudo_sphere --param b=0.5 --param n=3 --suite all
'''

__version__ = "0.0.1"
__status__ = "Development"

import os
import sys
import logging
import argparse

from lagrangian_humbilical_library.families import DEFAULT_GRID_POINTS
from lagrangian_humbilical_library.immersion import CURVATURE_STEP, DEFAULT_STEP, NESTED_STEP
from lagrangian_humbilical_library.report_processor import FORMATS, emit_report
from lagrangian_humbilical_library.verification_suite import (
    DEFAULT_TOLERANCES, FAMILY_DEFAULTS, SUITES, run_suite)

# Config the logger.
log = logging.getLogger(__name__)

LOG_LEVEL = os.getenv("HUMBILICAL_LOG_LEVEL", "INFO")

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_ERROR = 2


def _key_value(text):
    key, separator, value = text.partition("=")
    if not separator or not key:
        raise argparse.ArgumentTypeError(f'Expected KEY=VALUE, got {text!r}')
    return key.strip(), value.strip()


def _tolerance(text):
    name, value = _key_value(text)
    try:
        return name, float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f'Tolerance of {name} must be a number, got {value!r}')


def build_parser():
    argparser = argparse.ArgumentParser(
        description="Verify Lagrangian H-umbilical submanifolds of quaternion Euclidean space.")
    argparser.add_argument('--family', required=True, choices=sorted(FAMILY_DEFAULTS),
                           help="The family to build.")
    argparser.add_argument('--param', metavar="KEY=VAL", type=_key_value, action="append", default=[],
                           help="Family parameter, repeatable (e.g. b=0.5, n=3).")
    argparser.add_argument('--suite', default="all", choices=list(SUITES) + ["all"],
                           help="Check suite to run; 'all' runs every suite applicable to the family.")
    argparser.add_argument('--grid', metavar="N", type=int, default=DEFAULT_GRID_POINTS,
                           help="Grid points per chart coordinate.")
    argparser.add_argument('--step', metavar="H", type=float, default=DEFAULT_STEP,
                           help=f"Jet finite difference step (default {DEFAULT_STEP:g}). Nested differences "
                                f"keep their own steps, {NESTED_STEP:g} for Christoffel and Codazzi terms "
                                f"and {CURVATURE_STEP:g} for curvature.")
    argparser.add_argument('--tol', metavar="NAME=VAL", type=_tolerance, action="append", default=[],
                           help=f"Per-check tolerance override, repeatable. Checks: {', '.join(DEFAULT_TOLERANCES)}.")
    argparser.add_argument('--format', default="json", choices=FORMATS, help="Report format.")
    argparser.add_argument('--seed', type=int, default=0, help="Seed of the random curvature test planes.")
    argparser.add_argument('--out', metavar="FILE", help="Write the report to FILE instead of stdout.")
    argparser.add_argument('--workers', type=int, default=None,
                           help="Worker threads for grid sweeps (default HUMBILICAL_WORKERS or 1).")
    argparser.add_argument('--timing', action="store_true", help="Include wall_ms in the report.")
    argparser.add_argument('--log-level', default=LOG_LEVEL,
                           choices=["DEBUG", "INFO", "WARNING", "ERROR"], help="Logging level (stderr).")
    return argparser


def main(argv=None):
    argparser = build_parser()
    try:
        args = argparser.parse_args(argv)
    except SystemExit as e:
        return EXIT_PASS if e.code == 0 else EXIT_ERROR

    # Only the driver configures logging; stdout carries the report.
    logging.basicConfig(format="[%(name)s.%(funcName)s():%(lineno)d] - [%(levelname)s] - %(message)s",
                        stream=sys.stderr,
                        level=getattr(logging, args.log_level.upper(), logging.INFO))

    try:
        report = run_suite(args.family, dict(args.param), suite=args.suite, grid=args.grid, step=args.step,
                           tolerances=dict(args.tol), seed=args.seed, workers=args.workers,
                           timing=args.timing)
        text = emit_report(report, args.format)
        if args.out:
            with open(args.out, "w", encoding="utf-8", newline="") as out:
                out.write(text)
            log.info(f'Report written to {args.out}')
        else:
            sys.stdout.write(text)
    except (ValueError, IOError) as e:
        log.error(f'Verification could not run: {e}', exc_info=args.log_level.upper() == "DEBUG")
        return EXIT_ERROR

    if not report.passed:
        log.warning(f'Failed checks: {", ".join(report.failed_checks())}')
        return EXIT_FAIL
    return EXIT_PASS


if __name__ == "__main__":
    sys.exit(main())
