"""Command-line entry point: ctc-detector {response,sweep,plot,validate}.

Exit codes: 0 success, 2 usage or configuration error, 3 numerical
non-convergence, 4 validation failure.
"""

import argparse
import logging
import sys
from typing import List, Optional

from src.commands import plot, response, sweep, validate
from src.config import RESPONSE_DEFAULTS
from src.detector_schema import SWEEP_MODES
from src.errors import ConvergenceError, DetectorError
from src.utils import format_number
from src.validation import CHECK_NAMES

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_CONVERGENCE = 3
EXIT_VALIDATION = validate.VALIDATION_FAILED


def _add_numeric_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--tol", type=float, help="relative quadrature tolerance")
    parser.add_argument(
        "--eps-ladder",
        dest="eps_ladder",
        help="regulator ladder, 'e1,e2,...' or 'eps0:rungs'",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ctc-detector",
        description="Derivative-coupled detector responses near a time machine.",
    )
    parser.add_argument("--verbose", "-v", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    resp = sub.add_parser("response", help="one excitation probability")
    resp.add_argument(
        "--geometry", choices=["minkowski", "ec", "ads2", "tm"], required=True
    )
    resp.add_argument("--omega", type=float, required=True, help="gap Omega T")
    resp.add_argument("--w", type=float, help="curvature W T")
    resp.add_argument("--ell", type=float, help="circumference L / T")
    resp.add_argument("--delta", type=float, help="time machine A = 1 + delta")
    resp.add_argument("--A", type=float, help="time machine warp A")
    resp.add_argument("--gamma", type=float, default=RESPONSE_DEFAULTS["gamma"])
    resp.add_argument("--N", default="10", help="image truncation or 'auto'")
    resp.add_argument("--xi", type=float, default=RESPONSE_DEFAULTS["xi"])
    resp.add_argument("--lam", type=float, default=1.0, help="coupling")
    resp.add_argument(
        "--tail-tol", dest="tail_tol", type=float, default=RESPONSE_DEFAULTS["tail_tol"]
    )
    _add_numeric_flags(resp)
    resp.set_defaults(handler=cmd_response)

    swp = sub.add_parser("sweep", help="responses along a parameter grid")
    swp.add_argument("--config", help="JSON sweep file")
    swp.add_argument("--mode", choices=SWEEP_MODES)
    swp.add_argument("--omega", type=float)
    swp.add_argument("--w", type=float)
    swp.add_argument("--ell", type=float)
    swp.add_argument("--gamma", type=float)
    swp.add_argument("--N")
    swp.add_argument("--xi", type=float)
    swp.add_argument("--tail-tol", dest="tail_tol", type=float)
    swp.add_argument("--out", help="CSV output path")
    _add_numeric_flags(swp)
    swp.set_defaults(handler=cmd_sweep)

    plt_ = sub.add_parser("plot", help="render a sweep CSV as SVG")
    plt_.add_argument("csv")
    plt_.add_argument("--out", help="SVG output path")
    plt_.add_argument("--mode", choices=SWEEP_MODES, help="axis label")
    plt_.set_defaults(handler=cmd_plot)

    val = sub.add_parser("validate", help="run the numerical self-checks")
    val.add_argument("--only", nargs="+", choices=CHECK_NAMES)
    val.add_argument("--bound", type=float, help="replace every check bound")
    val.add_argument("--fast", action="store_true", help="skip the full image sums")
    val.add_argument("--out", help="JSON-lines report path")
    _add_numeric_flags(val)
    val.set_defaults(handler=cmd_validate)
    return parser


def cmd_response(args: argparse.Namespace) -> int:
    return response.run(args)


def cmd_sweep(args: argparse.Namespace) -> int:
    return sweep.run(args)


def cmd_plot(args: argparse.Namespace) -> int:
    return plot.run(args)


def cmd_validate(args: argparse.Namespace) -> int:
    return validate.run(args)


def _partial(estimate) -> str:
    if isinstance(estimate, (int, float, complex)):
        return format_number(estimate)
    return str(estimate)


def _configure_logging(verbosity: int) -> None:
    level = logging.WARNING
    if verbosity == 1:
        level = logging.INFO
    elif verbosity > 1:
        level = logging.DEBUG
    logging.basicConfig(
        level=level,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or EXIT_OK)
    _configure_logging(args.verbose)

    try:
        return args.handler(args)
    except ConvergenceError as exc:
        sys.stderr.write(f"error: {exc}\n")
        if exc.estimate is not None:
            sys.stderr.write(
                f"partial estimate: {_partial(exc.estimate)}"
                f" (error bound {format_number(exc.error_bound)})\n"
            )
        return EXIT_CONVERGENCE
    except (DetectorError, ValueError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
