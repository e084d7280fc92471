"""`ctc-detector response`: one excitation probability."""

import logging
import sys
from argparse import Namespace
from typing import List

from src.commands.options import (
    geometry_from_args,
    parse_truncation,
    quadrature_from_args,
)
from src.detector_schema import DetectorConfig, ResponseResult, TimeMachine
from src.models.response import compute_response
from src.utils import format_number

logger = logging.getLogger(__name__)


def summary_lines(result: ResponseResult, lam: float = 1.0) -> List[str]:
    """Human-readable report, one fact per line."""
    lines = [
        f"P/lambda^2 = {result.probability:.17g}",
        f"method: {result.method.value}",
    ]
    if lam != 1.0:
        lines.append(f"P = {format_number(result.scaled_probability(lam))}")
    if result.image_sum is not None:
        lines.append(f"N: {result.image_sum.truncation_N}")
        lines.append(f"tail_estimate: {format_number(result.tail_estimate)}")
        lines.append(f"decay_onset: {result.image_sum.onset}")
    if result.image_sum is not None:
        lines.append(f"eps_residual: {format_number(result.eps_residual)}")
    if result.clipped_mass:
        lines.append(f"clipped_mass: {format_number(result.clipped_mass)}")
    lines.append(f"imag_residue: {format_number(result.imag_residue)}")
    lines.extend(f"note: {note}" for note in result.notes)
    return lines


def run(args: Namespace) -> int:
    geometry = geometry_from_args(args)
    cfg = quadrature_from_args(args)
    det = DetectorConfig(omega=args.omega, lam=args.lam, xi=args.xi)
    if isinstance(geometry, TimeMachine):
        logger.info(
            "time machine A=%.6g L=%.6g W=%.6g (%s regime)",
            geometry.A,
            geometry.L,
            geometry.W,
            geometry.regime(),
        )
    result = compute_response(
        det, geometry, cfg, N=parse_truncation(args.N), tail_tol=args.tail_tol
    )
    sys.stdout.write("\n".join(summary_lines(result, args.lam)) + "\n")
    return 0
