"""`ctc-detector validate`: run the numerical self-checks."""

import sys
from argparse import Namespace
from pathlib import Path

from src.commands.options import quadrature_from_args
from src.validation import SuiteReport, ValidationConfig, run_all

VALIDATION_FAILED = 4


def print_summary(report: SuiteReport, stream=None) -> None:
    stream = stream or sys.stdout
    for outcome in report.outcomes:
        flag = "PASS" if outcome.passed else "FAIL"
        stream.write(
            f"{flag} {outcome.name}: measured {outcome.measured:.3e}"
            f" <= {outcome.bound:.1e}\n"
        )
    stream.write(
        f"{len(report.outcomes) - len(report.failures())}/{len(report.outcomes)} passed\n"
    )


def run(args: Namespace) -> int:
    config = ValidationConfig(
        only=args.only,
        bound=args.bound,
        quadrature=quadrature_from_args(args),
        tm_full_sum=not args.fast,
    )
    report = run_all(config)
    if args.out:
        Path(args.out).write_text(report.to_jsonl())
    else:
        sys.stdout.write(report.to_jsonl())
    print_summary(report, sys.stderr if not args.out else sys.stdout)
    return 0 if report.passed else VALIDATION_FAILED
