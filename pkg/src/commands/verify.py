import argparse
import logging
from pathlib import Path

from src.commands import EXIT_FAILED, EXIT_OK
from src.conf.thresholds import Thresholds
from src.repository.reports import write_report
from src.services.errors import UsageError
from src.services.verification import SUITES, run_suite

logger = logging.getLogger(__name__)

DEFAULT_BUDGET = 64


def register(subparsers) -> None:
    parser = subparsers.add_parser("verify", help="run a verification suite and print its JSON report")
    parser.add_argument("suite", choices=sorted(SUITES))
    parser.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="work budget, 0 runs nothing")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--threshold", action="append", default=[], metavar="NAME=VALUE",
                        help="override a regression threshold, repeatable")
    parser.add_argument("--out", help="also write the report to this file")
    parser.set_defaults(handler=cmd_verify)


def cmd_verify(args: argparse.Namespace) -> int:
    """
    The cmd_verify function runs a suite; the exit code is 0 exactly when every row passed.

    :param args: argparse.Namespace: Parsed flags
    :return: Exit code
    """
    try:
        thresholds = Thresholds().override(args.threshold)
    except ValueError as error:
        raise UsageError(str(error)) from error
    report = run_suite(args.suite, args.budget, args.seed, thresholds)
    print(write_report(report, Path(args.out) if args.out else None))
    if not report.passed:
        failed = [result.construction for result in report.results if not result.passed]
        logger.error(f"suite {args.suite} failed: {', '.join(failed)}")
        return EXIT_FAILED
    return EXIT_OK
