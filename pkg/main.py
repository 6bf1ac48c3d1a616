import argparse
import logging
import sys

from pydantic import ValidationError

from src.commands import EXIT_FAILED, EXIT_FORMAT, EXIT_INFEASIBLE, EXIT_USAGE, codec, extract, plan, verify
from src.conf.config import config
from src.services.errors import (
    CodewordFormatError,
    ExforgeError,
    Infeasible,
    LengthMismatch,
    PlanHashMismatch,
    RangeError,
    UsageError,
)

logger = logging.getLogger("exforge")


class ExitParser(argparse.ArgumentParser):
    """Argument parser whose usage errors exit with code 64."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = ExitParser(prog="exforge", description="Non-malleable extractors and split-state codes")
    subparsers = parser.add_subparsers(dest="command", required=True, parser_class=ExitParser)
    for command in (plan, codec, extract, verify):
        command.register(subparsers)
    return parser


def main(argv: list[str] | None = None) -> int:
    """
    The main function parses the command line and runs one subcommand.

    :param argv: list[str] | None: Arguments, sys.argv[1:] by default
    :return: The exit code
    """
    logging.basicConfig(level=config.LOG_LEVEL, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except Infeasible as error:
        logger.error(str(error))
        return EXIT_INFEASIBLE
    except (CodewordFormatError, PlanHashMismatch, ValidationError) as error:
        logger.error(str(error))
        return EXIT_FORMAT
    except (UsageError, LengthMismatch, RangeError) as error:
        logger.error(str(error))
        return EXIT_USAGE
    except ExforgeError as error:
        logger.error(f"{type(error).__name__}: {error}")
        return EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
