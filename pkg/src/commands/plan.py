import argparse
import logging
from pathlib import Path

from src.commands import EXIT_OK
from src.repository.plans import save_plan
from src.services.errors import RangeError, UsageError
from src.services.planner import LEDGERS, PROFILES, parse_eps, plan_params

logger = logging.getLogger(__name__)


def register(subparsers) -> None:
    parser = subparsers.add_parser("plan", help="solve the parameter ledger of a construction")
    parser.add_argument("--n", type=int, required=True, help="source length")
    parser.add_argument("--k", type=int, help="min-entropy, n by default")
    parser.add_argument("--eps", default="1/4", help="target error as a fraction or 2^-x")
    parser.add_argument("--profile", choices=PROFILES, default="two-source-nm")
    parser.add_argument("--ledger", choices=LEDGERS, default="strict")
    parser.add_argument("--t", type=int, default=1, help="tamperings of the seed (multi)")
    parser.add_argument("--sources", type=int, default=1, help="independent sources (multi)")
    parser.add_argument("--plugin-n", type=int, help="plug-in input length (multi)")
    parser.add_argument("--plugin-m", type=int, default=1, help="plug-in output length (multi)")
    parser.add_argument("--out", help="also write the plan to this file")
    parser.set_defaults(handler=cmd_plan)


def cmd_plan(args: argparse.Namespace) -> int:
    """
    The cmd_plan function prints the plan JSON for the given parameters.

    Infeasible propagates to the caller, which maps it to exit code 2.

    :param args: argparse.Namespace: Parsed flags
    :return: Exit code
    """
    try:
        eps = parse_eps(args.eps)
    except (ValueError, RangeError) as error:
        raise UsageError(f"cannot read eps {args.eps!r}") from error
    k = args.n if args.k is None else args.k
    kwargs = {}
    if args.profile == "multi":
        kwargs = {"t": args.t, "sources": args.sources, "plugin_n": args.plugin_n, "plugin_m": args.plugin_m}
    plan = plan_params(args.n, k, eps, args.profile, args.ledger, **kwargs)
    print(plan.model_dump_json(indent=2))
    if args.out:
        save_plan(plan, Path(args.out))
        logger.info(f"plan written to {args.out}")
    return EXIT_OK
