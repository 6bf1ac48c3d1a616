import argparse
from typing import Callable

from src.commands import EXIT_OK
from src.commands.common import parse_hex, read_plan
from src.schemas.plans import ParamPlan
from src.services.bitcore import BitString
from src.services.errors import UsageError
from src.services.iext import iext_extract
from src.services.nm2ext import Nm2Cfg, nm2_extract
from src.services.seeded import lhl_extract
from src.services.snmext import SnmCfg, snm_extract
from src.services.twosource import ip_extract

Evaluation = tuple[int, int, Callable[[BitString, BitString], BitString]]


def _seeded(plan: ParamPlan) -> SnmCfg:
    if plan.profile != "seeded-nm":
        raise UsageError(f"this construction needs a seeded-nm plan, not {plan.profile}")
    return SnmCfg.from_plan(plan)


def _two_source(plan: ParamPlan) -> Nm2Cfg:
    if plan.profile != "two-source-nm":
        raise UsageError(f"this construction needs a two-source-nm plan, not {plan.profile}")
    return Nm2Cfg.from_plan(plan)


def seeded_nm(plan: ParamPlan) -> Evaluation:
    cfg = _seeded(plan)
    return cfg.n, cfg.d, lambda x, y: snm_extract(cfg, x, y)


def two_source_nm(plan: ParamPlan) -> Evaluation:
    cfg = _two_source(plan)
    return cfg.n, cfg.n, lambda x, y: nm2_extract(cfg, x, y)


def lhl(plan: ParamPlan) -> Evaluation:
    """The output extractor of a seeded-nm plan."""
    ext = _seeded(plan).ext
    return ext.n, ext.d, lambda x, y: lhl_extract(ext, x, y)


def ip(plan: ParamPlan) -> Evaluation:
    """The sampling inner product of a two-source-nm plan."""
    cfg = _two_source(plan).ip
    return cfg.n, cfg.n, lambda x, y: ip_extract(cfg, x, y)


def iext(plan: ParamPlan) -> Evaluation:
    """The invertible extractor of a two-source-nm plan."""
    cfg = _two_source(plan).iext
    return cfg.n, cfg.d, lambda x, y: iext_extract(cfg, x, y)


CONSTRUCTIONS: dict[str, Callable[[ParamPlan], Evaluation]] = {
    "seeded-nm": seeded_nm,
    "two-source-nm": two_source_nm,
    "lhl": lhl,
    "ip": ip,
    "iext": iext,
}


def register(subparsers) -> None:
    parser = subparsers.add_parser("extract", help="evaluate a construction on hex inputs")
    parser.add_argument("construction", choices=sorted(CONSTRUCTIONS))
    parser.add_argument("x", help="first input (source) in hex")
    parser.add_argument("y", help="second input (seed or second source) in hex")
    parser.add_argument("--plan", help="plan file")
    parser.set_defaults(handler=cmd_extract)


def cmd_extract(args: argparse.Namespace) -> int:
    """
    The cmd_extract function prints the output of a plan-sized construction.

    :param args: argparse.Namespace: Parsed flags
    :return: Exit code
    """
    x_len, y_len, fn = CONSTRUCTIONS[args.construction](read_plan(args.plan))
    x = parse_hex(args.x, x_len, "x")
    y = parse_hex(args.y, y_len, "y")
    print(fn(x, y).to_hex())
    return EXIT_OK
