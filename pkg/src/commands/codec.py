import argparse
import logging
from pathlib import Path

from src.commands import EXIT_OK
from src.commands.common import make_rng, parse_hex, read_plan
from src.repository.codewords import read_codeword, write_codeword
from src.services.errors import UsageError
from src.services.nmcode import CodecCfg, decode, encode

logger = logging.getLogger(__name__)


def register(subparsers) -> None:
    encoder = subparsers.add_parser("encode", help="encode a hex message into an NMC1 codeword file")
    encoder.add_argument("message", help="message in hex, m bits")
    encoder.add_argument("--plan", help="two-source-nm plan file")
    encoder.add_argument("--seed", type=int, default=0, help="seed of the encoder randomness")
    encoder.add_argument("--out", help="codeword file to write")
    encoder.set_defaults(handler=cmd_encode)

    decoder = subparsers.add_parser("decode", help="decode an NMC1 codeword file to hex")
    decoder.add_argument("codeword", help="codeword file")
    decoder.add_argument("--plan", help="plan the codeword was written under")
    decoder.set_defaults(handler=cmd_decode)


def cmd_encode(args: argparse.Namespace) -> int:
    """
    The cmd_encode function writes a uniformly drawn encoding of the message.

    :param args: argparse.Namespace: Parsed flags
    :return: Exit code
    """
    if not args.out:
        raise UsageError("--out is required for encode")
    plan = read_plan(args.plan)
    cfg = CodecCfg.from_plan(plan)
    msg = parse_hex(args.message, cfg.m, "message")
    codeword = encode(cfg, msg, make_rng(args.seed))
    write_codeword(codeword, plan, Path(args.out))
    logger.info(f"{cfg.m}-bit message encoded into 2 x {cfg.n} bits at {args.out}")
    return EXIT_OK


def cmd_decode(args: argparse.Namespace) -> int:
    plan = read_plan(args.plan)
    cfg = CodecCfg.from_plan(plan)
    if not Path(args.codeword).is_file():
        raise UsageError(f"no codeword file at {args.codeword}")
    print(decode(cfg, read_codeword(Path(args.codeword), plan)).to_hex())
    return EXIT_OK
