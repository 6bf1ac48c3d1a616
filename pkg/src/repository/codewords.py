from pathlib import Path

from src.repository.plans import PLAN_HASH_BYTES, plan_hash
from src.schemas.plans import ParamPlan
from src.services.bitcore import BitString
from src.services.errors import CodewordFormatError, PlanHashMismatch, RangeError
from src.services.nmcode import Codeword

MAGIC = b"NMC1"
LENGTH_BYTES = 4


def codeword_bytes(codeword: Codeword, plan: ParamPlan) -> bytes:
    """Magic, 4-byte big-endian n, plan hash, then both halves in bit-string serialization."""
    return (MAGIC + codeword.n.to_bytes(LENGTH_BYTES, "big") + plan_hash(plan)
            + codeword.left.to_bytes() + codeword.right.to_bytes())


def parse_codeword(data: bytes, plan: ParamPlan) -> Codeword:
    """
    The parse_codeword function checks and decodes an NMC1 buffer.

    :param data: bytes: File contents
    :param plan: ParamPlan: Plan the codeword must have been written under
    :return: The codeword
    """
    header = len(MAGIC) + LENGTH_BYTES + PLAN_HASH_BYTES
    if len(data) < header or data[:len(MAGIC)] != MAGIC:
        raise CodewordFormatError("missing NMC1 header")
    n = int.from_bytes(data[len(MAGIC):len(MAGIC) + LENGTH_BYTES], "big")
    if data[len(MAGIC) + LENGTH_BYTES:header] != plan_hash(plan):
        raise PlanHashMismatch("codeword was written under another plan")
    try:
        left, offset = BitString.read_from(data, header)
        right, offset = BitString.read_from(data, offset)
    except RangeError as error:
        raise CodewordFormatError(str(error)) from error
    if offset != len(data):
        raise CodewordFormatError("trailing bytes after codeword")
    if left.length != n or right.length != n:
        raise CodewordFormatError(f"halves of {left.length} and {right.length} bits in a file for n={n}")
    if n != plan.n:
        raise PlanHashMismatch(f"codeword for n={n} under a plan for n={plan.n}")
    return Codeword(left, right)


def write_codeword(codeword: Codeword, plan: ParamPlan, path: Path) -> Path:
    path = Path(path)
    path.write_bytes(codeword_bytes(codeword, plan))
    return path


def read_codeword(path: Path, plan: ParamPlan) -> Codeword:
    return parse_codeword(Path(path).read_bytes(), plan)
