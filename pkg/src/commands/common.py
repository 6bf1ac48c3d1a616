from pathlib import Path

import numpy as np
from pydantic import ValidationError

from src.repository.plans import load_plan
from src.schemas.plans import ParamPlan
from src.services.bitcore import BitString
from src.services.errors import CodewordFormatError, UsageError


def read_plan(path: str | None) -> ParamPlan:
    """
    The read_plan function loads the plan named by ``--plan``.

    :param path: str | None: Value of the flag
    :return: The plan; a missing flag or file is a usage error, a malformed file a format error
    """
    if path is None:
        raise UsageError("--plan is required")
    if not Path(path).is_file():
        raise UsageError(f"no plan file at {path}")
    try:
        return load_plan(Path(path))
    except ValidationError as error:
        raise CodewordFormatError(f"{path} is not a plan: {error.error_count()} validation errors") from error


def parse_hex(text: str, length: int, what: str) -> BitString:
    """Hex input of exactly ``length`` bits; the digit count must match."""
    text = text.lower().removeprefix("0x")
    if len(text) != max(1, -(-length // 4)):
        raise UsageError(f"{what} needs {-(-length // 4)} hex digits for {length} bits, got {len(text)}")
    try:
        value = int(text, 16)
    except ValueError as error:
        raise UsageError(f"{what} is not hex: {text!r}") from error
    if value >> length:
        raise UsageError(f"{what} has bits above position {length}")
    return BitString(value, length)


def make_rng(seed: int) -> np.random.Generator:
    return np.random.default_rng(seed & ((1 << 64) - 1))
