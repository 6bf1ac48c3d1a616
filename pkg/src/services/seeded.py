"""
Strong seeded extractors by leftover hashing.

The family multiplies the seed, padded with a trailing 1 so it is never zero,
with the source folded into the same field GF(2^D), D = max(d + 1, m), and
keeps the top ``m`` bits of the product.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from fractions import Fraction

import numpy as np

from src.services.bitcore import BitString
from src.services.distrib import ErrorBound
from src.services.errors import LengthMismatch, RangeError
from src.services.gfield import mul_array, wide_field_ctx

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SeededExtCfg:
    n: int
    d: int
    m: int
    k: int
    bound: ErrorBound | None
    average_case: bool = False

    @classmethod
    def create(cls, n: int, d: int, m: int, k: int | None = None) -> SeededExtCfg:
        """
        The create function sizes an extractor and attaches its leftover-hash bound.

        The bound is only claimed when the family is universal, that is when the
        source fits the field without folding and the output is no wider than the
        padded seed; other shapes are audited, not guaranteed.

        :param n: int: Source length
        :param d: int: Seed length
        :param m: int: Output length
        :param k: int | None: Design min-entropy, the source length by default
        :return: The configuration
        """
        if n < 0 or d < 0 or m < 1:
            raise RangeError(f"extractor shape n={n} d={d} m={m}")
        k = n if k is None else k
        width = max(d + 1, m)
        bound = None
        if n <= width and m <= d + 1:
            bound = ErrorBound.power(Fraction(m - k, 2) - 1)
        return cls(n, d, m, k, bound)

    @property
    def width(self) -> int:
        return max(self.d + 1, self.m)


def fold(x: BitString, width: int) -> int:
    """XOR of the consecutive ``width``-bit chunks of ``x`` (last chunk zero-padded)."""
    folded = 0
    for chunk in x.chunks(width) if x.length else ():
        folded ^= chunk.value
    return folded


def lhl_extract(cfg: SeededExtCfg, x: BitString, y: BitString) -> BitString:
    if x.length != cfg.n:
        raise LengthMismatch(f"source has {x.length} bits, extractor expects {cfg.n}")
    if y.length != cfg.d:
        raise LengthMismatch(f"seed has {y.length} bits, extractor expects {cfg.d}")
    width = cfg.width
    ctx = wide_field_ctx(width)
    product = ctx.mul((y.value << 1) | 1, fold(x, width))
    return BitString(product >> (width - cfg.m), cfg.m)


def lhl_extract_table(cfg: SeededExtCfg, xs: np.ndarray, seeds: np.ndarray) -> np.ndarray:
    """
    Outputs for every (seed, source value) pair as a ``len(seeds) x len(xs)`` array.

    Only for unfolded sources in fields of width at most 32.
    """
    width = cfg.width
    if cfg.n > width:
        raise RangeError("vectorized evaluation needs an unfolded source")
    ctx = wide_field_ctx(width)
    padded = (np.asarray(seeds, dtype=np.uint64) << np.uint64(1)) | np.uint64(1)
    values = np.asarray(xs, dtype=np.uint64) << np.uint64(width - cfg.n)
    products = mul_array(ctx, padded[:, None], values[None, :])
    return products >> np.uint64(width - cfg.m)


def avg_case_wrap(cfg: SeededExtCfg, slack: int) -> SeededExtCfg:
    """
    The avg_case_wrap function restates a worst-case extractor as an average-case one.

    :param cfg: SeededExtCfg: A (k, eps) extractor
    :param slack: int: Extra entropy log(1/delta) demanded of the source
    :return: The (k + slack, eps + 2^-slack) average-case configuration
    """
    if slack < 1:
        raise RangeError(f"average-case slack must be at least 1, got {slack}")
    bound = None if cfg.bound is None else cfg.bound + ErrorBound.power(-slack)
    return replace(cfg, k=cfg.k + slack, bound=bound, average_case=True)
