"""Inner-product two-source extractor over GF(2^m) blocks."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from src.services.bitcore import BitString
from src.services.distrib import ErrorBound
from src.services.errors import LengthMismatch, RangeError
from src.services.gfield import FieldCtx, mul_array, wide_field_ctx


@dataclass(frozen=True)
class IPCfg:
    n: int
    m: int
    padded: int
    ctx: FieldCtx

    @classmethod
    def create(cls, n: int, m: int) -> IPCfg:
        if n < 1 or m < 1:
            raise RangeError(f"inner product shape n={n} m={m}")
        padded = -(-n // m) * m
        return cls(n, m, padded, wide_field_ctx(m))

    @property
    def blocks(self) -> int:
        return self.padded // self.m

    def bound(self, k1: int, k2: int) -> ErrorBound:
        """Error 2^-(k1 + k2 - n - m - 1)/2 against either source, n the padded length."""
        return ErrorBound.power(-Fraction(k1 + k2 - self.padded - self.m - 1, 2))


def _blocks(cfg: IPCfg, x: BitString) -> list[int]:
    return [chunk.value for chunk in x.pad_to(cfg.padded).chunks(cfg.m)]


def ip_extract(cfg: IPCfg, x: BitString, y: BitString) -> BitString:
    if x.length != cfg.n or y.length != cfg.n:
        raise LengthMismatch(f"inner product of {x.length} and {y.length} bits, expected {cfg.n}")
    total = 0
    for a, b in zip(_blocks(cfg, x), _blocks(cfg, y)):
        total ^= cfg.ctx.mul(a, b)
    return BitString(total, cfg.m)


def ip_table(cfg: IPCfg, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """Outputs for every (x, y) pair of integer-encoded inputs, shape ``len(xs) x len(ys)``."""
    xs = np.asarray(xs, dtype=np.uint64) << np.uint64(cfg.padded - cfg.n)
    ys = np.asarray(ys, dtype=np.uint64) << np.uint64(cfg.padded - cfg.n)
    mask = np.uint64((1 << cfg.m) - 1)
    result = np.zeros((len(xs), len(ys)), dtype=np.uint64)
    for j in range(cfg.blocks):
        shift = np.uint64(cfg.padded - (j + 1) * cfg.m)
        result ^= mul_array(cfg.ctx, ((xs >> shift) & mask)[:, None], ((ys >> shift) & mask)[None, :])
    return result
