"""
Alternating extraction between a Quentin source Q and a Wendy source W, the
look-ahead extractor built on it, and the independence-preserving merger.

The transcript is S_1, R_1 = Ext_w(W, S_1), S_2 = Ext_q(Q, R_1), R_2 = ... where
S_i are ``s`` bits (the seeds of Ext_w) and R_i are ``r`` bits (the seeds of
Ext_q).
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from src.services.bitcore import BitString
from src.services.errors import PlanViolation, RangeError, RowLengthMismatch
from src.services.seeded import SeededExtCfg, lhl_extract

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class AltExtCfg:
    steps: int
    ext_w: SeededExtCfg
    ext_q: SeededExtCfg
    eps: Fraction | None = None
    c: float = 1.0

    def __post_init__(self):
        if self.steps < 1:
            raise PlanViolation(f"alternating extraction needs at least one step, got {self.steps}")
        if self.ext_w.d != self.ext_q.m:
            raise PlanViolation(f"Ext_w seed {self.ext_w.d} bits but Ext_q outputs {self.ext_q.m}")
        if self.ext_q.d != self.ext_w.m:
            raise PlanViolation(f"Ext_q seed {self.ext_q.d} bits but Ext_w outputs {self.ext_w.m}")

    @classmethod
    def create(cls, steps: int, w_len: int, q_len: int, s: int, r: int, **kwargs) -> AltExtCfg:
        """
        The create function wires the two extractors of a protocol.

        :param steps: int: Number of Wendy outputs
        :param w_len: int: Length of W
        :param q_len: int: Length of Q
        :param s: int: Width of the S messages
        :param r: int: Width of the R messages
        :return: The configuration
        """
        return cls(steps, SeededExtCfg.create(w_len, s, r), SeededExtCfg.create(q_len, r, s), **kwargs)

    @property
    def s(self) -> int:
        return self.ext_w.d

    @property
    def r(self) -> int:
        return self.ext_w.m


def la_transcript(cfg: AltExtCfg, w: BitString, q: BitString, s1: BitString) -> tuple[list[BitString], list[BitString]]:
    """Both sides of the protocol: ``([S_1..S_l], [R_1..R_l])``."""
    if s1.length != cfg.s:
        raise RangeError(f"first message has {s1.length} bits, protocol expects {cfg.s}")
    ss, rs = [s1], []
    for i in range(cfg.steps):
        rs.append(lhl_extract(cfg.ext_w, w, ss[-1]))
        if i + 1 < cfg.steps:
            ss.append(lhl_extract(cfg.ext_q, q, rs[-1]))
    return ss, rs


def la_ext(cfg: AltExtCfg, w: BitString, q: BitString, s1: BitString) -> list[BitString]:
    return la_transcript(cfg, w, q, s1)[1]


def la_ext_prefix(cfg: AltExtCfg, w: BitString, q: BitString) -> list[BitString]:
    """Look-ahead extraction with S_1 taken as the prefix of Q."""
    return la_ext(cfg, w, q, q.prefix(cfg.s))


def nipm_cfg(row_len: int, y_len: int, rho: int | None = None, *, eps: Fraction | None = None,
             c: float = 1.0) -> AltExtCfg:
    """Merger for rows of ``row_len`` bits: output floor(0.2 row_len), Wendy messages ``rho`` bits."""
    m1 = row_len // 5
    if m1 < 1:
        raise PlanViolation(f"rows of {row_len} bits leave no merger output")
    return AltExtCfg.create(1, y_len, row_len, m1, rho or m1, eps=eps, c=c)


def _check_guarantee(cfg: AltExtCfg, rows: int, m: int, d: int) -> None:
    if cfg.eps is None:
        return
    log_inv = math.log2(cfg.eps.denominator) - math.log2(cfg.eps.numerator)
    if m < 4 * cfg.c * rows * (math.log2(d) + log_inv):
        raise PlanViolation("merger rows too short: m >= 4cL*log2(d/eps) fails")
    if d < 4 * cfg.c * rows * (math.log2(m) + log_inv):
        raise PlanViolation("merger seed too short: d >= 4cL*log2(m/eps) fails")


def nipm(cfg: AltExtCfg, rows: Sequence[BitString], y: BitString) -> BitString:
    """
    The nipm function merges a matrix into a single row of floor(0.2m) bits.

    :param cfg: AltExtCfg: Extractors with Ext_w on y and Ext_q on a row
    :param rows: Sequence[BitString]: The L rows, all of length m
    :param y: BitString: The independent Wendy source
    :return: The last Quentin message S_L
    """
    if not rows:
        raise RowLengthMismatch("nothing to merge")
    m = rows[0].length
    if any(row.length != m for row in rows):
        raise RowLengthMismatch(f"rows of lengths {[row.length for row in rows]}")
    if cfg.s != m // 5:
        raise PlanViolation(f"merger width {cfg.s} but rows of {m} bits give {m // 5}")
    _check_guarantee(cfg, len(rows), m, y.length)
    s = rows[0].prefix(cfg.s)
    for row in rows[1:]:
        r = lhl_extract(cfg.ext_w, y, s)
        s = lhl_extract(cfg.ext_q, row, r)
    return s


def concat_merge(rows: Sequence[BitString], width: int) -> BitString:
    """Control merger: the first ``width`` bits of the concatenated rows."""
    joined = BitString.zeros(0)
    for row in rows:
        joined = joined.concat(row)
    return joined.prefix(width)
