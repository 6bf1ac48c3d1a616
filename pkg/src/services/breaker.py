"""
Correlation breakers: the one-bit flip-flop and the correlation breaker with
advice (AdvCB).

AdvCB(x, y, alpha) for d-bit x, y and a-bit advice:

1. Z = IP(x[:0.3d], y[:0.3d]); look-ahead on (y, Z) gives R_0..R_2l and on
   (x, Z) gives S_0..S_l, all 3s bits.
2. Row i of the first matrix is flip_flop(S_0, R_0, alpha_i), s bits.
3. Round j merges rows pairwise with R_{2j-1}, re-extracts from R_2j and
   restores the width from S_j.
4. The surviving row seeds Ext_w on y, and Ext'' on x gives d/10 bits.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction

from src.services.bitcore import BitString
from src.services.errors import LengthMismatch, PlanViolation
from src.services.laext import AltExtCfg, la_ext, nipm, nipm_cfg
from src.services.planner import AdvCBWidths
from src.services.seeded import SeededExtCfg, lhl_extract
from src.services.twosource import IPCfg, ip_extract

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FlipFlopCfg:
    n: int
    d: int
    k: int
    look: AltExtCfg
    ext_y: SeededExtCfg
    ext_out: SeededExtCfg

    @classmethod
    def create(cls, n: int, d: int, k: int) -> FlipFlopCfg:
        """
        The create function lays out a flip-flop on n-bit x and d-bit y.

        y splits into halves y1, y2; both phases run two look-ahead steps with
        x as the Wendy source and messages of f = max(1, d // 4) bits.

        :param n: int: Source length
        :param d: int: Seed length
        :param k: int: Design entropy; the output has floor(0.4k) bits
        :return: The configuration
        """
        y1 = d // 2
        f = max(1, d // 4)
        if y1 < f or 2 * k // 5 < 1:
            raise PlanViolation(f"flip-flop too small: n={n} d={d} k={k}")
        look = AltExtCfg.create(2, n, y1, f, f)
        return cls(n, d, k, look, SeededExtCfg.create(d - y1, f, y1), SeededExtCfg.create(n, f, 2 * k // 5))

    @property
    def y1(self) -> int:
        return self.d // 2

    @property
    def out(self) -> int:
        return self.ext_out.m


def flip_flop(cfg: FlipFlopCfg, x: BitString, y: BitString, b: int) -> BitString:
    if x.length != cfg.n or y.length != cfg.d:
        raise LengthMismatch(f"flip-flop expects {cfg.n} and {cfg.d} bits, got {x.length} and {y.length}")
    y1, y2 = y.prefix(cfg.y1), y.slice(cfg.y1, cfg.d - cfg.y1)
    first = la_ext(cfg.look, x, y1, y1.prefix(cfg.look.s))[b]
    refreshed = lhl_extract(cfg.ext_y, y2, first)
    second = la_ext(cfg.look, x, refreshed, refreshed.prefix(cfg.look.s))[1 - b]
    return lhl_extract(cfg.ext_out, x, second)


@dataclass(frozen=True)
class AdvCBCfg:
    widths: AdvCBWidths
    ip: IPCfg
    look_y: AltExtCfg
    look_x: AltExtCfg
    flip: FlipFlopCfg
    merge: AltExtCfg
    ext: SeededExtCfg
    ext_prime: SeededExtCfg
    ext_w: SeededExtCfg
    ext_out: SeededExtCfg
    eps_prime: Fraction | None = None

    @classmethod
    def create(cls, d: int, a: int, s: int, eps_prime: Fraction | None = None) -> AdvCBCfg:
        widths = AdvCBWidths(d, a, s)
        if widths.z < s or widths.r < 1 or widths.out < 1 or a < 1:
            raise PlanViolation(f"correlation breaker widths d={d} a={a} s={s} are not laid out")
        ell, h, z, r = widths.ell, widths.h, widths.z, widths.r
        return cls(
            widths=widths,
            ip=IPCfg.create(h, z),
            look_y=AltExtCfg.create(2 * ell + 1, d, z, s, 3 * s),
            look_x=AltExtCfg.create(ell + 1, d, z, s, 3 * s),
            flip=FlipFlopCfg.create(3 * s, 3 * s, widths.ff_k),
            merge=nipm_cfg(s, 3 * s, r),
            ext=SeededExtCfg.create(3 * s, r, r),
            ext_prime=SeededExtCfg.create(3 * s, r, s),
            ext_w=SeededExtCfg.create(d, s, 3 * s),
            ext_out=SeededExtCfg.create(d, 3 * s, widths.out),
            eps_prime=eps_prime,
        )

    @classmethod
    def from_symbols(cls, symbols: dict[str, int], prefix: str = "cb_") -> AdvCBCfg:
        widths = AdvCBWidths.from_symbols(symbols, prefix)
        return cls.create(widths.d, widths.a, widths.s)

    @property
    def d(self) -> int:
        return self.widths.d

    @property
    def a(self) -> int:
        return self.widths.a

    @property
    def out(self) -> int:
        return self.widths.out


def _check_shape(rows: list[BitString], count: int, width: int, round_no: int) -> None:
    if len(rows) != count or any(row.length != width for row in rows):
        raise PlanViolation(f"round {round_no}: expected {count} rows of {width} bits, "
                            f"got {[row.length for row in rows]}")


def _merge_round(cfg: AdvCBCfg, rows: list[BitString], r_merge: BitString, r_refresh: BitString,
                 s_restore: BitString) -> list[BitString]:
    """One merge round; reads the Y side only through the two R blocks it is given."""
    merged = []
    for i in range(0, len(rows), 2):
        v_bar = nipm(cfg.merge, rows[i:i + 2], r_merge)
        v_tilde = lhl_extract(cfg.ext, r_refresh, v_bar)
        merged.append(lhl_extract(cfg.ext_prime, s_restore, v_tilde))
    return merged


def adv_cb(cfg: AdvCBCfg, x: BitString, y: BitString, alpha: BitString, *, control: bool = False) -> BitString:
    """
    The adv_cb function breaks the correlation between calls with distinct advice.

    :param cfg: AdvCBCfg: Widths and sub-extractors
    :param x: BitString: First source, d bits
    :param y: BitString: Second source, d bits
    :param alpha: BitString: Advice, a bits
    :param control: bool: Ignore the advice (broken control for regression suites)
    :return: floor(d/10) output bits
    """
    w = cfg.widths
    if x.length != w.d or y.length != w.d:
        raise LengthMismatch(f"correlation breaker expects {w.d}-bit sources, got {x.length} and {y.length}")
    if alpha.length != w.a:
        raise LengthMismatch(f"advice has {alpha.length} bits, expected {w.a}")
    if control:
        alpha = BitString.zeros(w.a)
    advice = alpha.pad_to(w.a_pad)

    z = ip_extract(cfg.ip, x.prefix(w.h), y.prefix(w.h))
    rs = la_ext(cfg.look_y, y, z, z.prefix(w.s))
    ss = la_ext(cfg.look_x, x, z, z.prefix(w.s))

    rows = [flip_flop(cfg.flip, ss[0], rs[0], bit) for bit in advice]
    _check_shape(rows, w.a_pad, w.s, 0)
    for j in range(1, w.ell + 1):
        rows = _merge_round(cfg, rows, rs[2 * j - 1], rs[2 * j], ss[j])
        _check_shape(rows, w.a_pad >> j, w.s, j)
        logger.debug(f"round {j}: {len(rows)} rows")
    return lhl_extract(cfg.ext_out, x, lhl_extract(cfg.ext_w, y, rows[0]))
