"""Advice generator and the seeded non-malleable extractor built on the correlation breaker."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass

from src.schemas.plans import ParamPlan
from src.services.bitcore import BitString, concat
from src.services.breaker import AdvCBCfg, adv_cb
from src.services.errors import LengthMismatch, PlanViolation
from src.services.gfield import field_ctx
from src.services.nm2ext import RSCode, rs_evaluate, sample_positions, symbols_of
from src.services.planner import ceil_log2
from src.services.seeded import SeededExtCfg, lhl_extract

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class AdvGenCfg:
    n: int
    d: int
    d1: int
    d3: int
    w: int
    count: int
    code: RSCode
    ext_prime: SeededExtCfg

    @classmethod
    def create(cls, n: int, d: int, d1: int, d3: int) -> AdvGenCfg:
        """
        The create function sizes the advice generator.

        Y2 samples ``ceil(d3 / w)`` symbols of a Reed-Solomon encoding of y over
        GF(2^w), w = ceil(log2 d), evaluated on all 2^w points.

        :param n: int: Source length
        :param d: int: Seed length
        :param d1: int: Length of the seed prefix Y1
        :param d3: int: Length of Y2
        :return: The configuration
        """
        w = max(1, ceil_log2(d))
        n0 = math.ceil(d / w)
        count = math.ceil(d3 / w)
        if d1 > d or count * w > d or n0 > (1 << w) or d3 < 1:
            raise PlanViolation(f"advice generator n={n} d={d} d1={d1} d3={d3} is not laid out")
        return cls(n, d, d1, d3, w, count, RSCode(field_ctx(w), n0, 1 << w), SeededExtCfg.create(n, d1, d))

    @property
    def a(self) -> int:
        return self.d1 + self.d3


def seed_advice(cfg: AdvGenCfg, y: BitString, z: BitString) -> BitString:
    """Y1 | g(y, Z1): the seed prefix and the Z1-selected symbols of the encoded seed."""
    if y.length != cfg.d:
        raise LengthMismatch(f"seed has {y.length} bits, expected {cfg.d}")
    positions = sample_positions(z.prefix(cfg.count * cfg.w), cfg.code.n, cfg.count, cfg.w)
    picked = rs_evaluate(cfg.code, symbols_of(y, cfg.w), positions)
    y2 = concat(*(BitString(v, cfg.w) for v in picked)).prefix(cfg.d3)
    return y.prefix(cfg.d1).concat(y2)


def adv_gen(cfg: AdvGenCfg, x: BitString, y: BitString) -> tuple[BitString, BitString]:
    """Advice Y1 | Y2 of d1 + d3 bits and the extracted string Z = Ext'(x, Y1)."""
    if y.length != cfg.d:
        raise LengthMismatch(f"seed has {y.length} bits, expected {cfg.d}")
    z = lhl_extract(cfg.ext_prime, x, y.prefix(cfg.d1))
    return seed_advice(cfg, y, z), z


@dataclass(frozen=True)
class SnmCfg:
    n: int
    k: int
    d: int
    gen: AdvGenCfg
    cb: AdvCBCfg
    ext: SeededExtCfg

    @classmethod
    def from_plan(cls, plan: ParamPlan) -> SnmCfg:
        if plan.profile != "seeded-nm":
            raise PlanViolation(f"a {plan.profile} plan does not describe a seeded extractor")
        return cls.create(plan.symbols)

    @classmethod
    def create(cls, symbols: dict[str, int]) -> SnmCfg:
        n, k, d = symbols["n"], symbols["k"], symbols["d"]
        gen = AdvGenCfg.create(n, d, symbols["d1"], symbols["d3"])
        cb = AdvCBCfg.from_symbols(symbols)
        if cb.d != d or cb.a != gen.a:
            raise PlanViolation(f"correlation breaker ({cb.d}, {cb.a}) does not match seed {d} and advice {gen.a}")
        if k // 4 < 1:
            raise PlanViolation(f"entropy {k} leaves no output")
        return cls(n, k, d, gen, cb, SeededExtCfg.create(n, cb.out, k // 4, k))

    @property
    def out(self) -> int:
        return self.ext.m


def snm_extract(cfg: SnmCfg, x: BitString, y: BitString, *, control: bool = False) -> BitString:
    """
    The snm_extract function evaluates the seeded non-malleable extractor.

    :param cfg: SnmCfg: Plan-derived configuration
    :param x: BitString: Source, n bits
    :param y: BitString: Seed, d bits
    :param control: bool: Replace the correlation breaker by a prefix of Z (broken control)
    :return: floor(k/4) bits
    """
    if x.length != cfg.n:
        raise LengthMismatch(f"source has {x.length} bits, expected {cfg.n}")
    alpha, z = adv_gen(cfg.gen, x, y)
    if control:
        v = z.prefix(cfg.cb.out)
    else:
        v = adv_cb(cfg.cb, y, z, alpha)
    return lhl_extract(cfg.ext, x, v)
