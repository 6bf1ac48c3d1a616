"""
Compositions over a pluggable multi-source non-malleable extractor: the
iterated multi-source correlation breaker and the seeded extractor that is
non-malleable against t tamperings of the seed.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, Sequence

from src.schemas.plans import ParamPlan
from src.services.bitcore import BitString
from src.services.errors import LengthMismatch, PlanViolation
from src.services.gfield import wide_field_ctx
from src.services.nm2ext import Nm2Cfg, nm2_extract
from src.services.seeded import SeededExtCfg, lhl_extract
from src.services.snmext import AdvGenCfg, seed_advice
from src.services.twosource import IPCfg, ip_extract

logger = logging.getLogger(__name__)

TEN_SOURCES = 10


@dataclass(frozen=True)
class SSourceNmExt:
    name: str
    arity: int
    n: int
    m: int
    fn: Callable[[Sequence[BitString]], BitString]

    def __call__(self, xs: Sequence[BitString]) -> BitString:
        if len(xs) != self.arity:
            raise LengthMismatch(f"{self.name} takes {self.arity} sources, got {len(xs)}")
        if any(x.length != self.n for x in xs):
            raise LengthMismatch(f"{self.name} takes {self.n}-bit sources, got {[x.length for x in xs]}")
        return self.fn(xs)


def nm2_plugin(cfg: Nm2Cfg) -> SSourceNmExt:
    return SSourceNmExt("nm2", 2, cfg.n, cfg.out, lambda xs: nm2_extract(cfg, xs[0], xs[1]))


def product_plugin(arity: int, n: int, m: int) -> SSourceNmExt:
    """
    Generalized inner product: sum over m-bit blocks of the product of the sources' blocks in GF(2^m).

    Its non-malleability is not audited; it serves as a fast plug-in for shape tests.
    """
    ctx = wide_field_ctx(m)

    def fn(xs: Sequence[BitString]) -> BitString:
        total = 0
        for blocks in zip(*(x.chunks(m) for x in xs)):
            product = 1
            for block in blocks:
                product = ctx.mul(product, block.value)
            total ^= product
        return BitString(total, m)

    return SSourceNmExt(f"product-{arity}", arity, n, m, fn)


def ten_source_plugin(n: int, m: int) -> SSourceNmExt:
    def fn(xs: Sequence[BitString]) -> BitString:
        raise NotImplementedError("no ten-source non-malleable extractor is bundled")

    return SSourceNmExt("ten-source", TEN_SOURCES, n, m, fn)


@dataclass(frozen=True)
class MultiCfg:
    n: int
    k: int
    s: int
    t: int
    d: int
    d1: int
    d2: int
    d5: int
    a: int
    v_len: int
    m1: int
    zlen: int
    gen: AdvGenCfg
    ext_z: SeededExtCfg
    ip: IPCfg
    ext_y: SeededExtCfg
    ext_z1: SeededExtCfg
    refresh: SeededExtCfg
    leak_budget: int | None = None

    @classmethod
    def from_plan(cls, plan: ParamPlan) -> MultiCfg:
        if plan.profile != "multi":
            raise PlanViolation(f"a {plan.profile} plan does not describe the multi-source composition")
        sym = plan.symbols
        n, d, d1, d5, r_len, m1, zlen = (sym[key] for key in ("n", "d", "d1", "d5", "r_len", "m1", "zlen"))
        if sym["d5"] != 3 * (sym["t"] + 1) * sym["d4"]:
            raise PlanViolation("d5 must equal 3(t+1)d4")
        if sym["a"] + sym["v_len"] != sym["plugin_n"]:
            raise PlanViolation("plug-in input length must be slice plus advice")
        return cls(
            n=n, k=sym["k"], s=sym["s"], t=sym["t"], d=d, d1=d1, d2=sym["d2"], d5=d5, a=sym["a"],
            v_len=sym["v_len"], m1=m1, zlen=zlen,
            gen=AdvGenCfg.create(n, d, d1, sym["d3"]),
            ext_z=SeededExtCfg.create(n, d1, zlen, sym["k"]),
            ip=IPCfg.create(d5, r_len),
            ext_y=SeededExtCfg.create(d, r_len, m1),
            ext_z1=SeededExtCfg.create(zlen, r_len, m1),
            refresh=SeededExtCfg.create(m1, sym["plugin_m"], sym["v_len"]),
            leak_budget=m1 // 2 if plan.ledger == "strict" else None,
        )

    @property
    def plugin_n(self) -> int:
        return self.v_len + self.a


def _check_plugin(cfg: MultiCfg, ext: SSourceNmExt, arity: int) -> None:
    if ext.arity != arity or ext.n != cfg.plugin_n or ext.m != cfg.refresh.d:
        raise PlanViolation(f"plug-in {ext.name} ({ext.arity} x {ext.n} -> {ext.m}) does not fit "
                            f"({arity} x {cfg.plugin_n} -> {cfg.refresh.d})")


def multi_adv_cb(cfg: MultiCfg, ext: SSourceNmExt, xs: Sequence[BitString], alpha: BitString, *,
                 control: bool = False) -> BitString:
    """
    The multi_adv_cb function iterates the plug-in t times over slices of the sources.

    With a leak budget (strict plans) every round checks that the bits revealed
    about each source so far stay within it.

    :param cfg: MultiCfg: Plan-derived configuration
    :param ext: SSourceNmExt: The multi-source plug-in
    :param xs: Sequence[BitString]: Sources of m1 bits each
    :param alpha: BitString: Advice of a bits
    :param control: bool: Replace the advice by zeros (broken control)
    :return: The plug-in output of the last iteration
    """
    _check_plugin(cfg, ext, len(xs))
    if any(x.length != cfg.m1 for x in xs):
        raise LengthMismatch(f"sources must have {cfg.m1} bits, got {[x.length for x in xs]}")
    if alpha.length != cfg.a:
        raise LengthMismatch(f"advice has {alpha.length} bits, expected {cfg.a}")
    if control:
        alpha = BitString.zeros(cfg.a)
    slices = [x.prefix(cfg.v_len) for x in xs]
    revealed = 0
    r = BitString.zeros(0)
    for iteration in range(1, cfg.t + 1):
        # one slice per source for the original run and each of the t tampered runs
        revealed += (cfg.t + 1) * max(v.length for v in slices)
        if cfg.leak_budget is not None and revealed > cfg.leak_budget:
            raise PlanViolation(f"iteration {iteration} reveals {revealed} bits per source, "
                                f"budget {cfg.leak_budget}")
        logger.debug(f"iteration {iteration}: {revealed} bits revealed per source")
        r = ext([v.concat(alpha) for v in slices])
        if iteration < cfg.t:
            slices = [lhl_extract(cfg.refresh, x, r) for x in xs]
    return r


def seeded_tnm_extract(cfg: MultiCfg, ext: SSourceNmExt, xs: Sequence[BitString], y: BitString, *,
                       control: bool = False) -> BitString:
    """
    The seeded_tnm_extract function extracts from s independent sources with one seed.

    :param cfg: MultiCfg: Plan-derived configuration
    :param ext: SSourceNmExt: Plug-in of arity s + 1
    :param xs: Sequence[BitString]: The s sources of n bits
    :param y: BitString: Seed of d bits
    :param control: bool: Zero the advice (broken control)
    :return: The plug-in output length
    """
    if len(xs) != cfg.s:
        raise LengthMismatch(f"expected {cfg.s} sources, got {len(xs)}")
    if y.length != cfg.d:
        raise LengthMismatch(f"seed has {y.length} bits, expected {cfg.d}")
    y1 = y.prefix(cfg.d1)
    zs = [lhl_extract(cfg.ext_z, x, y1) for x in xs]
    alpha = BitString.zeros(cfg.a) if control else seed_advice(cfg.gen, y, zs[0])
    r = ip_extract(cfg.ip, y.slice(cfg.d1, cfg.d5), zs[0].slice(cfg.d2, cfg.d5))
    refreshed = [lhl_extract(cfg.ext_y, y, r), lhl_extract(cfg.ext_z1, zs[0], r)]
    refreshed.extend(z.prefix(cfg.m1) for z in zs[1:])
    return multi_adv_cb(cfg, ext, refreshed, alpha)
