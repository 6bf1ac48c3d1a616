"""
Non-malleable two-source extractor.

Each n-bit source splits as X = X1 | X2 with X2 = X3 | X4 | X5. Z = IP(X1, Y1)
selects ``count`` distinct symbols of the Reed-Solomon encodings of X2 and Y2
read backwards; the advice X1 Y1 X~2 Y~2 drives the correlation breaker on
(X3, Y3), whose output seeds the invertible extractor on Y4.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

from src.schemas.plans import ParamPlan
from src.services.bitcore import BitString, concat
from src.services.breaker import AdvCBCfg, adv_cb
from src.services.errors import CountExceedsUniverse, InsufficientSeed, LengthMismatch, PlanViolation, RangeError
from src.services.gfield import FieldCtx, FieldElement, field_ctx
from src.services.iext import IExtCfg, iext_extract
from src.services.twosource import IPCfg, ip_extract

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RSCode:
    field: FieldCtx
    n0: int
    n: int

    def __post_init__(self):
        if not 1 <= self.n0 <= self.n <= self.field.order:
            raise RangeError(f"Reed-Solomon code [{self.n}, {self.n0}] over GF(2^{self.field.w})")

    @property
    def distance(self) -> int:
        return self.n - self.n0 + 1


def rs_evaluate(code: RSCode, coeffs: Sequence[int], positions: Sequence[int]) -> list[int]:
    """Codeword symbols at the given positions; position p is evaluated at the element p."""
    if len(coeffs) != code.n0:
        raise LengthMismatch(f"message has {len(coeffs)} symbols, code expects {code.n0}")
    symbols = []
    for p in positions:
        acc = 0
        for c in reversed(coeffs):
            acc = code.field.mul(acc, p) ^ c
        symbols.append(acc)
    return symbols


def rs_encode(code: RSCode, msg: Sequence[FieldElement]) -> list[FieldElement]:
    """
    The rs_encode function evaluates the message polynomial at every code point.

    :param code: RSCode: The code
    :param msg: Sequence[FieldElement]: Coefficients, constant term first
    :return: The n codeword symbols
    """
    values = rs_evaluate(code, [m.value for m in msg], range(code.n))
    return [FieldElement(code.field, v) for v in values]


def symbols_of(bits: BitString, w: int) -> list[int]:
    """MSB-first w-bit symbols of a string, the last one zero-padded."""
    return [chunk.value for chunk in bits.chunks(w)] if bits.length else []


def sample_positions(z: BitString, n: int, count: int, w: int, *, strict: bool = False) -> list[int]:
    """
    The sample_positions function reads distinct positions of [n] from w-bit chunks of z.

    Chunks are reduced mod n and repeats are skipped. When z runs out, strict mode
    raises; probing mode takes the next unused positions after the last candidate.

    :param z: BitString: Sampling string, at least count * w bits
    :param n: int: Codeword length
    :param count: int: Number of positions
    :param w: int: Chunk width
    :param strict: bool: Fail instead of probing
    :return: Positions in selection order
    """
    if count > n:
        raise CountExceedsUniverse(f"cannot pick {count} distinct symbols out of {n}")
    if z.length < count * w:
        raise InsufficientSeed(f"{z.length} sampling bits for {count} symbols of {w} bits")
    picked: list[int] = []
    seen: set[int] = set()
    candidate = -1
    for i in range(z.length // w):
        if len(picked) == count:
            break
        candidate = z.slice(i * w, w).value % n
        if candidate not in seen:
            seen.add(candidate)
            picked.append(candidate)
    if len(picked) < count:
        if strict:
            raise InsufficientSeed(f"sampling string exhausted after {len(picked)} of {count} symbols")
        while len(picked) < count:
            candidate = (candidate + 1) % n
            if candidate not in seen:
                seen.add(candidate)
                picked.append(candidate)
    return picked


def sample_symbols(z: BitString, codeword: Sequence[FieldElement], count: int, *, strict: bool = False) -> BitString:
    if not codeword:
        raise RangeError("empty codeword")
    w = codeword[0].ctx.w
    positions = sample_positions(z, len(codeword), count, w, strict=strict)
    return concat(*(codeword[p].bits for p in positions))


@dataclass(frozen=True)
class Slices:
    first: BitString
    second: BitString
    third: BitString
    fourth: BitString
    fifth: BitString


@dataclass(frozen=True)
class Nm2Cfg:
    n: int
    w: int
    n1: int
    n3: int
    n4: int
    n5: int
    r: int
    count: int
    code: RSCode
    ip: IPCfg
    cb: AdvCBCfg
    iext: IExtCfg

    @classmethod
    def from_plan(cls, plan: ParamPlan) -> Nm2Cfg:
        if plan.profile != "two-source-nm":
            raise PlanViolation(f"a {plan.profile} plan does not describe a two-source extractor")
        return cls.from_symbols(plan.symbols)

    @classmethod
    def from_symbols(cls, symbols: dict[str, int]) -> Nm2Cfg:
        n, w = symbols["n"], symbols["w"]
        n1, n3, n4, n5, r = (symbols[key] for key in ("n1", "n3", "n4", "n5", "r"))
        if n1 + n3 + n4 + n5 != n:
            raise PlanViolation(f"slices {n1}+{n3}+{n4}+{n5} do not partition {n} bits")
        if (n3 + n4 + n5) % w or n5 % w or r % w:
            raise PlanViolation(f"slice lengths are not multiples of the symbol width {w}")
        cb = AdvCBCfg.from_symbols(symbols)
        iext = IExtCfg.create(n4, symbols["ie_d"])
        if cb.d != n3 or cb.a != 2 * n1 + 2 * r or cb.out != iext.d:
            raise PlanViolation("correlation breaker does not match the slice layout")
        code = RSCode(field_ctx(w), (n3 + n4 + n5) // w, n)
        return cls(n, w, n1, n3, n4, n5, r, r // w, code, IPCfg.create(n1, r), cb, iext)

    @property
    def n2(self) -> int:
        return self.n - self.n1

    @property
    def t_var(self) -> int:
        return self.n5 // self.w

    @property
    def out(self) -> int:
        return self.iext.out


def split(cfg: Nm2Cfg, x: BitString) -> Slices:
    if x.length != cfg.n:
        raise LengthMismatch(f"source has {x.length} bits, expected {cfg.n}")
    second = x.suffix(cfg.n2)
    return Slices(x.prefix(cfg.n1), second, second.prefix(cfg.n3),
                  second.slice(cfg.n3, cfg.n4), second.suffix(cfg.n5))


def sampled_symbols(cfg: Nm2Cfg, second: BitString, positions: Sequence[int]) -> BitString:
    """Selected symbols of the encoding of X2 written backwards."""
    values = rs_evaluate(cfg.code, symbols_of(second.reverse(), cfg.w), positions)
    return concat(*(BitString(v, cfg.w) for v in values))


def advice(cfg: Nm2Cfg, xs: Slices, ys: Slices) -> BitString:
    z = ip_extract(cfg.ip, xs.first, ys.first)
    positions = sample_positions(z, cfg.n, cfg.count, cfg.w)
    return concat(xs.first, ys.first, sampled_symbols(cfg, xs.second, positions),
                  sampled_symbols(cfg, ys.second, positions))


def nm2_extract(cfg: Nm2Cfg, x: BitString, y: BitString, *, control: bool = False) -> BitString:
    """
    The nm2_extract function evaluates the two-source extractor.

    :param cfg: Nm2Cfg: Slice layout and sub-configurations
    :param x: BitString: Left source, n bits
    :param y: BitString: Right source, n bits
    :param control: bool: Zero the advice (broken control)
    :return: IExt output bits
    """
    xs, ys = split(cfg, x), split(cfg, y)
    alpha = advice(cfg, xs, ys)
    v = adv_cb(cfg.cb, xs.third, ys.third, alpha, control=control)
    return iext_extract(cfg.iext, ys.fourth, v)
