"""
Split-state non-malleable code: the decoder is the two-source extractor on
the codeword halves, the encoder draws a uniform pre-image of the message.
"""
from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

import numpy as np

from src.schemas.plans import ParamPlan
from src.services.bitcore import BitString, concat, random_bits
from src.services.breaker import adv_cb
from src.services.distrib import JointDist, Tamperer
from src.services.errors import LengthMismatch, PlanInfeasible
from src.services.gfield import FieldElement, LinearSystem, solve_affine_uniform, vandermonde
from src.services.iext import iext_invert
from src.services.nm2ext import Nm2Cfg, nm2_extract, rs_evaluate, sample_positions, symbols_of
from src.services.twosource import ip_extract

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Codeword:
    left: BitString
    right: BitString

    def __post_init__(self):
        if self.left.length != self.right.length:
            raise LengthMismatch(f"codeword halves of {self.left.length} and {self.right.length} bits")

    @property
    def n(self) -> int:
        return self.left.length


@dataclass(frozen=True)
class CodecCfg:
    nm2: Nm2Cfg

    @classmethod
    def from_plan(cls, plan: ParamPlan) -> CodecCfg:
        return cls(Nm2Cfg.from_plan(plan))

    @property
    def n(self) -> int:
        return self.nm2.n

    @property
    def m(self) -> int:
        return self.nm2.out

    @property
    def rate(self) -> Fraction:
        return Fraction(self.m, 2 * self.n)

    @property
    def fiber_log2(self) -> int:
        """Every message has exactly 2^(2n - m) encodings."""
        return 2 * self.n - self.m


def eps_code(m: int, eps_ext: Fraction) -> Fraction:
    """Code error implied by an extractor error: 2^(m+1) * eps_ext."""
    return Fraction(2) ** (m + 1) * eps_ext


def decode(cfg: CodecCfg, c: Codeword, *, control: bool = False) -> BitString:
    if c.n != cfg.n:
        raise LengthMismatch(f"codeword halves have {c.n} bits, code expects {cfg.n}")
    return nm2_extract(cfg.nm2, c.left, c.right, control=control)


def _solve_tail(cfg: Nm2Cfg, third: BitString, fourth: BitString, positions: list[int], target: BitString,
                rng: np.random.Generator) -> tuple[BitString, int]:
    """
    Draw the last slice uniformly among those whose sampled symbols equal ``target``.

    Read backwards, the last slice supplies the low ``t_var`` coefficients of the
    Reed-Solomon message, so the constraints form a Vandermonde system in them.
    """
    ctx, w = cfg.code.field, cfg.w
    known = [0] * cfg.t_var + symbols_of(concat(fourth.reverse(), third.reverse()), w)
    fixed = rs_evaluate(cfg.code, known, positions)
    wanted = symbols_of(target, w)
    rhs = [FieldElement(ctx, a ^ b) for a, b in zip(wanted, fixed)]
    matrix = vandermonde(ctx, [FieldElement(ctx, p) for p in positions], cfg.t_var - 1)
    if matrix:
        coeffs, kernel = solve_affine_uniform(LinearSystem.build(matrix, rhs, cfg.t_var), rng)
    else:
        coeffs, kernel = solve_affine_uniform(LinearSystem.unconstrained(ctx, cfg.t_var), rng)
    low = concat(*(c.bits for c in coeffs))
    return low.reverse(), kernel * w


@dataclass(frozen=True)
class EncoderPrefix:
    """The message-independent part of an encoding: slices one to three and the advice."""
    x1: BitString
    y1: BitString
    x_tilde: BitString
    y_tilde: BitString
    x3: BitString
    y3: BitString
    positions: tuple[int, ...]
    v: BitString

    @property
    def bits(self) -> int:
        return 2 * (self.x1.length + self.x_tilde.length + self.x3.length)


def draw_prefix(cfg: CodecCfg, rng: np.random.Generator, *, control: bool = False) -> EncoderPrefix:
    nm = cfg.nm2
    if nm.t_var < nm.count:
        raise PlanInfeasible(f"{nm.count} sampling constraints but only {nm.t_var} free symbols")
    x1, y1 = random_bits(rng, nm.n1), random_bits(rng, nm.n1)
    x_tilde, y_tilde = random_bits(rng, nm.r), random_bits(rng, nm.r)
    x3, y3 = random_bits(rng, nm.n3), random_bits(rng, nm.n3)
    positions = sample_positions(ip_extract(nm.ip, x1, y1), nm.n, nm.count, nm.w)
    v = adv_cb(nm.cb, x3, y3, concat(x1, y1, x_tilde, y_tilde), control=control)
    return EncoderPrefix(x1, y1, x_tilde, y_tilde, x3, y3, tuple(positions), v)


def complete(cfg: CodecCfg, prefix: EncoderPrefix, msg: BitString,
             rng: np.random.Generator) -> tuple[Codeword, int]:
    """
    The complete function finishes an encoding of ``msg`` over a fixed prefix.

    Y4 is uniform on the pre-image of ``msg`` under the invertible extractor
    seeded by the advice, X4 is uniform, and the fifth slices are uniform among
    those whose sampled symbols reproduce the prefix's tilde strings.

    :param cfg: CodecCfg: The code
    :param prefix: EncoderPrefix: Output of draw_prefix
    :param msg: BitString: Message of m bits
    :param rng: np.random.Generator: Randomness
    :return: The codeword and the number of bits drawn after the prefix
    """
    nm = cfg.nm2
    if msg.length != cfg.m:
        raise LengthMismatch(f"message has {msg.length} bits, code expects {cfg.m}")
    positions = list(prefix.positions)
    y4 = iext_invert(nm.iext, msg, prefix.v, rng)
    x4 = random_bits(rng, nm.n4)
    y5, y_free = _solve_tail(nm, prefix.y3, y4, positions, prefix.y_tilde, rng)
    x5, x_free = _solve_tail(nm, prefix.x3, x4, positions, prefix.x_tilde, rng)
    left = concat(prefix.x1, prefix.x3, x4, x5)
    right = concat(prefix.y1, prefix.y3, y4, y5)
    return Codeword(left, right), (nm.n4 - cfg.m) + nm.n4 + y_free + x_free


def encode_traced(cfg: CodecCfg, msg: BitString, rng: np.random.Generator, *,
                  control: bool = False) -> tuple[Codeword, int]:
    """
    The encode_traced function draws a uniform codeword of ``msg`` and counts its free bits.

    :param cfg: CodecCfg: The code
    :param msg: BitString: Message of m bits
    :param rng: np.random.Generator: Randomness
    :param control: bool: Encode for the broken-control decoder
    :return: The codeword and the number of uniformly drawn bits, always 2n - m
    """
    if msg.length != cfg.m:
        raise LengthMismatch(f"message has {msg.length} bits, code expects {cfg.m}")
    prefix = draw_prefix(cfg, rng, control=control)
    codeword, free = complete(cfg, prefix, msg, rng)
    return codeword, prefix.bits + free


def encode(cfg: CodecCfg, msg: BitString, rng: np.random.Generator, *, control: bool = False) -> Codeword:
    return encode_traced(cfg, msg, rng, control=control)[0]


def identity(n: int) -> Tamperer:
    return Tamperer("identity", n, lambda v: v, fixed_point_free=False)


def tamper_experiment(cfg: CodecCfg, msg: BitString, f: Tamperer, g: Tamperer, trials: int,
                      rng: np.random.Generator, *, control: bool = False) -> JointDist:
    """
    The tamper_experiment function decodes tampered encodings of one message.

    :param cfg: CodecCfg: The code
    :param msg: BitString: Encoded message
    :param f: Tamperer: Applied to the left half
    :param g: Tamperer: Applied to the right half
    :param trials: int: Number of encodings drawn
    :param rng: np.random.Generator: Randomness of the encoder
    :param control: bool: Use the broken-control codec
    :return: Empirical distribution of the decoded message
    """
    counts: Counter = Counter()
    for _ in range(trials):
        c = encode(cfg, msg, rng, control=control)
        counts[(decode(cfg, Codeword(f(c.left), g(c.right)), control=control),)] += 1
    return JointDist.from_counts(counts, 1)


def simulation_distances(histograms: Mapping[BitString, JointDist]) -> dict[BitString, Fraction]:
    """
    Per-message distance of tampered decodings from one message-independent simulator.

    The simulator puts mass min_s D_s(o) on each constant outcome o and the
    largest remaining common mass on "same message"; what is left is spread
    like the residual averaged over all messages.

    :param histograms: Mapping[BitString, JointDist]: Decoded distribution per message
    :return: The distance for every message; the code's error is their maximum
    """
    messages = list(histograms)
    outcomes = {o[0] for dist in histograms.values() for o in dist.probs} | set(messages)
    constant = {o: min(histograms[s][(o,)] for s in messages) for o in outcomes}
    same = min(histograms[s][(s,)] - constant[s] for s in messages)
    residual = {s: {o: histograms[s][(o,)] - constant[o] - (same if o == s else 0) for o in outcomes}
                for s in messages}
    average = {o: sum((residual[s][o] for s in messages), Fraction(0)) / len(messages) for o in outcomes}
    return {s: sum((abs(residual[s][o] - average[o]) for o in outcomes), Fraction(0)) / 2 for s in messages}


def simulation_distance(histograms: Mapping[BitString, JointDist]) -> Fraction:
    return max(simulation_distances(histograms).values())
