"""
Invertible linear seeded extractor.

The seed splits into R1 (floor(0.1d) bits) and R2. R1 picks t = d - r1 + 1
distinct source positions, R2 padded with a trailing 1 is a nonzero element of
GF(2^t), and the output is the low floor(0.3d) bits of R2' times the sampled
bits. For a fixed seed the map is linear of full rank, so every fiber has
exactly 2^(n - out) points and can be sampled uniformly.
"""
from __future__ import annotations

import hashlib
import logging
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from src.services.bitcore import BitString, all_strings, random_int
from src.services.errors import CountExceedsUniverse, LengthMismatch, PlanViolation
from src.services.gfield import FieldCtx, wide_field_ctx

logger = logging.getLogger(__name__)

FEISTEL_ROUNDS = 4


@dataclass(frozen=True)
class IExtCfg:
    n: int
    d: int
    r1: int
    t: int
    out: int
    ctx: FieldCtx

    @classmethod
    def create(cls, n: int, d: int) -> IExtCfg:
        r1 = d // 10
        t = d - r1 + 1
        out = 3 * d // 10
        if r1 < 1 or out < 1 or t > n:
            raise PlanViolation(f"invertible extractor n={n} d={d}: r1={r1} t={t} out={out}")
        return cls(n, d, r1, t, out, wide_field_ctx(t))

    @classmethod
    def from_symbols(cls, symbols: dict[str, int]) -> IExtCfg:
        return cls.create(symbols["n4"], symbols["ie_d"])


def _round_value(key: bytes, round_no: int, half: int, bits: int) -> int:
    digest = hashlib.blake2b(half.to_bytes(8, "big"), key=key, digest_size=8,
                             person=round_no.to_bytes(1, "big") * 16).digest()
    return int.from_bytes(digest, "big") & ((1 << bits) - 1)


def _permute(key: bytes, value: int, half_bits: int) -> int:
    mask = (1 << half_bits) - 1
    left, right = value >> half_bits, value & mask
    for round_no in range(FEISTEL_ROUNDS):
        left, right = right, left ^ _round_value(key, round_no, right, half_bits)
    return (left << half_bits) | right


@lru_cache(maxsize=4096)
def _positions(seed_value: int, seed_length: int, n: int, t: int) -> tuple[int, ...]:
    key = hashlib.blake2b(BitString(seed_value, seed_length).to_bytes(), digest_size=32).digest()
    half_bits = max(1, -(-max(1, (n - 1).bit_length()) // 2))
    picked = []
    for i in range(t):
        value = _permute(key, i, half_bits)
        while value >= n:
            value = _permute(key, value, half_bits)
        picked.append(value)
    return tuple(sorted(picked))


def sample_distinct(seed: BitString, n: int, t: int) -> list[int]:
    """
    The sample_distinct function picks t distinct positions of [n] from a seed.

    A keyed Feistel permutation of [2^b] restricted to [n] by cycle walking is
    applied to 0..t-1; the result is sorted.

    :param seed: BitString: Sampler seed
    :param n: int: Universe size
    :param t: int: Number of positions
    :return: Sorted distinct positions
    """
    if t > n:
        raise CountExceedsUniverse(f"cannot pick {t} distinct positions out of {n}")
    if t == n:
        return list(range(n))
    return list(_positions(seed.value, seed.length, n, t))


def _split_seed(cfg: IExtCfg, rseed: BitString) -> tuple[list[int], int]:
    if rseed.length != cfg.d:
        raise LengthMismatch(f"seed has {rseed.length} bits, expected {cfg.d}")
    positions = sample_distinct(rseed.prefix(cfg.r1), cfg.n, cfg.t)
    multiplier = (rseed.suffix(cfg.d - cfg.r1).value << 1) | 1
    return positions, multiplier


def _gather(x: BitString, positions: list[int]) -> int:
    value = 0
    for pos in positions:
        value = (value << 1) | x.bit(pos)
    return value


def iext_extract(cfg: IExtCfg, x: BitString, rseed: BitString) -> BitString:
    if x.length != cfg.n:
        raise LengthMismatch(f"source has {x.length} bits, expected {cfg.n}")
    positions, multiplier = _split_seed(cfg, rseed)
    product = cfg.ctx.mul(multiplier, _gather(x, positions))
    return BitString(product & ((1 << cfg.out) - 1), cfg.out)


def iext_invert(cfg: IExtCfg, s: BitString, rseed: BitString, rng: np.random.Generator) -> BitString:
    """
    The iext_invert function draws a uniform pre-image of ``s`` under a fixed seed.

    :param cfg: IExtCfg: Extractor shape
    :param s: BitString: Target output
    :param rseed: BitString: Fixed seed
    :param rng: np.random.Generator: Randomness
    :return: A source string x with iext_extract(x, rseed) == s
    """
    if s.length != cfg.out:
        raise LengthMismatch(f"target has {s.length} bits, expected {cfg.out}")
    positions, multiplier = _split_seed(cfg, rseed)
    product = (random_int(rng, cfg.t - cfg.out) << cfg.out) | s.value
    sampled = cfg.ctx.mul(product, cfg.ctx.inv(multiplier))
    value = random_int(rng, cfg.n)
    for idx, pos in enumerate(positions):
        shift = cfg.n - 1 - pos
        bit = (sampled >> (cfg.t - 1 - idx)) & 1
        value = (value & ~(1 << shift)) | (bit << shift)
    return BitString(value, cfg.n)


def iext_matrix(cfg: IExtCfg, rseed: BitString) -> np.ndarray:
    """The ``out x n`` GF(2) matrix of the seed-fixed map, column j the image of e_j."""
    columns = [iext_extract(cfg, BitString(1 << (cfg.n - 1 - j), cfg.n), rseed).to_array()
               for j in range(cfg.n)]
    return np.stack(columns, axis=1).astype(np.uint8)


@dataclass(frozen=True)
class SamplerAudit:
    n: int
    t: int
    seeds: int
    theta: float
    worst: float
    mean: float


def sampler_audit(n: int, t: int, r1: int, theta: float, functions: int, rng: np.random.Generator) -> SamplerAudit:
    """
    The sampler_audit function exhausts every sampler seed against random test functions.

    :param n: int: Universe size
    :param t: int: Sample size
    :param r1: int: Seed length
    :param theta: float: Allowed deviation of a sample mean
    :param functions: int: Number of random functions [n] -> [0, 1]
    :param rng: np.random.Generator: Source of the test functions
    :return: Worst and average fraction of seeds whose sample mean is off by more than theta
    """
    positions = np.array([sample_distinct(seed, n, t) for seed in all_strings(r1)], dtype=np.int64)
    values = rng.random((functions, n))
    means = values.mean(axis=1)
    sample_means = values[:, positions].mean(axis=2)
    bad = (np.abs(sample_means - means[:, None]) > theta).mean(axis=1)
    logger.info(f"sampler audit n={n} t={t}: worst {bad.max():.4f} over {positions.shape[0]} seeds")
    return SamplerAudit(n, t, positions.shape[0], theta, float(bad.max()), float(bad.mean()))
