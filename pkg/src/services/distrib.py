"""
Exact probability machinery: flat sources, tampering functions, joint
distributions with rational probabilities, statistical distance and the
exhaustive evaluation oracle used by every verification suite.
"""
from __future__ import annotations

import hashlib
import itertools
import logging
import math
from collections import Counter, defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Hashable, Iterable, Mapping, Sequence

import numpy as np

from src.conf.config import config
from src.services.bitcore import BitString, random_int
from src.services.errors import ExplosionGuard, FixedPointFound, RangeError, SpaceMismatch

logger = logging.getLogger(__name__)

Outcome = tuple[Hashable, ...]


@dataclass(frozen=True)
class ErrorBound:
    """
    A sum of terms ``2**e`` with ``e`` an integer or half-integer.

    Comparisons against rational distances are exact: the sum is A + B*sqrt(2)
    with rational A and B.
    """
    exponents: tuple[Fraction, ...] = ()

    def __post_init__(self):
        for e in self.exponents:
            if Fraction(e).denominator not in (1, 2):
                raise RangeError(f"exponent {e} is not a half-integer")

    @classmethod
    def power(cls, exponent: Fraction | int) -> ErrorBound:
        return cls((Fraction(exponent),))

    def __add__(self, other: ErrorBound) -> ErrorBound:
        return ErrorBound(self.exponents + other.exponents)

    def scaled(self, shift: int) -> ErrorBound:
        """Multiply the bound by ``2**shift``."""
        return ErrorBound(tuple(e + shift for e in self.exponents))

    def _parts(self) -> tuple[Fraction, Fraction]:
        rational, radical = Fraction(0), Fraction(0)
        for e in map(Fraction, self.exponents):
            if e.denominator == 1:
                rational += Fraction(2) ** int(e)
            else:
                radical += Fraction(2) ** int(math.floor(e))
        return rational, radical

    def holds(self, sd: Fraction) -> bool:
        rational, radical = self._parts()
        gap = Fraction(sd) - rational
        if gap <= 0:
            return True
        return gap * gap <= 2 * radical * radical

    def __float__(self) -> float:
        return float(sum(2.0 ** float(e) for e in self.exponents))

    def __str__(self) -> str:
        if not self.exponents:
            return "0"
        return " + ".join(f"2^({e})" for e in self.exponents)


@dataclass(frozen=True)
class FlatSource:
    n: int
    support: frozenset[BitString]

    def __post_init__(self):
        if not self.support:
            raise RangeError("a flat source needs a nonempty support")
        for s in self.support:
            if s.length != self.n:
                raise RangeError(f"support element of length {s.length} in an {self.n}-bit source")

    @property
    def min_entropy(self) -> float:
        return math.log2(len(self.support))

    def __len__(self) -> int:
        return len(self.support)

    def ordered(self) -> list[BitString]:
        return sorted(self.support, key=lambda s: s.value)

    @classmethod
    def from_values(cls, n: int, values: Iterable[int]) -> FlatSource:
        return cls(n, frozenset(BitString(v, n) for v in values))

    @classmethod
    def uniform(cls, n: int) -> FlatSource:
        return cls.from_values(n, range(1 << n))

    @classmethod
    def random(cls, rng: np.random.Generator, n: int, size: int) -> FlatSource:
        """A uniformly chosen support of ``size`` distinct n-bit strings."""
        if size > 1 << n:
            raise RangeError(f"{size} distinct strings requested from {n} bits")
        if n <= 62:
            values = rng.choice(1 << n, size=size, replace=False)
            return cls.from_values(n, (int(v) for v in values))
        chosen: set[int] = set()
        while len(chosen) < size:
            chosen.add(random_int(rng, n))
        return cls.from_values(n, chosen)

    def restrict(self, keep: Callable[[BitString], bool]) -> FlatSource:
        return FlatSource(self.n, frozenset(s for s in self.support if keep(s)))


@dataclass(frozen=True)
class Tamperer:
    name: str
    n: int
    fn: Callable[[int], int] = field(compare=False)
    fixed_point_free: bool = True
    table: np.ndarray | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.fixed_point_free and self.n <= config.CERTIFY_BITS:
            self.certify()

    def certify(self) -> None:
        if self.table is not None:
            hits = np.flatnonzero(self.table == np.arange(1 << self.n, dtype=self.table.dtype))
            if hits.size:
                raise FixedPointFound(f"{self.name} fixes {int(hits[0])}")
            return
        for v in range(1 << self.n):
            if self.fn(v) == v:
                raise FixedPointFound(f"{self.name} fixes {v}")

    def __call__(self, s: BitString) -> BitString:
        if s.length != self.n:
            raise RangeError(f"tamperer on {self.n} bits applied to {s.length} bits")
        return BitString(self.fn(s.value), self.n)


def _flip(n: int, position: int) -> Tamperer:
    mask = 1 << (n - 1 - position)
    return Tamperer(f"flip-{position}", n, lambda v: v ^ mask)


def _rotate_flip(n: int) -> Tamperer:
    ones = (1 << n) - 1

    def fn(v: int) -> int:
        return (((v << 1) | (v >> (n - 1))) & ones) ^ 1

    return Tamperer("rotate-flip", n, fn)


def _affine(n: int) -> Tamperer:
    ones = (1 << n) - 1
    return Tamperer("affine", n, lambda v: v ^ ((v << 1) & ones) ^ 1)


def _random_permutation(n: int, rng: np.random.Generator) -> Tamperer:
    if n > config.CERTIFY_BITS:
        offset = 0
        while offset == 0:
            offset = random_int(rng, n)
        return Tamperer("random-offset", n, lambda v: v ^ offset)
    order = rng.permutation(1 << n)
    table = np.empty(1 << n, dtype=np.int64)
    table[order] = np.roll(order, -1)
    return Tamperer("random-cycle", n, lambda v: int(table[v]), table=table)


def tamperer_library(n: int, seed: int = 0) -> list[Tamperer]:
    """
    The tamperer_library function builds the adversary suite for n-bit inputs.

    :param n: int: Length of the tampered strings
    :param seed: int: Seed of the random permutation member
    :return: Bit flips, complement, rotate-and-flip, an affine map, a constant map
        and a random fixed-point-free permutation
    """
    if n < 1:
        raise RangeError(f"tamperer length {n}")
    ones = (1 << n) - 1
    library = [_flip(n, i) for i in range(n)]
    library.append(Tamperer("complement", n, lambda v: v ^ ones))
    library.append(_rotate_flip(n))
    library.append(_affine(n))
    library.append(Tamperer("constant", n, lambda v: ones, fixed_point_free=False))
    library.append(_random_permutation(n, np.random.default_rng(seed)))
    return library


@dataclass(frozen=True)
class JointDist:
    probs: Mapping[Outcome, Fraction]
    arity: int

    def __post_init__(self):
        if sum(self.probs.values(), Fraction(0)) != 1:
            raise RangeError("probabilities do not sum to one")
        for outcome in self.probs:
            if len(outcome) != self.arity:
                raise SpaceMismatch(f"outcome of arity {len(outcome)} in a {self.arity}-ary distribution")

    @classmethod
    def from_counts(cls, counts: Mapping[Outcome, int], arity: int) -> JointDist:
        total = sum(counts.values())
        return cls({k: Fraction(v, total) for k, v in counts.items()}, arity)

    @classmethod
    def point(cls, *outcome: Hashable) -> JointDist:
        return cls({tuple(outcome): Fraction(1)}, len(outcome))

    @classmethod
    def uniform(cls, outcomes: Iterable[Outcome]) -> JointDist:
        outcomes = list(outcomes)
        return cls({o: Fraction(1, len(outcomes)) for o in outcomes}, len(outcomes[0]))

    @classmethod
    def uniform_bits(cls, m: int) -> JointDist:
        return cls.uniform((BitString(v, m),) for v in range(1 << m))

    def __getitem__(self, outcome: Outcome) -> Fraction:
        return self.probs.get(outcome, Fraction(0))

    def map(self, fn: Callable[[Outcome], Outcome]) -> JointDist:
        result: dict[Outcome, Fraction] = defaultdict(Fraction)
        arity = None
        for outcome, p in self.probs.items():
            image = fn(outcome)
            arity = len(image)
            result[image] += p
        return JointDist(dict(result), arity)

    def marginal(self, indices: Sequence[int]) -> JointDist:
        return self.map(lambda o: tuple(o[i] for i in indices))


def statistical_distance(p: JointDist, q: JointDist) -> Fraction:
    if p.arity != q.arity:
        raise SpaceMismatch(f"distributions of arity {p.arity} and {q.arity}")
    keys = set(p.probs) | set(q.probs)
    return sum((abs(p[k] - q[k]) for k in keys), Fraction(0)) / 2


def xor_distribution(dists: Sequence[JointDist]) -> JointDist:
    """Distribution of the XOR of independent one-coordinate bit-string distributions."""
    if not dists:
        raise RangeError("xor of no distributions")
    result = dists[0]
    for dist in dists[1:]:
        probs: dict[Outcome, Fraction] = defaultdict(Fraction)
        for (a,), p in result.probs.items():
            for (b,), q in dist.probs.items():
                probs[(a ^ b,)] += p * q
        result = JointDist(dict(probs), 1)
    return result


def nm_distance(dist: JointDist, m: int) -> Fraction:
    """
    Distance of ``dist`` from the distribution whose first coordinate is replaced
    by an independent uniform m-bit string, all other coordinates kept.
    """
    rows: dict[Outcome, dict[Hashable, Fraction]] = defaultdict(dict)
    for outcome, p in dist.probs.items():
        rows[outcome[1:]][outcome[0]] = p
    cells = 1 << m
    total = Fraction(0)
    for row in rows.values():
        uniform = sum(row.values(), Fraction(0)) / cells
        total += sum((abs(p - uniform) for p in row.values()), Fraction(0))
        total += (cells - len(row)) * uniform
    return total / 2


def _normalize(tamperers, arity: int) -> list[list[Tamperer | None]]:
    if not tamperers:
        return []
    if all(t is None or isinstance(t, Tamperer) for t in tamperers):
        tamperings = [list(tamperers)]
    else:
        tamperings = [list(t) for t in tamperers]
    for tampering in tamperings:
        if len(tampering) != arity:
            raise SpaceMismatch(f"tampering over {len(tampering)} sources for an extractor of {arity}")
    return tamperings


def eval_extractor_dist(ext: Callable[..., BitString], sources: Sequence[FlatSource],
                        tamperers: Sequence | None = None, sides: Sequence[int] = (),
                        *, budget: int | None = None, threads: int | None = None) -> JointDist:
    """
    The eval_extractor_dist function computes an exact joint distribution by enumeration.

    Outcomes are ``(ext(xs), ext(f^1(xs)), ..., xs[i] for i in sides, f^1(xs)[i] ...)``.
    ``tamperers`` is either one tampering (a tamperer or None per source) or a list
    of such tamperings.

    :param ext: Callable: The extractor, called with one string per source
    :param sources: Sequence[FlatSource]: Independent flat sources
    :param tamperers: Sequence | None: Tampering functions aligned with the sources
    :param sides: Sequence[int]: Source indices whose values are conditioned on
    :param budget: int | None: Maximum number of enumerated tuples
    :param threads: int | None: Worker count for partitioning the first source
    :return: The joint distribution with exact probabilities
    """
    budget = config.ENUMERATION_BUDGET if budget is None else budget
    threads = config.THREADS if threads is None else threads
    tamperings = _normalize(tamperers, len(sources))
    for tampering in tamperings:
        for source, t in zip(sources, tampering):
            if t is not None and t.n != source.n:
                raise SpaceMismatch(f"tamperer on {t.n} bits for an {source.n}-bit source")
    total = math.prod(len(s) for s in sources)
    if total > budget:
        raise ExplosionGuard(f"{total} outcomes exceed the enumeration budget {budget}")

    supports = [s.ordered() for s in sources]

    def outcome(xs: tuple[BitString, ...]) -> Outcome:
        tampered = [tuple(x if t is None else t(x) for x, t in zip(xs, tampering)) for tampering in tamperings]
        values = [ext(*xs)] + [ext(*ys) for ys in tampered]
        values += [xs[i] for i in sides]
        for ys in tampered:
            values += [ys[i] for i in sides]
        return tuple(values)

    def work(chunk: list[BitString]) -> Counter:
        counts: Counter = Counter()
        for xs in itertools.product(chunk, *supports[1:]):
            counts[outcome(xs)] += 1
        return counts

    workers = max(1, min(threads, len(supports[0])))
    size = -(-len(supports[0]) // workers)
    chunks = [supports[0][i:i + size] for i in range(0, len(supports[0]), size)]
    logger.debug(f"enumerating {total} tuples in {len(chunks)} chunks")
    if workers == 1:
        partials = [work(chunk) for chunk in chunks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            partials = list(pool.map(work, chunks))
    merged: Counter = Counter()
    for partial in partials:
        merged.update(partial)
    arity = (1 + len(tamperings)) * (1 + len(sides))
    return JointDist.from_counts(merged, arity)


def strongness_gap(ext: Callable[..., BitString], sources: Sequence[FlatSource], tamperers: Sequence,
                   sides: Sequence[int], m: int) -> tuple[Fraction, Fraction]:
    """
    Compare the strong and the plain non-malleability distance of a construction.

    The plain distance conditions on the tampered outputs only; the strong one also
    on the ``sides`` sources and their tampered copies. Returns ``(strong, plain)``.
    """
    dist = eval_extractor_dist(ext, sources, tamperers, sides)
    tamperings = len(_normalize(tamperers, len(sources)))
    plain = nm_distance(dist.marginal(range(1 + tamperings)), m)
    return nm_distance(dist, m), plain


def random_function(m: int, key: bytes = b"reference") -> Callable[..., BitString]:
    """
    A keyed hash of all inputs truncated to m bits, standing in for an ideal
    extractor when calibrating distances measured on small supports.
    """
    if not 1 <= m <= 512:
        raise RangeError(f"reference output of {m} bits")
    size = -(-m // 8)

    def fn(*xs: BitString) -> BitString:
        digest = hashlib.blake2b(b"".join(x.to_bytes() for x in xs), key=key, digest_size=size).digest()
        return BitString(int.from_bytes(digest, "big") >> (8 * size - m), m)

    return fn


def conditioned_distance(table: np.ndarray, m: int) -> Fraction:
    """
    Exact distance of ``(table[i, j], i)`` from ``(U_m, i)`` for uniform row ``i`` and
    column ``j``, where ``table`` holds m-bit outputs indexed by (conditioned value,
    free value).
    """
    table = np.asarray(table, dtype=np.int64)
    rows, cols = table.shape
    cells = 1 << m
    offsets = np.arange(rows, dtype=np.int64)[:, None] * cells + table
    counts = np.bincount(offsets.ravel(), minlength=rows * cells)
    numerator = int(np.abs(counts * cells - cols).sum())
    return Fraction(numerator, 2 * cells * rows * cols)
