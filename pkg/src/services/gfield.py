"""
Arithmetic in GF(2^w) and exact linear algebra over it.

Elements are integers below ``2**w`` in the polynomial basis; bit ``j`` is the
coefficient of ``x**j``. The canonical modulus for a width is the numerically
smallest irreducible polynomial of that degree with a nonzero constant term.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import ClassVar, Sequence

import numpy as np

from src.services.bitcore import BitString, random_int
from src.services.errors import (
    CtxMismatch,
    DivisionByZero,
    DuplicatePoint,
    Inconsistent,
    LengthMismatch,
    RangeError,
)

logger = logging.getLogger(__name__)

TRIAL_DIVISION_MAX_WIDTH = 16
MAX_SYMBOL_WIDTH = 32


def clmul(a: int, b: int) -> int:
    """Carry-less product of two polynomials over GF(2)."""
    result = 0
    while b:
        if b & 1:
            result ^= a
        a <<= 1
        b >>= 1
    return result


def poly_mod(a: int, poly: int) -> int:
    degree = poly.bit_length() - 1
    while a.bit_length() > degree:
        a ^= poly << (a.bit_length() - 1 - degree)
    return a


def poly_divmod(a: int, b: int) -> tuple[int, int]:
    if b == 0:
        raise DivisionByZero("polynomial division by zero")
    quotient = 0
    degree = b.bit_length() - 1
    while a and a.bit_length() - 1 >= degree:
        shift = a.bit_length() - 1 - degree
        quotient |= 1 << shift
        a ^= b << shift
    return quotient, a


def poly_gcd(a: int, b: int) -> int:
    while b:
        a, b = b, poly_divmod(a, b)[1]
    return a


def _mulmod(a: int, b: int, poly: int) -> int:
    return poly_mod(clmul(a, b), poly)


def is_irreducible(poly: int) -> bool:
    """
    The is_irreducible function tests a GF(2) polynomial for irreducibility.

    Widths up to 16 are checked by trial division against every polynomial of
    at most half the degree; wider ones by Ben-Or's gcd test.

    :param poly: int: Polynomial with bit j holding the coefficient of x^j
    :return: True when poly has no nontrivial factor
    """
    degree = poly.bit_length() - 1
    if degree < 1:
        return False
    if degree == 1:
        return True
    if not poly & 1:
        return False
    if degree <= TRIAL_DIVISION_MAX_WIDTH:
        for divisor in range(2, 1 << (degree // 2 + 1)):
            if poly_divmod(poly, divisor)[1] == 0:
                return False
        return True
    power = 0b10
    for _ in range(degree // 2):
        power = _mulmod(power, power, poly)
        if poly_gcd(poly, power ^ 0b10) != 1:
            return False
    return True


@lru_cache(maxsize=None)
def canonical_poly(w: int) -> int:
    if w < 1:
        raise RangeError(f"field width {w}")
    candidate = (1 << w) | 1
    while not is_irreducible(candidate):
        candidate += 2
    logger.debug(f"canonical modulus for width {w}: {candidate:#x}")
    return candidate


@dataclass(frozen=True, slots=True)
class FieldCtx:
    """Symbol field: Reed-Solomon codes, Vandermonde systems and field elements."""
    w: int
    poly: int

    max_width: ClassVar[int | None] = MAX_SYMBOL_WIDTH

    def __post_init__(self):
        if self.w < 1:
            raise RangeError(f"field width {self.w}")
        if self.max_width is not None and self.w > self.max_width:
            raise RangeError(f"symbol fields are at most {self.max_width} bits wide, got {self.w}")
        if self.poly.bit_length() - 1 != self.w:
            raise RangeError(f"modulus {self.poly:#x} does not have degree {self.w}")
        if self.poly != canonical_poly(self.w) and not is_irreducible(self.poly):
            raise RangeError(f"modulus {self.poly:#x} is reducible")

    @property
    def order(self) -> int:
        return 1 << self.w

    def mul(self, a: int, b: int) -> int:
        mask = 1 << self.w
        result = 0
        while b:
            if b & 1:
                result ^= a
            a <<= 1
            if a & mask:
                a ^= self.poly
            b >>= 1
        return result

    def inv(self, a: int) -> int:
        if a == 0:
            raise DivisionByZero("zero has no inverse")
        r0, r1 = self.poly, a
        s0, s1 = 0, 1
        while r1:
            quotient, remainder = poly_divmod(r0, r1)
            r0, r1 = r1, remainder
            s0, s1 = s1, s0 ^ clmul(quotient, s1)
        return poly_mod(s0, self.poly)

    def pow(self, a: int, e: int) -> int:
        result = 1
        while e:
            if e & 1:
                result = self.mul(result, a)
            a = self.mul(a, a)
            e >>= 1
        return result

    def element(self, value: int | BitString) -> FieldElement:
        if isinstance(value, BitString):
            if value.length != self.w:
                raise LengthMismatch(f"{value.length}-bit string is not a GF(2^{self.w}) element")
            value = value.value
        return FieldElement(self, value)

    def zero(self) -> FieldElement:
        return FieldElement(self, 0)

    def one(self) -> FieldElement:
        return FieldElement(self, 1)

    def elements(self) -> list[FieldElement]:
        return [FieldElement(self, v) for v in range(self.order)]


@dataclass(frozen=True, slots=True)
class WideFieldCtx(FieldCtx):
    """
    Unbounded width, for multiplication hashing: the leftover-hash family, the
    inner product over wide blocks and the invertible extractor's GF(2^t).
    """
    max_width: ClassVar[int | None] = None


@lru_cache(maxsize=None)
def field_ctx(w: int) -> FieldCtx:
    return FieldCtx(w, canonical_poly(w))


@lru_cache(maxsize=None)
def wide_field_ctx(w: int) -> WideFieldCtx:
    return WideFieldCtx(w, canonical_poly(w))


@dataclass(frozen=True, slots=True)
class FieldElement:
    ctx: FieldCtx
    value: int

    def __post_init__(self):
        if not 0 <= self.value < self.ctx.order:
            raise RangeError(f"{self.value} is not an element of GF(2^{self.ctx.w})")

    @property
    def bits(self) -> BitString:
        return BitString(self.value, self.ctx.w)

    def __bool__(self) -> bool:
        return self.value != 0

    def __add__(self, other: FieldElement) -> FieldElement:
        _check_ctx(self, other)
        return FieldElement(self.ctx, self.value ^ other.value)

    __sub__ = __add__

    def __mul__(self, other: FieldElement) -> FieldElement:
        return fmul(self, other)

    def __truediv__(self, other: FieldElement) -> FieldElement:
        return fmul(self, finv(other))

    def __pow__(self, e: int) -> FieldElement:
        return FieldElement(self.ctx, self.ctx.pow(self.value, e))


def _check_ctx(a: FieldElement, b: FieldElement) -> None:
    if a.ctx != b.ctx:
        raise CtxMismatch(f"GF(2^{a.ctx.w}) element combined with GF(2^{b.ctx.w}) element")


def fmul(a: FieldElement, b: FieldElement) -> FieldElement:
    _check_ctx(a, b)
    return FieldElement(a.ctx, a.ctx.mul(a.value, b.value))


def finv(a: FieldElement) -> FieldElement:
    return FieldElement(a.ctx, a.ctx.inv(a.value))


def mul_array(ctx: FieldCtx, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Elementwise product of two arrays of field elements (widths up to 32)."""
    if ctx.w > 32:
        raise RangeError(f"vectorized arithmetic supports widths up to 32, got {ctx.w}")
    a = np.asarray(a, dtype=np.uint64).copy()
    b = np.asarray(b, dtype=np.uint64).copy()
    a, b = np.broadcast_arrays(a, b)
    a, b = a.copy(), b.copy()
    mask = np.uint64(1 << ctx.w)
    poly = np.uint64(ctx.poly)
    one = np.uint64(1)
    result = np.zeros_like(a)
    for _ in range(ctx.w):
        result ^= np.where(b & one, a, np.uint64(0))
        a <<= one
        a = np.where(a & mask, a ^ poly, a)
        b >>= one
    return result


@dataclass(frozen=True)
class LinearSystem:
    ctx: FieldCtx
    a: tuple[tuple[int, ...], ...]
    b: tuple[int, ...]
    unknowns: int

    def __post_init__(self):
        if len(self.a) != len(self.b):
            raise LengthMismatch(f"{len(self.a)} rows but {len(self.b)} right-hand sides")
        for row in self.a:
            if len(row) != self.unknowns:
                raise LengthMismatch(f"row of width {len(row)} in a system with {self.unknowns} unknowns")

    @classmethod
    def build(cls, matrix: Sequence[Sequence[FieldElement]], rhs: Sequence[FieldElement],
              unknowns: int | None = None) -> LinearSystem:
        elements = [e for row in matrix for e in row] + list(rhs)
        if not elements:
            raise LengthMismatch("empty system needs an explicit field")
        ctx = elements[0].ctx
        for element in elements:
            if element.ctx != ctx:
                raise CtxMismatch("system mixes fields")
        width = unknowns if unknowns is not None else len(matrix[0])
        return cls(ctx, tuple(tuple(e.value for e in row) for row in matrix),
                   tuple(e.value for e in rhs), width)

    @classmethod
    def unconstrained(cls, ctx: FieldCtx, unknowns: int) -> LinearSystem:
        return cls(ctx, (), (), unknowns)


def _reduce(ctx: FieldCtx, rows: list[list[int]], columns: int) -> list[int]:
    """Bring ``rows`` to reduced row echelon form in place; return pivot columns."""
    pivots: list[int] = []
    pivot_row = 0
    for col in range(columns):
        found = next((i for i in range(pivot_row, len(rows)) if rows[i][col]), None)
        if found is None:
            continue
        rows[pivot_row], rows[found] = rows[found], rows[pivot_row]
        scale = ctx.inv(rows[pivot_row][col])
        rows[pivot_row] = [ctx.mul(scale, v) for v in rows[pivot_row]]
        for i in range(len(rows)):
            if i != pivot_row and rows[i][col]:
                factor = rows[i][col]
                rows[i] = [v ^ ctx.mul(factor, p) for v, p in zip(rows[i], rows[pivot_row])]
        pivots.append(col)
        pivot_row += 1
        if pivot_row == len(rows):
            break
    return pivots


def rank(ctx: FieldCtx, matrix: Sequence[Sequence[int | FieldElement]]) -> int:
    rows = [[v.value if isinstance(v, FieldElement) else v for v in row] for row in matrix]
    if not rows:
        return 0
    return len(_reduce(ctx, rows, len(rows[0])))


def solve_affine_uniform(system: LinearSystem, rng: np.random.Generator) -> tuple[list[FieldElement], int]:
    """
    The solve_affine_uniform function draws a uniform solution of A x = b.

    Free variables are drawn uniformly and the pivot variables are back-substituted,
    so every solution is returned with probability (2^w)^-(kernel dimension).

    :param system: LinearSystem: The system to solve
    :param rng: np.random.Generator: Source of randomness for the free variables
    :return: The solution vector and the kernel dimension
    """
    ctx = system.ctx
    rows = [list(row) + [rhs] for row, rhs in zip(system.a, system.b)]
    pivots = _reduce(ctx, rows, system.unknowns)
    for row in rows[len(pivots):]:
        if row[-1]:
            raise Inconsistent("the system has no solution")
    free = [col for col in range(system.unknowns) if col not in set(pivots)]
    x = [0] * system.unknowns
    for col in free:
        x[col] = random_int(rng, ctx.w)
    for i, col in enumerate(pivots):
        value = rows[i][-1]
        for f in free:
            if rows[i][f]:
                value ^= ctx.mul(rows[i][f], x[f])
        x[col] = value
    return [FieldElement(ctx, v) for v in x], len(free)


def vandermonde(ctx: FieldCtx, points: Sequence[FieldElement], t: int) -> list[list[FieldElement]]:
    """Rows ``[p**0, p**1, ..., p**t]`` for each point, with ``0**0 = 1``."""
    values = [p.value for p in points]
    if len(set(values)) != len(values):
        raise DuplicatePoint(f"repeated evaluation point among {values}")
    if len(values) > t + 1:
        raise RangeError(f"{len(values)} points exceed degree bound {t}")
    matrix = []
    for p in points:
        if p.ctx != ctx:
            raise CtxMismatch("point from another field")
        row, power = [], 1
        for _ in range(t + 1):
            row.append(FieldElement(ctx, power))
            power = ctx.mul(power, p.value)
        matrix.append(row)
    return matrix


def gf2_row_echelon(matrix: np.ndarray) -> tuple[np.ndarray, list[int]]:
    """Row-reduce a binary matrix over GF(2); returns the echelon form and pivot columns."""
    reduced = (np.asarray(matrix, dtype=np.uint8) % 2).copy()
    m, n = reduced.shape
    pivot_cols: list[int] = []
    pivot_row = 0
    for col in range(n):
        found = -1
        for row in range(pivot_row, m):
            if reduced[row, col] == 1:
                found = row
                break
        if found == -1:
            continue
        if found != pivot_row:
            reduced[[pivot_row, found]] = reduced[[found, pivot_row]]
        for row in range(pivot_row + 1, m):
            if reduced[row, col] == 1:
                reduced[row] ^= reduced[pivot_row]
        pivot_cols.append(col)
        pivot_row += 1
        if pivot_row == m:
            break
    return reduced, pivot_cols


def gf2_rank(matrix: np.ndarray) -> int:
    _, pivot_cols = gf2_row_echelon(matrix)
    return len(pivot_cols)
