"""
Fixed-length bit strings.

Bit ``i`` of a string is the ``i``-th bit in reading order; it is stored as bit
``length - 1 - i`` of the integer ``value``, so the string reads MSB-first.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np

from src.services.errors import LengthMismatch, RangeError

HEADER_BYTES = 4


@dataclass(frozen=True, slots=True)
class BitString:
    value: int
    length: int

    def __post_init__(self):
        if self.length < 0:
            raise RangeError(f"negative length {self.length}")
        if self.value < 0 or self.value >> self.length:
            raise RangeError(f"value does not fit in {self.length} bits")

    @classmethod
    def zeros(cls, length: int) -> BitString:
        return cls(0, length)

    @classmethod
    def ones(cls, length: int) -> BitString:
        return cls((1 << length) - 1, length)

    @classmethod
    def from_bits(cls, bits: Iterable[int]) -> BitString:
        value, length = 0, 0
        for bit in bits:
            if bit not in (0, 1):
                raise RangeError(f"not a bit: {bit!r}")
            value = (value << 1) | bit
            length += 1
        return cls(value, length)

    @classmethod
    def from_str(cls, text: str) -> BitString:
        """Parse a string of ``0``/``1`` characters, ignoring an optional ``0b`` prefix."""
        text = text.removeprefix("0b")
        return cls.from_bits(int(ch) for ch in text)

    @classmethod
    def from_hex(cls, text: str, length: int) -> BitString:
        value = int(text, 16) if text else 0
        return cls(value, length)

    @classmethod
    def from_array(cls, array: np.ndarray) -> BitString:
        return cls.from_bits(int(bit) for bit in np.asarray(array, dtype=np.uint8).ravel())

    def __len__(self) -> int:
        return self.length

    def __iter__(self) -> Iterator[int]:
        for i in range(self.length):
            yield (self.value >> (self.length - 1 - i)) & 1

    def __str__(self) -> str:
        return format(self.value, f"0{self.length}b") if self.length else ""

    def __xor__(self, other: BitString) -> BitString:
        return self.xor(other)

    def __add__(self, other: BitString) -> BitString:
        return self.concat(other)

    def bit(self, i: int) -> int:
        if not 0 <= i < self.length:
            raise RangeError(f"bit {i} out of range for length {self.length}")
        return (self.value >> (self.length - 1 - i)) & 1

    def slice(self, start: int, length: int) -> BitString:
        if start < 0 or length < 0 or start + length > self.length:
            raise RangeError(f"slice [{start}, {start + length}) out of range for length {self.length}")
        shift = self.length - start - length
        return BitString((self.value >> shift) & ((1 << length) - 1), length)

    def prefix(self, length: int) -> BitString:
        return self.slice(0, length)

    def suffix(self, length: int) -> BitString:
        return self.slice(self.length - length, length)

    def xor(self, other: BitString) -> BitString:
        if self.length != other.length:
            raise LengthMismatch(f"xor of lengths {self.length} and {other.length}")
        return BitString(self.value ^ other.value, self.length)

    def concat(self, other: BitString) -> BitString:
        return BitString((self.value << other.length) | other.value, self.length + other.length)

    def pad_to(self, length: int) -> BitString:
        """Append zero bits until the string has ``length`` bits."""
        if length < self.length:
            raise RangeError(f"cannot pad {self.length} bits down to {length}")
        return BitString(self.value << (length - self.length), length)

    def reverse(self) -> BitString:
        return BitString.from_bits(reversed(list(self)))

    def chunks(self, width: int) -> list[BitString]:
        """Split into consecutive ``width``-bit pieces; the last piece is zero-padded."""
        if width <= 0:
            raise RangeError(f"chunk width {width}")
        count = -(-self.length // width)
        padded = self.pad_to(count * width)
        return [padded.slice(i * width, width) for i in range(count)]

    def is_zero(self) -> bool:
        return self.value == 0

    def weight(self) -> int:
        return self.value.bit_count()

    def to_array(self) -> np.ndarray:
        return np.fromiter(iter(self), dtype=np.uint8, count=self.length)

    def to_hex(self) -> str:
        return format(self.value, f"0{max(1, -(-self.length // 4))}x")

    def packed(self) -> bytes:
        nbytes = -(-self.length // 8)
        return (self.value << (nbytes * 8 - self.length)).to_bytes(nbytes, "big")

    def to_bytes(self) -> bytes:
        return self.length.to_bytes(HEADER_BYTES, "big") + self.packed()

    @classmethod
    def read_from(cls, data: bytes, offset: int = 0) -> tuple[BitString, int]:
        """
        The read_from function decodes one serialized string starting at ``offset``.

        :param data: bytes: Buffer holding a length header and packed bits
        :param offset: int: Position of the header in the buffer
        :return: The decoded string and the offset just past it
        """
        if offset + HEADER_BYTES > len(data):
            raise RangeError("truncated bit string header")
        length = int.from_bytes(data[offset:offset + HEADER_BYTES], "big")
        nbytes = -(-length // 8)
        start = offset + HEADER_BYTES
        if start + nbytes > len(data):
            raise RangeError("truncated bit string body")
        raw = int.from_bytes(data[start:start + nbytes], "big")
        spare = nbytes * 8 - length
        if raw & ((1 << spare) - 1):
            raise RangeError("nonzero padding bits")
        return cls(raw >> spare, length), start + nbytes

    @classmethod
    def from_bytes(cls, data: bytes) -> BitString:
        bits, end = cls.read_from(data)
        if end != len(data):
            raise RangeError("trailing bytes after bit string")
        return bits


def slice_bits(x: BitString, start: int, length: int) -> BitString:
    return x.slice(start, length)


def xor(x: BitString, y: BitString) -> BitString:
    return x.xor(y)


def concat(*parts: BitString) -> BitString:
    result = BitString.zeros(0)
    for part in parts:
        result = result.concat(part)
    return result


def random_int(rng: np.random.Generator, bits: int) -> int:
    if bits <= 0:
        return 0
    nbytes = -(-bits // 8)
    return int.from_bytes(rng.bytes(nbytes), "big") >> (nbytes * 8 - bits)


def random_bits(rng: np.random.Generator, length: int) -> BitString:
    return BitString(random_int(rng, length), length)


def all_strings(length: int) -> Iterator[BitString]:
    for value in range(1 << length):
        yield BitString(value, length)
