"""Fixed-length bit signatures: the shared shape space for packet payloads,
malware genomes and detector templates.

Bit strings are written most-significant bit first, so position 0 of
``"1011"`` is the leftmost ``1``.
"""
from __future__ import annotations

from dataclasses import dataclass


class LengthMismatch(ValueError):
    pass


@dataclass(frozen=True, slots=True)
class BitSignature:
    bits: int
    length: int

    def __post_init__(self):
        if self.length < 1:
            raise ValueError(f"signature length must be >= 1, got {self.length}")
        if self.bits < 0 or self.bits >> self.length:
            raise ValueError(f"value {self.bits:#x} does not fit in {self.length} bits")

    @classmethod
    def from_str(cls, text: str) -> BitSignature:
        if not text or set(text) - {"0", "1"}:
            raise ValueError(f"not a bit string: {text!r}")
        return cls(int(text, 2), len(text))

    @classmethod
    def from_hex(cls, text: str, length: int | None = None) -> BitSignature:
        text = text.lower().removeprefix("0x")
        if length is None:
            length = 4 * len(text)
        return cls(int(text, 16), length)

    @property
    def mask(self) -> int:
        return (1 << self.length) - 1

    def to_str(self) -> str:
        return format(self.bits, f"0{self.length}b")

    def to_hex(self) -> str:
        return format(self.bits, f"0{(self.length + 3) // 4}x")

    def complement(self) -> BitSignature:
        return BitSignature(self.bits ^ self.mask, self.length)

    def flip(self, mask: int) -> BitSignature:
        return BitSignature(self.bits ^ (mask & self.mask), self.length)

    def hamming(self, other: BitSignature) -> int:
        check_lengths(self, other)
        return (self.bits ^ other.bits).bit_count()

    def agreement(self, other: BitSignature) -> int:
        check_lengths(self, other)
        return ~(self.bits ^ other.bits) & self.mask

    def __str__(self):
        return self.to_str()


def check_lengths(a: BitSignature, b: BitSignature) -> None:
    if a.length != b.length:
        raise LengthMismatch(f"signature lengths differ: {a.length} vs {b.length}")


def longest_run(x: int) -> int:
    """Length of the longest run of consecutive 1 bits in ``x``."""
    n = 0
    while x:
        x &= x >> 1
        n += 1
    return n


def has_run(x: int, r: int) -> bool:
    """True iff ``x`` contains at least ``r`` consecutive 1 bits."""
    have = 1
    while have < r and x:
        s = min(have, r - have)
        x &= x >> s
        have += s
    return x != 0 if r > 0 else True
