"""Position-by-position reference matcher.

Deliberately slow and obvious: it walks the two strings as text and never
touches the bit tricks used by the engine, so it can cross-check them.
"""
from __future__ import annotations


def naive_affinity(a: str, b: str) -> int:
    """Longest run of positions where bit strings ``a`` and ``b`` agree."""
    if len(a) != len(b):
        raise ValueError(f"length mismatch: {len(a)} vs {len(b)}")
    best = run = 0
    for x, y in zip(a, b):
        run = run + 1 if x == y else 0
        best = max(best, run)
    return best


def naive_match(a: str, b: str, r: int) -> bool:
    return naive_affinity(a, b) >= r


def hex_to_bits(text: str, length: int | None = None) -> str:
    text = text.lower().removeprefix("0x")
    if not text:
        raise ValueError("empty hex string")
    value = int(text, 16)
    length = 4 * len(text) if length is None else length
    if value >> length:
        raise ValueError(f"{text} does not fit in {length} bits")
    return format(value, f"0{length}b")
