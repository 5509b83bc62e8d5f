"""Named, reproducible random streams.

Every stream is identified by ``(seed, purpose, entity)``.  The stream seed is
the first 8 bytes (big endian) of ``blake2b("{seed}|{purpose}|{entity}")`` and
feeds either :class:`random.Random` (MT19937, seeded through ``init_by_array``)
or a numpy ``Generator`` over ``PCG64`` for vectorised draws.  Both generators
are platform independent.  CPython promises that ``random()`` keeps its output
across versions; the helpers built on top of it (``getrandbits``,
``randrange``, ``sample``, ``shuffle``) have been stable in practice but are not
formally promised.  A frozen-draw test in the suite flags any drift.

Adding a new purpose tag never perturbs existing streams because each stream
is derived independently from its own tag.
"""
from __future__ import annotations

import hashlib
import math
import random

import numpy as np


def derive_seed(seed: int, purpose: str, entity: int = 0) -> int:
    key = f"{seed}|{purpose}|{entity}".encode()
    return int.from_bytes(hashlib.blake2b(key, digest_size=8).digest(), "big")


def rng_stream(seed: int, purpose: str, entity: int = 0) -> random.Random:
    return random.Random(derive_seed(seed, purpose, entity))


def np_stream(seed: int, purpose: str, entity: int = 0) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(derive_seed(seed, purpose, entity)))


def flip_mask(length: int, p: float, rng: random.Random) -> int:
    """Bit mask with every one of ``length`` bits set independently with
    probability ``p``.

    Uses geometric gaps between set bits so the cost scales with the number of
    flips rather than with ``length``.
    """
    if p <= 0.0 or length == 0:
        return 0
    if p >= 1.0:
        return (1 << length) - 1
    log_q = math.log1p(-p)
    mask = 0
    pos = -1
    while True:
        gap = math.log(1.0 - rng.random()) / log_q
        if pos + 1 + gap >= length:
            return mask
        pos += 1 + int(gap)
        mask |= 1 << pos


def bernoulli_count(rate: float, rng: random.Random) -> int:
    """``floor(rate)`` plus one more with probability ``frac(rate)``."""
    whole = int(rate)
    frac = rate - whole
    if frac > 0.0 and rng.random() < frac:
        whole += 1
    return whole
