"""Derive the probability that a uniform random detector matches a uniform
random signature under the r-contiguous rule, and freeze it as a fixture.

Two random strings agree position by position independently with
probability 1/2, so the agreement mask is itself uniform.  A match is a mask
containing a run of at least ``r`` ones.  Counting run-free masks obeys

    N(n) = 2**n                          for n < r
    N(n) = sum(N(n - j) for j in 1..r)   for n >= r

(a run-free string of length n ends in 0 followed by j - 1 ones, j <= r).

The recurrence is checked against exhaustive enumeration of all 2**16 masks
at L=16 for every r, then evaluated at the target (L=32, r=8) and validated by
direct sampling of random string pairs with an independent generator.

Usage: python scripts/derive_match_probability.py [--out tests/fixtures/match_probability.json]
"""
import argparse
import json
import random
from fractions import Fraction
from pathlib import Path


def longest_ones(x: int) -> int:
    best = run = 0
    while x:
        if x & 1:
            run += 1
            best = max(best, run)
        else:
            run = 0
        x >>= 1
    return best


def brute_force(L: int, r: int) -> Fraction:
    hits = sum(1 for mask in range(1 << L) if longest_ones(mask) >= r)
    return Fraction(hits, 1 << L)


def run_free(L: int, r: int) -> int:
    n = []
    for i in range(L + 1):
        n.append(2 ** i if i < r else sum(n[i - j] for j in range(1, r + 1)))
    return n[L]


def exact(L: int, r: int) -> Fraction:
    return 1 - Fraction(run_free(L, r), 2 ** L)


def sample(L: int, r: int, n: int, seed: int) -> float:
    rng = random.Random(seed)
    full = (1 << L) - 1
    hits = 0
    for _ in range(n):
        a, b = rng.getrandbits(L), rng.getrandbits(L)
        hits += longest_ones(~(a ^ b) & full) >= r
    return hits / n


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default=str(Path(__file__).resolve().parents[1] / "tests/fixtures/match_probability.json"))
    ap.add_argument("--samples", type=int, default=10**6)
    args = ap.parse_args(argv)

    for r in range(1, 17):
        bf, dp = brute_force(16, r), exact(16, r)
        assert bf == dp, (r, bf, dp)
    print("recurrence agrees with exhaustive enumeration at L=16 for r=1..16")

    L, r = 32, 8
    p = exact(L, r)
    mc = sample(L, r, args.samples, seed=20240611)
    print(f"L={L} r={r}: exact {float(p):.6f}, sampled {mc:.6f} over {args.samples} pairs")
    assert abs(mc - float(p)) < 5 * (float(p) * (1 - float(p)) / args.samples) ** 0.5

    record = {
        "L": L,
        "r": r,
        "probability": float(p),
        "numerator": p.numerator,
        "denominator": p.denominator,
        "brute_force_L16": {str(r): float(brute_force(16, r)) for r in (4, 8, 12)},
        "sampled": mc,
        "samples": args.samples,
        "derivation": "scripts/derive_match_probability.py",
    }
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    Path(args.out).write_text(json.dumps(record, indent=2) + "\n", encoding="utf-8")
    print("wrote", args.out)


if __name__ == "__main__":
    main()
