"""Detectors and the adaptive detection engine.

Matching is the r-contiguous rule: a detector matches a signature when the
two agree on at least ``r`` consecutive bit positions.  Affinity is the length
of the longest such run.  Fragment detectors only look at their own window.

Scalar functions work on :class:`BitSignature`; :class:`Repertoire` keeps a
packed ``uint64`` view so a batch of payloads can be scanned at once.
"""
from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field

import numpy as np

from netimmune.signature import BitSignature, LengthMismatch, check_lengths, has_run, longest_run


class DetectorState(enum.IntEnum):
    NAIVE = 0
    EFFECTOR = 1
    MEMORY = 2


# scan order: memory first, then effectors, then naive
_SCAN_RANK = {DetectorState.MEMORY: 0, DetectorState.EFFECTOR: 1, DetectorState.NAIVE: 2}


@dataclass(frozen=True)
class Lineage:
    kind: str  # repertoire | matured | fragment | imported | signature
    value: int | None = None

    def __str__(self):
        return self.kind if self.value is None else f"{self.kind}:{self.value}"

    @classmethod
    def parse(cls, text):
        kind, _, value = text.partition(":")
        return cls(kind, int(value) if value else None)


REPERTOIRE = Lineage("repertoire")


@dataclass(eq=False)
class Detector:
    id: int
    template: BitSignature
    r: int
    state: DetectorState = DetectorState.NAIVE
    expires_at: int | None = None
    affinity_best: int = 0
    lineage: Lineage = REPERTOIRE
    offset: int | None = None  # window start for fragment detectors

    def __post_init__(self):
        if not 1 <= self.r <= self.template.length:
            raise ValueError(f"match radius r={self.r} outside [1, {self.template.length}]")

    @property
    def window(self) -> int:
        """Bit mask of the positions this detector inspects."""
        L = self.template.length
        if self.offset is not None:
            return ((1 << self.r) - 1) << (L - self.offset - self.r)
        return (1 << L) - 1

    @property
    def key(self):
        """Identity used when merging repertoires."""
        return self.template.bits, self.r, self.window

    def copy(self, **changes) -> Detector:
        fields = dict(id=self.id, template=self.template, r=self.r, state=self.state,
                      expires_at=self.expires_at, affinity_best=self.affinity_best,
                      lineage=self.lineage, offset=self.offset)
        fields.update(changes)
        return Detector(**fields)

    def export(self) -> str:
        return f"{self.state.name.lower()} {self.r} {self.template.to_hex()} {self.lineage}"


def import_detector(line: str, L: int, det_id: int, expires_at: int | None = None) -> Detector:
    state, r, template, lineage = line.split()
    st = DetectorState[state.upper()]
    lin = Lineage.parse(lineage)
    return Detector(det_id, BitSignature.from_hex(template, L), int(r), st,
                    expires_at if st is DetectorState.EFFECTOR else None,
                    lineage=lin, offset=lin.value if lin.kind == "fragment" else None)


def affinity(a: BitSignature, b: BitSignature) -> int:
    """Longest run of positions where ``a`` and ``b`` agree."""
    return longest_run(a.agreement(b))


def detector_affinity(d: Detector, s: BitSignature) -> int:
    return longest_run(d.template.agreement(s) & d.window)


def matches(d: Detector, s: BitSignature) -> bool:
    check_lengths(d.template, s)
    return has_run(d.template.agreement(s) & d.window, d.r)


# --- vectorised matching ---------------------------------------------------

def runs_at_least(x: np.ndarray, r: int) -> np.ndarray:
    """Boolean array: element has >= r consecutive set bits."""
    y = x.copy()
    have = 1
    while have < r:
        s = min(have, r - have)
        y &= y >> np.uint64(s)
        have += s
    return y != 0


def longest_runs(x: np.ndarray) -> np.ndarray:
    """Length of the longest run of set bits in each element.

    Builds ``P[j]`` (runs of ``2**j`` starting at each bit) by doubling, then
    extends every element's best run greedily from the largest power down.
    """
    x = np.asarray(x, dtype=np.uint64)
    pows = [x]
    for j in range(6):
        p = pows[-1]
        pows.append(p & (p >> np.uint64(1 << j)))
    acc = np.full(x.shape, np.uint64(0xFFFFFFFFFFFFFFFF))
    length = np.zeros(x.shape, dtype=np.uint64)
    for j in range(6, -1, -1):
        step = np.uint64(1 << j)
        cand = acc & (pows[j] >> np.minimum(length, np.uint64(63)))
        ok = (cand != 0) & (length + step <= np.uint64(64))
        acc = np.where(ok, cand, acc)
        length = np.where(ok, length + step, length)
    return length.astype(np.int64)


def _agreement(templates, windows, payloads, L):
    full = np.uint64((1 << L) - 1)
    return ~(templates ^ payloads) & windows & full


def match_matrix(templates, windows, rs, payloads, L) -> np.ndarray:
    """``M[i, j]`` is true iff detector ``j`` matches payload ``i``."""
    agree = _agreement(templates[None, :], windows[None, :], payloads[:, None], L)
    out = np.zeros(agree.shape, dtype=bool)
    for r in np.unique(rs):
        cols = rs == r
        out[:, cols] = runs_at_least(agree[:, cols], int(r))
    return out


def _as_u64(values):
    return np.fromiter(values, dtype=np.uint64)


# --- repertoires -------------------------------------------------------------

class Repertoire:
    """Detector collection held by one host, kept in scan order."""

    def __init__(self, L: int, detectors=()):
        self.L = L
        self._by_key = {}
        self._cache = None
        self.next_expiry = None  # earliest effector expiry, or None
        for d in detectors:
            self.add(d)

    def __len__(self):
        return len(self._by_key)

    def __iter__(self):
        return iter(self.ordered())

    def __contains__(self, key):
        return key in self._by_key

    def get(self, key):
        return self._by_key.get(key)

    def add(self, d: Detector) -> bool:
        """Insert ``d``, or upgrade an existing detector with the same key to
        the better state.  Returns True if anything changed."""
        if d.template.length != self.L:
            raise LengthMismatch(f"detector length {d.template.length} != {self.L}")
        old = self._by_key.get(d.key)
        if old is None:
            self._by_key[d.key] = d
        elif d.state > old.state:
            old.state = d.state
            old.expires_at = d.expires_at
            old.affinity_best = max(old.affinity_best, d.affinity_best)
        elif d.state is old.state is DetectorState.EFFECTOR and (d.expires_at or 0) > (old.expires_at or 0):
            old.expires_at = d.expires_at
        else:
            return False
        if d.state is DetectorState.EFFECTOR and d.expires_at is not None:
            if self.next_expiry is None or d.expires_at < self.next_expiry:
                self.next_expiry = d.expires_at
        self._cache = None
        return True

    def remove_where(self, predicate) -> int:
        doomed = [k for k, d in self._by_key.items() if predicate(d)]
        for k in doomed:
            del self._by_key[k]
        if doomed:
            self._cache = None
        return len(doomed)

    def touch(self):
        self._cache = None

    def ordered(self) -> list:
        if self._cache is None:
            dets = sorted(self._by_key.values(), key=lambda d: (_SCAN_RANK[d.state], d.id))
            self._cache = (
                dets,
                _as_u64(d.template.bits for d in dets),
                _as_u64(d.window for d in dets),
                np.fromiter((d.r for d in dets), dtype=np.int64, count=len(dets)),
            )
        return self._cache[0]

    def census(self):
        self.ordered()
        if len(self._cache) == 4:
            counts = [0, 0, 0]
            for d in self._cache[0]:
                counts[d.state] += 1
            self._cache = self._cache + (counts,)
        return list(self._cache[4])

    def first_matches(self, payloads) -> list:
        """For each payload signature, the first matching detector in scan
        order (memory, effector, naive; then by id), or None."""
        dets = self.ordered()
        if not dets or not payloads:
            return [None] * len(payloads)
        _, t, w, r = self._cache[:4]
        p = _as_u64(s.bits for s in payloads)
        hit = match_matrix(t, w, r, p, self.L)
        first = hit.argmax(axis=1)
        any_hit = hit[np.arange(len(payloads)), first]
        return [dets[j] if ok else None for j, ok in zip(first.tolist(), any_hit.tolist())]

    def first_match(self, s: BitSignature):
        return self.first_matches([s])[0]

    def top(self, m: int) -> list:
        """Up to ``m`` effector/memory detectors, best affinity first."""
        pool = [d for d in self._by_key.values() if d.state is not DetectorState.NAIVE]
        pool.sort(key=lambda d: (-d.affinity_best, d.id))
        return pool[:m]


# --- repertoire generation and negative selection ---------------------------

def make_toolbox(size: int, width: int, rng) -> list:
    return [rng.getrandbits(width) for _ in range(size)]


def generate_repertoire(n: int, L: int, rng, toolbox: list, width: int, r: int,
                        ids=None) -> list:
    """``n`` naive detectors whose templates concatenate ``L / width``
    segments drawn uniformly from ``toolbox``."""
    if width < 1 or L % width:
        raise ValueError(f"segment width {width} must divide L={L}")
    if n < 0:
        raise ValueError("repertoire size must be >= 0")
    ids = ids if ids is not None else itertools.count()
    out = []
    for _ in range(n):
        bits = 0
        for _ in range(L // width):
            bits = (bits << width) | toolbox[rng.randrange(len(toolbox))]
        out.append(Detector(next(ids), BitSignature(bits, L), r))
    return out


def censor_self(candidates: list, self_set: list) -> list:
    """Drop every candidate that matches any self signature (order kept)."""
    if not candidates or not self_set:
        return list(candidates)
    L = candidates[0].template.length
    for s in self_set:
        check_lengths(candidates[0].template, s)
    t = _as_u64(d.template.bits for d in candidates)
    w = _as_u64(d.window for d in candidates)
    r = np.fromiter((d.r for d in candidates), dtype=np.int64, count=len(candidates))
    hits = np.zeros(len(candidates), dtype=bool)
    selfs = _as_u64(s.bits for s in self_set)
    for start in range(0, len(selfs), 256):
        hits |= match_matrix(t, w, r, selfs[start:start + 256], L).any(axis=0)
    return [d for d, h in zip(candidates, hits.tolist()) if not h]


# --- affinity maturation -----------------------------------------------------

@dataclass
class Capture:
    antigen: BitSignature
    step: int
    holder: int
    seed: Detector
    suspect: int | None = None  # host whose genome was presented on quarantine
    done: bool = False


@dataclass
class LymphState:
    clones: int = 50  # C
    mutation_rate: float = 1 / 64  # rho
    survivors: int = 5  # k
    rounds: int = 10  # G
    retention: int = 20
    captured: list = field(default_factory=list)
    matured: dict = field(default_factory=dict)  # (antigen bits, holder) -> step

    def __post_init__(self):
        if self.survivors > self.clones:
            raise ValueError("survivors k must not exceed clones C")

    def capture(self, antigen, step, holder, seed, suspect=None):
        self.captured.append(Capture(antigen, step, holder, seed, suspect))

    def evict(self, step):
        self.captured = [c for c in self.captured if step - c.step < self.retention]
        self.matured = {k: t for k, t in self.matured.items() if step - t < self.retention}

    def seen(self, step) -> int:
        """Antigens captured within the retention window."""
        return sum(1 for c in self.captured if step - c.step < self.retention)


def _mutation_masks(n, L, rho, gen):
    """``n`` flip masks, each of the ``n * L`` bits set independently with
    probability ``rho``.  Flip positions are drawn as geometric gaps over the
    flattened bits, so the cost follows the number of flips, not ``n * L``."""
    masks = np.zeros(n, dtype=np.uint64)
    if rho <= 0.0 or n == 0:
        return masks
    total = n * L
    if rho >= 1.0:
        return masks | np.uint64((1 << L) - 1)
    mean = total * rho
    chunk = int(mean + 6.0 * np.sqrt(mean) + 16)
    pos = np.cumsum(gen.geometric(rho, chunk)) - 1
    while pos[-1] < total:
        more = np.cumsum(gen.geometric(rho, chunk)) + pos[-1]
        pos = np.concatenate([pos, more])
    pos = pos[pos < total]
    bits = np.left_shift(np.uint64(1), (pos % L).astype(np.uint64))
    np.bitwise_or.at(masks, pos // L, bits)
    return masks


def mature_rounds(lymph: LymphState, seeds: list, antigen: BitSignature, gen):
    """Clonal selection, yielding ``(templates, scores, radii)`` per round.

    Each round clones every survivor ``C`` times, flips clone bits with
    probability ``rho``, scores parents and clones by affinity to the antigen
    and keeps the best ``k`` (ties: lower template value, then earlier index).
    Parents take part in the selection, so the best score never drops.
    """
    if not seeds:
        raise ValueError("maturation needs at least one seed detector")
    L = antigen.length
    for s in seeds:
        check_lengths(s.template, antigen)
    full = np.uint64((1 << L) - 1)
    ag = np.uint64(antigen.bits)
    pop = _as_u64(s.template.bits for s in seeds)
    rs = np.fromiter((s.r for s in seeds), dtype=np.int64, count=len(seeds))
    for _ in range(lymph.rounds):
        clones = np.repeat(pop, lymph.clones)
        clone_r = np.repeat(rs, lymph.clones)
        clones ^= _mutation_masks(len(clones), L, lymph.mutation_rate, gen)
        everyone = np.concatenate([pop, clones])
        every_r = np.concatenate([rs, clone_r])
        scores = longest_runs(~(everyone ^ ag) & full)
        order = np.lexsort((np.arange(len(everyone)), everyone, -scores))[: lymph.survivors]
        pop, rs = everyone[order], every_r[order]
        yield pop.copy(), scores[order].copy(), rs.copy()


def mature(lymph: LymphState, seeds: list, antigen: BitSignature, gen, *, step: int = 0,
           lifespan: int = 40, ids=None) -> list:
    """Effector detectors refined against ``antigen``."""
    ids = ids if ids is not None else itertools.count()
    L = antigen.length
    if lymph.rounds == 0:
        pop = [(s.template.bits, detector_affinity(s, antigen), s.r) for s in seeds[: lymph.survivors]]
    else:
        for templates, scores, rs in mature_rounds(lymph, seeds, antigen, gen):
            pass
        pop = list(zip(templates.tolist(), scores.tolist(), rs.tolist()))
    return [
        Detector(next(ids), BitSignature(int(t), L), int(r), DetectorState.EFFECTOR,
                 step + lifespan, int(score), Lineage("matured", lymph.rounds))
        for t, score, r in pop
    ]


def mature_many(lymph: LymphState, jobs: list, gen, *, step: int = 0, lifespan: int = 40,
                ids=None) -> list:
    """:func:`mature` for several ``(seeds, antigen)`` jobs at once.

    Every round mutates the clones of all jobs with one draw and selects the
    best ``k`` inside each job, so a single job consumes the same random
    numbers and returns the same detectors as :func:`mature`.
    """
    ids = ids if ids is not None else itertools.count()
    if not jobs:
        return []
    if lymph.rounds == 0:
        return [mature(lymph, seeds, antigen, gen, step=step, lifespan=lifespan, ids=ids)
                for seeds, antigen in jobs]
    L = jobs[0][1].length
    full = np.uint64((1 << L) - 1)
    pop, rs, group = [], [], []
    for g, (seeds, antigen) in enumerate(jobs):
        if not seeds:
            raise ValueError("maturation needs at least one seed detector")
        for s in seeds:
            check_lengths(s.template, antigen)
            pop.append(s.template.bits)
            rs.append(s.r)
            group.append(g)
    pop, group = _as_u64(pop), np.asarray(group, dtype=np.int64)
    rs = np.asarray(rs, dtype=np.int64)
    ags = _as_u64(antigen.bits for _, antigen in jobs)
    for _ in range(lymph.rounds):
        clones = np.repeat(pop, lymph.clones)
        clones ^= _mutation_masks(len(clones), L, lymph.mutation_rate, gen)
        everyone = np.concatenate([pop, clones])
        every_r = np.concatenate([rs, np.repeat(rs, lymph.clones)])
        every_g = np.concatenate([group, np.repeat(group, lymph.clones)])
        # position inside the job's own [parents, clones] list, for tie-breaks
        local = np.concatenate([_rank_in_group(group), len(pop) + np.arange(len(clones))])
        scores = longest_runs(~(everyone ^ ags[every_g]) & full)
        order = np.lexsort((local, everyone, -scores, every_g))
        keep = order[_rank_in_group(every_g[order]) < lymph.survivors]
        pop, rs, group, best = everyone[keep], every_r[keep], every_g[keep], scores[keep]
    out = [[] for _ in jobs]
    for t, r, g, score in zip(pop.tolist(), rs.tolist(), group.tolist(), best.tolist()):
        out[g].append((t, r, score))
    return [[Detector(next(ids), BitSignature(t, L), r, DetectorState.EFFECTOR, step + lifespan, score,
                      Lineage("matured", lymph.rounds)) for t, r, score in members] for members in out]


def _rank_in_group(groups):
    """0, 1, 2, ... within each run of equal values of a grouped array."""
    n = len(groups)
    if n == 0:
        return np.zeros(0, dtype=np.int64)
    change = np.empty(n, dtype=bool)
    change[0] = True
    np.not_equal(groups[1:], groups[:-1], out=change[1:])
    starts = np.flatnonzero(change)
    lengths = np.diff(np.append(starts, n))
    return np.arange(n) - np.repeat(starts, lengths)


def fragment(antigen: BitSignature, count: int, width: int) -> list:
    """``count`` evenly spaced windows of ``width`` bits, as ``(offset,
    sub_signature)`` pairs; offsets count from the most significant bit."""
    L = antigen.length
    if width > L:
        raise ValueError(f"fragment width {width} exceeds L={L}")
    if count < 1:
        raise ValueError("need at least one fragment")
    stride = (L - width) // max(1, count - 1)
    out = []
    for i in range(count):
        offset = i * stride
        sub = (antigen.bits >> (L - offset - width)) & ((1 << width) - 1)
        out.append((offset, BitSignature(sub, width)))
    return out


def fragment_detectors(antigen, count, width, *, step=0, lifespan=40, ids=None) -> list:
    ids = ids if ids is not None else itertools.count()
    L = antigen.length
    out = []
    for offset, sub in fragment(antigen, count, width):
        template = BitSignature(sub.bits << (L - offset - width), L)
        out.append(Detector(next(ids), template, width, DetectorState.EFFECTOR,
                            step + lifespan, width, Lineage("fragment", offset), offset))
    return out


# --- memory and cohort decay -------------------------------------------------

@dataclass(frozen=True)
class Elimination:
    strain: int
    step: int


def promote_memory(repertoire: Repertoire, detector: Detector, evidence: Elimination) -> Repertoire:
    if evidence is None:
        raise ValueError("memory promotion requires a confirmed elimination")
    held = repertoire.get(detector.key)
    if held is None:
        held = detector.copy()
        repertoire.add(held)
    if held.state is not DetectorState.MEMORY:
        held.state = DetectorState.MEMORY
        held.expires_at = None
        repertoire.touch()
    return repertoire


def decay(repertoire: Repertoire, step: int, antigen_seen_window: int = 0) -> Repertoire:
    """Remove effectors whose lifespan ran out.

    Naive and memory detectors always persist.  ``antigen_seen_window`` is the
    number of antigens seen recently; new effectors are only minted by
    maturation, which needs a captured antigen, so with a quiet window the
    effector cohort can only shrink.
    """
    if repertoire.next_expiry is None or repertoire.next_expiry > step:
        return repertoire
    repertoire.remove_where(
        lambda d: d.state is DetectorState.EFFECTOR and d.expires_at is not None and d.expires_at <= step
    )
    pending = [d.expires_at for d in repertoire._by_key.values()
               if d.state is DetectorState.EFFECTOR and d.expires_at is not None]
    repertoire.next_expiry = min(pending, default=None)
    return repertoire


def scan_many(jobs) -> list:
    """First match for many ``(repertoire, payload)`` pairs in one pass.

    Same answer as ``repertoire.first_match(payload)`` for every pair; the
    repertoires' packed arrays are concatenated so a whole simulation phase
    costs a handful of numpy calls.
    """
    out = [None] * len(jobs)
    parts_t, parts_w, parts_r, payload, seg_len, live = [], [], [], [], [], []
    for i, (rep, s) in enumerate(jobs):
        dets = rep.ordered()
        if not dets:
            continue
        _, t, w, r = rep._cache[:4]
        parts_t.append(t)
        parts_w.append(w)
        parts_r.append(r)
        payload.append(s.bits)
        seg_len.append(len(dets))
        live.append(i)
    if not live:
        return out
    L = jobs[live[0]][0].L
    t = np.concatenate(parts_t)
    w = np.concatenate(parts_w)
    r = np.concatenate(parts_r)
    lens = np.asarray(seg_len)
    p = np.repeat(_as_u64(payload), lens)
    agree = ~(t ^ p) & w & np.uint64((1 << L) - 1)
    hit = np.zeros(len(t), dtype=bool)
    for rr in np.unique(r):
        sel = r == rr
        hit[sel] = runs_at_least(agree[sel], int(rr))
    seg = np.repeat(np.arange(len(live)), lens)
    starts = np.concatenate([[0], np.cumsum(lens)[:-1]])
    idx = np.flatnonzero(hit)
    first_seg, first_pos = np.unique(seg[idx], return_index=True)
    for k, pos in zip(first_seg.tolist(), idx[first_pos].tolist()):
        i = live[k]
        out[i] = jobs[i][0].ordered()[pos - starts[k]]
    return out
