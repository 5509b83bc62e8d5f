"""Interception points for the defense layers and the action regulator.

Nothing here reads ``Packet.klass``: decisions depend only on payloads,
sources, protocol headers and tokens.
"""
from __future__ import annotations

import enum
from collections import defaultdict
from dataclasses import dataclass, field

from netimmune.detection import DetectorState, Lineage, detector_affinity
from netimmune.model import Proto


class Verdict(enum.Enum):
    ADMIT = "admit"
    DENY = "deny"


class Action(enum.Enum):
    NONE = "none"
    QUARANTINE = "quarantine"
    DISINFECT = "disinfect"


@dataclass(frozen=True)
class Mark:
    detector: object
    affinity: int


def token_valid(packet, token) -> bool:
    return packet.token is not None and packet.token == token


# --- barrier -----------------------------------------------------------------

def barrier_admit(host, packet, token, open_ports=(80,)) -> Verdict:
    """Semi-permeable membrane: only forged control traffic and packets for
    closed ports are stopped.  Malicious application traffic uses the open
    port and passes."""
    if packet.proto is Proto.CONTROL:
        return Verdict.ADMIT if token_valid(packet, token) else Verdict.DENY
    if packet.proto is Proto.APP and packet.port not in open_ports:
        return Verdict.DENY
    return Verdict.ADMIT


# --- blacklist -----------------------------------------------------------------

@dataclass
class BlacklistService:
    threshold: int = 3
    reports: dict = field(default_factory=lambda: defaultdict(set))
    blocked: set = field(default_factory=set)
    filed: int = 0

    def count(self, source) -> int:
        return len(self.reports.get(source, ()))


def blacklist_report(service: BlacklistService, reporter: int, source: int) -> BlacklistService:
    service.filed += 1
    service.reports[source].add(reporter)
    if len(service.reports[source]) >= service.threshold:
        service.blocked.add(source)
    return service


def blacklist_blocks(service: BlacklistService, subscriber, packet) -> bool:
    if not subscriber.blacklist_subscriber:
        return False
    return packet.src in service.blocked


# --- content scanning ----------------------------------------------------------

def endpoint_scan(host, packet):
    """First matching detector in the host's repertoire, or None."""
    rep = host.repertoire
    if rep is None or not len(rep):
        return None
    d = rep.first_match(packet.payload)
    return None if d is None else Mark(d, detector_affinity(d, packet.payload))


def exempt(packet, token) -> bool:
    """Authenticated security traffic is never content-filtered."""
    return packet.proto is not Proto.APP and token_valid(packet, token)


def router_filter(router, packets, token) -> list:
    """Scan a batch of packets at ``router``; one ``Mark`` or None each."""
    rep = router.repertoire
    out = [None] * len(packets)
    if rep is None or not len(rep):
        return out
    idx = [i for i, p in enumerate(packets) if not exempt(p, token)]
    hits = rep.first_matches([packets[i].payload for i in idx])
    for i, d in zip(idx, hits):
        if d is not None:
            out[i] = Mark(d, detector_affinity(d, packets[i].payload))
    return out


# --- action regulation -------------------------------------------------------

@dataclass
class ActionSignalSet:
    """Per-suspect evidence within the corroboration window."""

    window: int = 3
    matches: dict = field(default_factory=lambda: defaultdict(list))  # suspect -> [(step, key, holder, det)]
    triggers: dict = field(default_factory=lambda: defaultdict(list))  # suspect -> [(step, valid)]

    def add_match(self, step, suspect, holder, detector):
        self.matches[suspect].append((step, detector.key, holder, detector))

    def add_trigger(self, step, suspect, valid):
        self.triggers[suspect].append((step, valid))

    def expire(self, step):
        for table in (self.matches, self.triggers):
            for suspect in list(table):
                kept = [e for e in table[suspect] if step - e[0] < self.window]
                if kept:
                    table[suspect] = kept
                else:
                    del table[suspect]

    def clear(self, suspect):
        self.matches.pop(suspect, None)
        self.triggers.pop(suspect, None)

    def suspects(self):
        return sorted(set(self.matches) | set(self.triggers))

    def view(self, suspect):
        m = self.matches.get(suspect, [])
        t = self.triggers.get(suspect, [])
        return Evidence(
            distinct=len({e[1] for e in m}),
            detectors=[(e[2], e[3]) for e in m],
            valid_triggers=sum(1 for e in t if e[1]),
            invalid_triggers=sum(1 for e in t if not e[1]),
        )


@dataclass
class Evidence:
    distinct: int
    detectors: list
    valid_triggers: int
    invalid_triggers: int
    damage: bool = False


def regulate_action(evidence: Evidence, suspect, step=0, rule="two_signal", quarantine=10):
    """Decide what to do about ``suspect``.

    Returns ``(Action, duration)``.  A quarantined host whose time is up is
    disinfected.  Otherwise, under the two-signal rule a quarantine needs two
    distinct detector matches, or one match plus the damage flag.  Each valid
    control trigger counts as one more independent signal; forged triggers
    count for nothing.
    """
    if suspect.quarantined:
        return (Action.DISINFECT, 0) if step >= suspect.quarantine_until else (Action.NONE, 0)
    signals = evidence.distinct + evidence.valid_triggers
    if rule == "one_signal":
        act = signals >= 1
    else:
        act = signals >= 2 or (signals >= 1 and evidence.damage)
    return (Action.QUARANTINE, quarantine) if act else (Action.NONE, 0)


# --- gossip and securityware -------------------------------------------------

def gossip_detectors(node, neighbors, rng, prob, top_m, make_packet) -> list:
    """Valid-token control packets carrying ``node``'s best detectors, one per
    neighbor with probability ``prob``."""
    rep = node.repertoire
    if rep is None or prob <= 0.0:
        return []
    best = rep.top(top_m)
    if not best:
        return []
    return [make_packet(node.id, nb, best) for nb in neighbors if rng.random() < prob]


def merge_detectors(repertoire, detectors, sender, ids) -> int:
    """Merge received detectors by template identity, keeping the better
    state; new arrivals are recorded as imported from ``sender``."""
    changed = 0
    for d in detectors:
        held = repertoire.get(d.key)
        if held is None:
            lineage = d.lineage if d.offset is not None else Lineage("imported", sender)
            changed += repertoire.add(d.copy(id=next(ids), lineage=lineage))
        elif d.state > held.state:
            changed += repertoire.add(d)
    return changed


def propagate_securityware(host, peers, rng, prob, top_m, make_packet) -> list:
    """Securityware copies (with the sender's best detectors) to peers."""
    if not host.securityware or prob <= 0.0:
        return []
    payload = host.repertoire.top(top_m) if host.repertoire is not None else []
    return [make_packet(host.id, p, payload) for p in peers if rng.random() < prob]


def accept_securityware(host, rng, acceptance) -> bool:
    """A non-adopting endpoint installs received securityware with probability
    ``acceptance``; adoption is never undone."""
    if host.securityware:
        return False
    if rng.random() < acceptance:
        host.securityware = True
        host.endpoint_scanner = True
        return True
    return False


def census(repertoires) -> tuple:
    totals = [0, 0, 0]
    for rep in repertoires:
        for i, c in enumerate(rep.census()):
            totals[i] += c
    return tuple(totals[s] for s in (DetectorState.NAIVE, DetectorState.EFFECTOR, DetectorState.MEMORY))
