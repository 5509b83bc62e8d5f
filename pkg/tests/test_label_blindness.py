"""Defense decisions must not depend on ground-truth packet classes."""
import random
import sys

import pytest

from netimmune import defense, detection
from netimmune.detection import Detector, Repertoire
from netimmune.engine import run
from netimmune.experiments import reference
from netimmune.model import Host, Klass, NodeKind, Packet, Proto
from netimmune.signature import BitSignature

WATCHED = {defense.__name__, detection.__name__}


@pytest.fixture
def klass_reads(monkeypatch):
    """Record every read of ``Packet.klass`` made from defense code."""
    slot = Packet.__dict__["klass"]
    reads = []

    def get(self):
        caller = sys._getframe(1).f_globals.get("__name__")
        if caller in WATCHED:
            reads.append(caller)
        return slot.__get__(self, Packet)

    monkeypatch.setattr(Packet, "klass", property(get, slot.__set__))
    return reads


def test_full_run_never_reads_labels_in_defense_code(klass_reads):
    cfg = reference(**{
        "world.endpoints": 40, "world.routers": 6, "run.horizon": 40, "strain.mutation_rate": 0.05,
        "strain.forged_control_rate": 0.5, "traffic.spam_multiplier": 2.0,
        "defense.architectures": ["barrier", "blacklist", "endpoint", "router_filter", "p2p_securityware"],
    })
    res = run(cfg)
    last = res.timeseries[-1]
    assert last.malware_blocked + last.spam_blocked + last.legit_blocked > 0  # the defenses did act
    assert klass_reads == []


def test_permuted_labels_give_identical_decisions():
    rng = random.Random(0)
    L = 16
    token = 77
    dets = [Detector(i, BitSignature(rng.getrandbits(L), L), 5) for i in range(30)]
    router = Host(0, NodeKind.ROUTER, repertoire=Repertoire(L, dets))
    endpoint = Host(1, NodeKind.ENDPOINT, barrier=True, blacklist_subscriber=True, repertoire=Repertoire(L, dets))
    service = defense.BlacklistService(threshold=1)
    defense.blacklist_report(service, 0, 3)
    labels = list(Klass)
    for _ in range(300):
        payload = BitSignature(rng.getrandbits(L), L)
        proto = rng.choice(list(Proto))
        tok = rng.choice([None, token, token | 2**63])
        src = rng.randrange(6)
        port = rng.choice([80, 22])
        outcomes = set()
        for klass in labels:
            p = Packet(0, src, 1, payload, klass, proto=proto, port=port, token=tok)
            mark = defense.router_filter(router, [p], token)[0]
            scan = defense.endpoint_scan(endpoint, p)
            outcomes.add((
                None if mark is None else (mark.detector.id, mark.affinity),
                None if scan is None else (scan.detector.id, scan.affinity),
                defense.barrier_admit(endpoint, p, token),
                defense.blacklist_blocks(service, endpoint, p),
                defense.exempt(p, token),
            ))
        assert len(outcomes) == 1
