"""Hosts, packets and the traffic self-model."""
from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass, field

from netimmune.rng import flip_mask
from netimmune.signature import BitSignature


class NodeKind(enum.Enum):
    ENDPOINT = "endpoint"
    ROUTER = "router"
    LYMPH = "lymph"


class HostState(enum.Enum):
    CLEAN = "clean"
    INFECTED = "infected"
    QUARANTINED = "quarantined"


class Klass(enum.IntEnum):
    """Ground-truth packet class; read only by metrics and infection physics."""

    LEGIT = 0
    SPAM = 1
    MALWARE = 2
    SECURITYWARE = 3
    CONTROL = 4


class Proto(enum.IntEnum):
    """Protocol header visible to every defense."""

    APP = 0
    SECURITYWARE = 1
    CONTROL = 2


class ControlKind(enum.Enum):
    GOSSIP = "gossip"
    TRIGGER = "trigger"
    UPDATE = "update"


APP_PORT = 80
CONTROL_PORT = 7


@dataclass(eq=False)
class Host:
    id: int
    kind: NodeKind
    vulnerability: float = 0.0
    barrier: bool = False
    blacklist_subscriber: bool = False
    endpoint_scanner: bool = False
    securityware: bool = False
    state: HostState = HostState.CLEAN
    strain: int | None = None
    quarantine_until: int = -1
    repertoire: object = None
    # per-step emission counts over the corroboration window
    damage_window: deque = field(default_factory=lambda: deque([0], maxlen=3))

    @property
    def infected(self) -> bool:
        return self.strain is not None

    @property
    def quarantined(self) -> bool:
        return self.state is HostState.QUARANTINED

    @property
    def adopter(self) -> bool:
        return self.endpoint_scanner or self.securityware

    def emitted(self, n: int) -> None:
        self.damage_window[-1] += n

    def damage(self) -> int:
        return sum(self.damage_window)


class Packet:
    __slots__ = (
        "pid", "src", "dst", "payload", "klass", "strain", "proto", "port",
        "token", "hops_remaining", "cur", "marked", "kind", "body",
    )

    def __init__(self, pid, src, dst, payload, klass, *, strain=None, proto=Proto.APP,
                 port=APP_PORT, token=None, ttl=64, kind=None, body=None):
        self.pid = pid
        self.src = src
        self.dst = dst
        self.payload = payload
        self.klass = klass
        self.strain = strain  # MalwareStrain carried by a malware packet
        self.proto = proto
        self.port = port
        self.token = token
        self.hops_remaining = ttl
        self.cur = src
        self.marked = False
        self.kind = kind
        self.body = body

    def __repr__(self):
        return (f"Packet(pid={self.pid}, {self.src}->{self.dst} @ {self.cur}, "
                f"{self.klass.name}, payload={self.payload.to_hex()})")


@dataclass
class SelfModel:
    centers: list
    radius: float

    @classmethod
    def random(cls, L, clusters, radius, rng):
        centers = [BitSignature(rng.getrandbits(L), L) for _ in range(clusters)]
        return cls(centers, radius)


def sample_self_payload(model: SelfModel, rng) -> BitSignature:
    """A legitimate payload: a random cluster center with per-bit noise."""
    if not model.centers:
        raise ValueError("self model has no cluster centers")
    center = model.centers[rng.randrange(len(model.centers))]
    return center.flip(flip_mask(center.length, model.radius, rng))
