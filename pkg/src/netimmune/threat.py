"""Self-replicating malware: strains, infection, mutation and zombie traffic."""
from __future__ import annotations

from dataclasses import dataclass, field

from netimmune.model import CONTROL_PORT, ControlKind, HostState, Klass, Proto
from netimmune.rng import bernoulli_count, flip_mask
from netimmune.signature import BitSignature


@dataclass(frozen=True)
class MalwareStrain:
    id: int
    genome: BitSignature
    mu: float
    beta: float
    infectivity: float
    parent: int | None = None


@dataclass(frozen=True)
class InfectionEvent:
    step: int
    host: int
    strain: int
    packet: int | None  # None for a seeded infection


@dataclass
class StrainRegistry:
    """Strains that actually infected somebody, plus an id allocator."""

    strains: dict = field(default_factory=dict)
    next_id: int = 0

    def new_id(self) -> int:
        self.next_id += 1
        return self.next_id - 1

    def add(self, strain: MalwareStrain) -> None:
        self.strains.setdefault(strain.id, strain)

    def __getitem__(self, sid):
        return self.strains[sid]

    def lineage(self, sid) -> list:
        chain = [sid]
        while self.strains[chain[-1]].parent is not None:
            chain.append(self.strains[chain[-1]].parent)
        return chain


def try_infect(host, strain: MalwareStrain, rng) -> bool:
    """One admitted malware packet meets ``host``."""
    hit = rng.random() < host.vulnerability * strain.infectivity
    if host.state is not HostState.CLEAN or host.strain is not None:
        return False
    if hit:
        host.state = HostState.INFECTED
        host.strain = strain.id
    return hit


def replicate(strain: MalwareStrain, rng, registry: StrainRegistry | None = None) -> MalwareStrain:
    mask = flip_mask(strain.genome.length, strain.mu, rng)
    if not mask:
        return strain
    new_id = registry.new_id() if registry is not None else strain.id + 1
    return MalwareStrain(new_id, strain.genome.flip(mask), strain.mu, strain.beta,
                         strain.infectivity, parent=strain.id)


@dataclass
class ZombieProfile:
    """Scenario-wide settings shared by every infected host."""

    endpoints: list
    malware_fraction: float
    spam_mask: int
    spam_rate: float = 0.0  # extra spam per step on top of beta
    forged_control_rate: float = 0.0
    forged_dst: int = -1
    ttl: int = 64


def _target(host_id, endpoints, rng):
    # uniform over endpoints other than the sender
    n = len(endpoints)
    i = rng.randrange(n - 1)
    t = endpoints[i]
    return endpoints[n - 1] if t == host_id else t


def emit_malicious_traffic(host, strain: MalwareStrain, profile: ZombieProfile, rng, registry,
                           new_packet) -> list:
    """Malware, spam and forged control packets from one zombie for one step.

    ``new_packet(src, dst, payload, klass, **kw)`` allocates packet ids.
    """
    if len(profile.endpoints) < 2:
        return []
    out = []
    spam_payload = strain.genome.flip(profile.spam_mask)
    for _ in range(bernoulli_count(strain.beta, rng)):
        dst = _target(host.id, profile.endpoints, rng)
        if rng.random() < profile.malware_fraction:
            child = replicate(strain, rng, registry)
            out.append(new_packet(host.id, dst, child.genome, Klass.MALWARE, strain=child))
        else:
            out.append(new_packet(host.id, dst, spam_payload, Klass.SPAM))
    for _ in range(bernoulli_count(profile.spam_rate, rng)):
        dst = _target(host.id, profile.endpoints, rng)
        out.append(new_packet(host.id, dst, spam_payload, Klass.SPAM))
    app = len(out)
    if profile.forged_dst >= 0:
        for _ in range(bernoulli_count(profile.forged_control_rate, rng)):
            victim = _target(host.id, profile.endpoints, rng)
            payload = BitSignature(rng.getrandbits(strain.genome.length), strain.genome.length)
            out.append(new_packet(host.id, profile.forged_dst, payload, Klass.CONTROL,
                                  proto=Proto.CONTROL, port=CONTROL_PORT,
                                  token=rng.getrandbits(63) | 1 << 63,
                                  kind=ControlKind.TRIGGER, body=victim))
    host.emitted(app)
    return out
