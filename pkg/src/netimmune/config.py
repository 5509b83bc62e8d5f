"""Scenario configuration.

The text format is one ``section.key = value`` assignment per line, ``#``
starts a comment.  Sections are ``world``, ``self``, ``traffic``, ``strain``,
``defense`` (only ``defense.architectures``), ``defense.<layer>`` and ``run``.
Omitted keys keep their defaults; unknown keys are rejected.
"""
import dataclasses
import typing
from dataclasses import dataclass, field

ARCHITECTURES = ("barrier", "blacklist", "endpoint", "router_filter", "p2p_securityware")
MAX_L = 64


class ConfigError(ValueError):
    """Raised with every problem found, each as ``"<where>: <message>"``."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("invalid configuration:\n  " + "\n  ".join(self.errors))


@dataclass
class WorldConfig:
    L: int = 64
    endpoints: int = 200
    routers: int = 20
    extra_edges: int = 10  # backbone edges beyond the spanning tree
    attachment: int = 1  # access routers per endpoint
    lymph_nodes: int = 1
    contacts: int = 2  # random peer links per endpoint beyond the contact ring
    vulnerability: float = 0.8
    router_vulnerability: float = 0.0
    ttl: int = 64


@dataclass
class SelfConfig:
    clusters: int = 4
    radius: float = 0.01
    training: int = 1024


@dataclass
class TrafficConfig:
    legit_rate: float = 0.5
    spam_multiplier: float = 0.0  # zombie spam per step, as a multiple of legit_rate


@dataclass
class StrainConfig:
    genome: str = "random"  # hex, or "random"
    mutation_rate: float = 0.0
    beta: float = 2.0
    infectivity: float = 0.8
    malware_fraction: float = 0.5
    spam_mask: str = "random"
    forged_control_rate: float = 0.0


@dataclass
class BarrierConfig:
    adoption: float = 1.0
    open_ports: str = "80"


@dataclass
class BlacklistConfig:
    threshold: int = 3
    adoption: float = 1.0


@dataclass
class EndpointConfig:
    adoption: float = 0.6
    repertoire_size: int = 100
    r: int = 12


@dataclass
class RouterFilterConfig:
    repertoire_size: int = 100
    r: int = 16


@dataclass
class SecuritywareConfig:
    from_scanners: bool = True
    initial_adoption: float = 0.0
    send_prob: float = 0.2
    acceptance: float = 0.8
    top_m: int = 8


@dataclass
class RepertoireConfig:
    toolbox_size: int = 256
    segment_width: int = 8
    seed_signature: bool = False  # holders start with a detector for the root genome
    signature_r: int = 24
    effector_lifespan: int = 40


@dataclass
class LymphConfig:
    enabled: bool = True
    clones: int = 50
    mutation_rate: float = 0.015625
    survivors: int = 5
    rounds: int = 10
    retention: int = 20
    max_per_step: int = 4
    fragments: int = 4
    fragment_width: int = 16


@dataclass
class GossipConfig:
    enabled: bool = True
    prob: float = 0.5
    top_m: int = 8


@dataclass
class RegulationConfig:
    enabled: str = "auto"  # auto: on iff router_filter is active
    rule: str = "two_signal"
    window: int = 3
    damage_threshold: int = 5
    quarantine: int = 10


@dataclass
class MemoryConfig:
    enabled: bool = True


@dataclass
class DefenseConfig:
    architectures: list = field(default_factory=list)
    barrier: BarrierConfig = field(default_factory=BarrierConfig)
    blacklist: BlacklistConfig = field(default_factory=BlacklistConfig)
    endpoint: EndpointConfig = field(default_factory=EndpointConfig)
    router_filter: RouterFilterConfig = field(default_factory=RouterFilterConfig)
    p2p_securityware: SecuritywareConfig = field(default_factory=SecuritywareConfig)
    repertoire: RepertoireConfig = field(default_factory=RepertoireConfig)
    lymph: LymphConfig = field(default_factory=LymphConfig)
    gossip: GossipConfig = field(default_factory=GossipConfig)
    regulation: RegulationConfig = field(default_factory=RegulationConfig)
    memory: MemoryConfig = field(default_factory=MemoryConfig)

    def active(self, name):
        return name in self.architectures

    @property
    def regulation_on(self):
        if self.regulation.enabled == "auto":
            return self.active("router_filter")
        return self.regulation.enabled == "true"


@dataclass
class RunConfig:
    horizon: int = 500
    seed: int = 0
    replicates: int = 1
    cooldown: int = 10
    early_stop: bool = True
    reinject_after: int = -1
    patient_zero: int = -1  # -1: lowest-id endpoint


@dataclass
class ScenarioConfig:
    world: WorldConfig = field(default_factory=WorldConfig)
    self: SelfConfig = field(default_factory=SelfConfig)
    traffic: TrafficConfig = field(default_factory=TrafficConfig)
    strain: StrainConfig = field(default_factory=StrainConfig)
    defense: DefenseConfig = field(default_factory=DefenseConfig)
    run: RunConfig = field(default_factory=RunConfig)

    def replace(self, **assignments) -> "ScenarioConfig":
        """Copy with dotted-key overrides, e.g. ``replace(**{"world.L": 32})``."""
        text = serialize_config(self) + "".join(
            f"{k} = {_format(v)}\n" for k, v in assignments.items()
        )
        return parse_config(text)


def _leaves(obj, prefix=""):
    """Yield ``(dotted_key, type, value)`` for every scalar setting."""
    hints = typing.get_type_hints(type(obj))
    for f in dataclasses.fields(obj):
        value = getattr(obj, f.name)
        key = f"{prefix}{f.name}"
        if dataclasses.is_dataclass(value):
            yield from _leaves(value, key + ".")
        else:
            yield key, hints[f.name], value


def config_keys():
    return [k for k, _, _ in _leaves(ScenarioConfig())]


def _format(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (list, tuple)):
        return ", ".join(str(v) for v in value)
    return str(value)


def _coerce(kind, text):
    if kind is bool:
        low = text.lower()
        if low not in ("true", "false"):
            raise ValueError(f"expected true/false, got {text!r}")
        return low == "true"
    if kind is int:
        return int(text, 0)
    if kind is float:
        return float(text)
    if kind is list:
        return [part.strip() for part in text.split(",") if part.strip()]
    return text


def _assign(cfg, key, value):
    *path, last = key.split(".")
    obj = cfg
    for name in path:
        obj = getattr(obj, name)
    setattr(obj, last, value)


def parse_config(text: str) -> ScenarioConfig:
    cfg = ScenarioConfig()
    kinds = {k: t for k, t, _ in _leaves(cfg)}
    errors = []
    seen = {}
    lines = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            errors.append(f"line {lineno}: expected 'section.key = value', got {raw.strip()!r}")
            continue
        key, _, value = (part.strip() for part in line.partition("="))
        if key not in kinds:
            errors.append(f"line {lineno}: unknown key {key!r}")
            continue
        try:
            seen[key] = _coerce(kinds[key], value)
            lines[key] = lineno
        except ValueError as exc:
            errors.append(f"line {lineno}: {key}: {exc}")
    for key, value in seen.items():
        _assign(cfg, key, value)
    for key, message in validate(cfg):
        where = f"line {lines[key]}: " if key in lines else ""
        errors.append(f"{where}{key}: {message}")
    if errors:
        raise ConfigError(errors)
    return cfg


def serialize_config(cfg: ScenarioConfig) -> str:
    return "".join(f"{key} = {_format(value)}\n" for key, _, value in _leaves(cfg))


def _is_hex(text):
    try:
        int(text, 16)
    except ValueError:
        return False
    return True


def validate(cfg: ScenarioConfig) -> list:
    """Every violated constraint as a ``(key, message)`` pair."""
    out = []
    w, d = cfg.world, cfg.defense

    def need(ok, key, message):
        if not ok:
            out.append((key, message))

    probabilities = [
        "world.vulnerability", "world.router_vulnerability", "self.radius",
        "strain.mutation_rate", "strain.infectivity", "strain.malware_fraction",
        "defense.barrier.adoption", "defense.blacklist.adoption", "defense.endpoint.adoption",
        "defense.p2p_securityware.initial_adoption", "defense.p2p_securityware.send_prob",
        "defense.p2p_securityware.acceptance", "defense.lymph.mutation_rate", "defense.gossip.prob",
    ]
    leaves = {k: v for k, _, v in _leaves(cfg)}
    for key in probabilities:
        need(0.0 <= leaves[key] <= 1.0, key, f"must be a probability in [0, 1], got {leaves[key]}")
    for key, value in leaves.items():
        if isinstance(value, (int, float)) and not isinstance(value, bool):
            if key not in ("run.reinject_after", "run.patient_zero"):
                need(value >= 0, key, f"must be non-negative, got {value}")

    need(1 <= w.L <= MAX_L, "world.L", f"must be in [1, {MAX_L}], got {w.L}")
    L_ok = 1 <= w.L <= MAX_L
    need(not (w.endpoints > 0 and w.routers < 1), "world.routers",
         "at least one router is required when endpoints are present")
    need(w.attachment >= 1, "world.attachment", "must be >= 1")
    need(w.routers == 0 or w.attachment <= w.routers, "world.attachment", "cannot exceed world.routers")
    need(w.ttl >= 1, "world.ttl", "must be >= 1")
    need(cfg.self.clusters >= 1, "self.clusters", "need at least one self cluster")
    for key in ("defense.endpoint.r", "defense.router_filter.r", "defense.repertoire.signature_r"):
        need(1 <= leaves[key] and (not L_ok or leaves[key] <= w.L), key, f"must satisfy 1 <= r <= L, got {leaves[key]}")
    sw = d.repertoire.segment_width
    need(not L_ok or (sw >= 1 and w.L % sw == 0), "defense.repertoire.segment_width",
         f"must divide world.L ({w.L}), got {sw}")
    need(d.repertoire.toolbox_size >= 1, "defense.repertoire.toolbox_size", "must be >= 1")
    need(d.lymph.survivors >= 1, "defense.lymph.survivors", "must be >= 1")
    need(d.lymph.survivors <= d.lymph.clones, "defense.lymph.survivors", "survivors k must not exceed clones C")
    need(1 <= d.lymph.fragment_width and (not L_ok or d.lymph.fragment_width <= w.L),
         "defense.lymph.fragment_width", "must satisfy 1 <= width <= L")
    need(d.blacklist.threshold >= 1, "defense.blacklist.threshold", "must be >= 1")
    need(d.regulation.enabled in ("auto", "true", "false"), "defense.regulation.enabled",
         "must be auto, true or false")
    need(d.regulation.rule in ("two_signal", "one_signal"), "defense.regulation.rule",
         "must be two_signal or one_signal")
    need(d.regulation.window >= 1, "defense.regulation.window", "must be >= 1")
    for arch in d.architectures:
        need(arch in ARCHITECTURES, "defense.architectures",
             f"unknown architecture {arch!r} (choose from {', '.join(ARCHITECTURES)})")
    for key in ("strain.genome", "strain.spam_mask"):
        value = leaves[key]
        if value != "random":
            ok = _is_hex(value) and L_ok and int(value, 16) >> w.L == 0
            need(ok, key, f"must be 'random' or a hex value of at most L={w.L} bits")
    for port in d.barrier.open_ports.split(","):
        need(port.strip().isdigit(), "defense.barrier.open_ports", f"bad port {port!r}")
    need(cfg.run.reinject_after >= -1, "run.reinject_after", "must be -1 (off) or >= 0")
    need(cfg.run.replicates >= 1, "run.replicates", "must be >= 1")
    need(cfg.run.cooldown >= 1, "run.cooldown", "must be >= 1")
    need(0 <= cfg.run.seed < 2**64, "run.seed", "must fit in 64 bits")
    pz = cfg.run.patient_zero
    need(pz == -1 or w.routers <= pz < w.routers + w.endpoints, "run.patient_zero",
         "must be -1 or an endpoint id")
    return out
