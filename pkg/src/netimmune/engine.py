"""Synchronous, fixed-phase world stepping.

One call to :func:`step` runs these phases, each over entities in ascending
id order:

1. legitimate traffic generation
2. zombie emission (malware, spam, forged control)
3. security emission (router gossip, securityware)
4. one hop of routing, router content filtering on arrival
5. delivery through barrier, blacklist and endpoint scanner
6. infection resolution
7. lymph maturation of captured antigens
8. action regulation, quarantine release, self-scan, cleanup, decay
9. metrics record

Every random draw comes from a named stream (see :mod:`netimmune.rng`), so
the same ``(config, seed)`` always produces the same world.
"""
from __future__ import annotations

import concurrent.futures
import hashlib
import itertools
from collections import defaultdict
from dataclasses import dataclass, field

from netimmune import detection as det
from netimmune.config import ScenarioConfig
from netimmune.defense import (
    Action, ActionSignalSet, BlacklistService, Verdict, accept_securityware, barrier_admit,
    blacklist_blocks, blacklist_report, census, exempt, gossip_detectors, merge_detectors,
    propagate_securityware, regulate_action, token_valid,
)
from netimmune.metrics import MetricsRecord, Summary, summarize
from netimmune.model import (
    CONTROL_PORT, ControlKind, Host, HostState, Klass, NodeKind, Packet, Proto, SelfModel,
    sample_self_payload,
)
from netimmune.rng import bernoulli_count, derive_seed, np_stream, rng_stream
from netimmune.signature import BitSignature
from netimmune.threat import (
    InfectionEvent, MalwareStrain, StrainRegistry, ZombieProfile, emit_malicious_traffic,
    replicate, try_infect,
)
from netimmune.topology import build_topology, nearest

_SENT = {Klass.LEGIT: "legit_sent", Klass.SPAM: "spam_sent", Klass.MALWARE: "malware_sent",
         Klass.SECURITYWARE: "securityware_packets", Klass.CONTROL: "control_packets"}
_DELIVERED = {Klass.LEGIT: "legit_delivered", Klass.SPAM: "spam_delivered",
              Klass.MALWARE: "malware_delivered"}
_BLOCKED = {Klass.LEGIT: "legit_blocked", Klass.SPAM: "spam_blocked",
            Klass.MALWARE: "malware_blocked"}


@dataclass(frozen=True)
class QuarantineRecord:
    step: int
    host: int
    was_infected: bool
    distinct_matches: int
    damage: bool
    valid_triggers: int
    invalid_triggers: int


def replicate_seed(seed: int, replicate: int) -> int:
    return seed if replicate == 0 else derive_seed(seed, "replicate", replicate)


class World:
    def __init__(self, config: ScenarioConfig, replicate: int = 0):
        self.cfg = config
        self.seed = replicate_seed(config.run.seed, replicate)
        self.replicate = replicate
        self.step = 0
        self._streams = {}
        cfg, d = config, config.defense
        L = cfg.world.L
        self.L = L

        self.topo = build_topology(cfg, self.rng("topology"))
        self.next_hop = self.topo.next_hop.tolist()
        self.kinds = self.topo.kinds
        self.endpoint_ids = self.topo.endpoints
        self.router_ids = self.topo.routers
        self.lymph_ids = self.topo.ids(NodeKind.LYMPH)
        self.nearest_lymph = nearest(self.topo, NodeKind.LYMPH)

        rng = self.rng("self")
        self.self_model = SelfModel.random(L, cfg.self.clusters, cfg.self.radius, rng)
        rng = self.rng("self_training")
        self.self_training = [sample_self_payload(self.self_model, rng) for _ in range(cfg.self.training)]
        self.toolbox = det.make_toolbox(d.repertoire.toolbox_size, d.repertoire.segment_width,
                                        self.rng("toolbox"))
        self.token = self.rng("token").getrandbits(63)
        self.securityware_image = BitSignature(self.rng("image").getrandbits(L), L)

        self.registry = StrainRegistry()
        genome = (BitSignature(int(cfg.strain.genome, 16), L) if cfg.strain.genome != "random"
                  else BitSignature(self.rng("genome").getrandbits(L), L))
        self.root = MalwareStrain(self.registry.new_id(), genome, cfg.strain.mutation_rate,
                                  cfg.strain.beta, cfg.strain.infectivity)
        self.registry.add(self.root)
        spam_mask = (int(cfg.strain.spam_mask, 16) if cfg.strain.spam_mask != "random"
                     else self.rng("spam_mask").getrandbits(L))
        self.profile = ZombieProfile(
            endpoints=self.endpoint_ids, malware_fraction=cfg.strain.malware_fraction,
            spam_mask=spam_mask, spam_rate=cfg.traffic.spam_multiplier * cfg.traffic.legit_rate,
            forged_control_rate=cfg.strain.forged_control_rate,
            forged_dst=self.lymph_ids[0] if self.lymph_ids else -1, ttl=cfg.world.ttl,
        )

        self.patient_zero = cfg.run.patient_zero if cfg.run.patient_zero >= 0 else (
            self.endpoint_ids[0] if self.endpoint_ids else -1)
        self.det_ids = itertools.count()
        self.pids = itertools.count()
        self.base_r = {}
        self.hosts = [self._make_host(i, k) for i, k in enumerate(self.kinds)]
        self._adopt()

        self.packets = []
        self.blacklist = BlacklistService(d.blacklist.threshold)
        self.signals = ActionSignalSet(d.regulation.window)
        self.lymph = {i: det.LymphState(d.lymph.clones, d.lymph.mutation_rate, d.lymph.survivors,
                                        d.lymph.rounds, d.lymph.retention) for i in self.lymph_ids}
        self.lymph_gen = {i: np_stream(self.seed, "lymph", i) for i in self.lymph_ids}
        self.open_ports = tuple(int(p) for p in d.barrier.open_ports.split(","))
        self.counters = MetricsRecord()
        self.infections = []
        self.quarantines = []
        self.forged_received = 0
        self._quarantine_evidence = {}
        self.zero_streak = 0
        self.eliminated_at = None
        self.eliminations = []  # first step of each sustained zero run
        self.reinject_at = None
        self.reinjected_step = None

        if self.patient_zero >= 0:
            self._seed_infection(self.patient_zero)

    # -- construction -----------------------------------------------------

    def rng(self, purpose, entity=0):
        key = (purpose, entity)
        stream = self._streams.get(key)
        if stream is None:
            stream = self._streams[key] = rng_stream(self.seed, purpose, entity)
        return stream

    def _make_host(self, i, kind):
        w = self.cfg.world
        vuln = {NodeKind.ENDPOINT: w.vulnerability, NodeKind.ROUTER: w.router_vulnerability}.get(kind, 0.0)
        h = Host(i, kind, vuln)
        h.damage_window = type(h.damage_window)([0], maxlen=self.cfg.defense.regulation.window)
        return h

    def _pick(self, purpose, fraction, exclude=()):
        eps = [e for e in self.endpoint_ids if e not in exclude]
        k = round(fraction * len(self.endpoint_ids))
        k = min(k, len(eps))
        return set(self.rng("adoption", purpose).sample(eps, k))

    def _adopt(self):
        d = self.cfg.defense
        if d.active("barrier"):
            for i in self._pick("barrier", d.barrier.adoption):
                self.hosts[i].barrier = True
        if d.active("blacklist"):
            for i in self._pick("blacklist", d.blacklist.adoption):
                self.hosts[i].blacklist_subscriber = True
        # the attack starts on an unprotected machine
        spared = {self.patient_zero}
        scanners = self._pick("endpoint", d.endpoint.adoption, spared) if d.active("endpoint") else set()
        ware = set()
        if d.active("p2p_securityware"):
            ware = self._pick("securityware", d.p2p_securityware.initial_adoption, spared)
            if d.p2p_securityware.from_scanners:
                ware |= scanners
        for i in sorted(scanners | ware):
            h = self.hosts[i]
            h.endpoint_scanner = True
            h.securityware = i in ware
            self._install_repertoire(h, d.endpoint.repertoire_size, d.endpoint.r)
        if d.active("router_filter"):
            for i in self.router_ids:
                self._install_repertoire(self.hosts[i], d.router_filter.repertoire_size, d.router_filter.r)

    def _install_repertoire(self, host, n, r):
        d = self.cfg.defense.repertoire
        cands = det.generate_repertoire(n, self.L, self.rng("repertoire", host.id), self.toolbox,
                                        d.segment_width, r, self.det_ids)
        rep = det.Repertoire(self.L, det.censor_self(cands, self.self_training))
        if d.seed_signature:
            rep.add(det.Detector(next(self.det_ids), self.root.genome, d.signature_r,
                                 det.DetectorState.MEMORY, None, self.L, det.Lineage("signature")))
        host.repertoire = rep
        self.base_r[host.id] = r

    def _seed_infection(self, host_id):
        h = self.hosts[host_id]
        h.state = HostState.INFECTED
        h.strain = self.root.id
        self.infections.append(InfectionEvent(self.step, host_id, self.root.id, None))

    # -- packets ------------------------------------------------------------

    def new_packet(self, src, dst, payload, klass, **kw):
        kw.setdefault("ttl", self.cfg.world.ttl)
        p = Packet(next(self.pids), src, dst, payload, klass, **kw)
        field_name = _SENT[klass]
        setattr(self.counters, field_name, getattr(self.counters, field_name) + 1)
        return p

    def _gossip_packet(self, src, dst, detectors):
        return self.new_packet(src, dst, self.securityware_image, Klass.CONTROL, proto=Proto.CONTROL,
                               port=CONTROL_PORT, token=self.token, kind=ControlKind.GOSSIP,
                               body=[d.copy() for d in detectors])

    def _securityware_packet(self, src, dst, detectors):
        return self.new_packet(src, dst, self.securityware_image, Klass.SECURITYWARE,
                               proto=Proto.SECURITYWARE, port=CONTROL_PORT, token=self.token,
                               body=[d.copy() for d in detectors])

    def _count(self, table, klass):
        name = table.get(klass)
        if name:
            setattr(self.counters, name, getattr(self.counters, name) + 1)

    # -- queries --------------------------------------------------------------

    def holders(self):
        return [h for h in self.hosts if h.repertoire is not None]

    def malware_in_flight(self):
        return sum(1 for p in self.packets if p.klass is Klass.MALWARE)

    def digest(self) -> str:
        """Hash of the full mutable state, for determinism checks."""
        h = hashlib.sha256()
        h.update(repr(self.step).encode())
        for host in self.hosts:
            h.update(repr((host.id, host.state.value, host.strain, host.quarantine_until,
                           host.endpoint_scanner, host.securityware, tuple(host.damage_window))).encode())
            if host.repertoire is not None:
                for d in host.repertoire.ordered():
                    h.update(repr((d.id, d.key, d.state.value, d.expires_at, d.affinity_best)).encode())
        for p in self.packets:
            h.update(repr((p.pid, p.src, p.dst, p.cur, p.payload.bits, int(p.klass), p.hops_remaining)).encode())
        h.update(repr(sorted(self.blacklist.blocked)).encode())
        return h.hexdigest()


# --- phases -----------------------------------------------------------------

def _legit_traffic(w: World):
    rate = w.cfg.traffic.legit_rate
    eps = w.endpoint_ids
    if len(eps) < 2:
        return
    n = len(eps)
    for i in eps:
        h = w.hosts[i]
        if h.quarantined:
            continue
        rng = w.rng("legit", i)
        k = bernoulli_count(rate, rng)
        for _ in range(k):
            t = eps[rng.randrange(n - 1)]
            dst = eps[-1] if t == i else t
            w.packets.append(w.new_packet(i, dst, sample_self_payload(w.self_model, rng), Klass.LEGIT))
        h.emitted(k)


def _malicious_traffic(w: World):
    for h in w.hosts:
        if h.strain is None or h.quarantined:
            continue
        strain = w.registry[h.strain]
        w.packets.extend(emit_malicious_traffic(h, strain, w.profile, w.rng("zombie", h.id),
                                                w.registry, w.new_packet))


def _security_traffic(w: World):
    d = w.cfg.defense
    if d.active("router_filter") and d.gossip.enabled:
        for i in w.router_ids:
            h = w.hosts[i]
            nbrs = [n for n in w.topo.neighbors[i] if w.kinds[n] is NodeKind.ROUTER]
            w.packets.extend(gossip_detectors(h, nbrs, w.rng("gossip", i), d.gossip.prob,
                                              d.gossip.top_m, w._gossip_packet))
    if d.active("p2p_securityware"):
        sw = d.p2p_securityware
        for i in w.endpoint_ids:
            h = w.hosts[i]
            if h.securityware:
                w.packets.extend(propagate_securityware(h, w.topo.contacts.get(i, []),
                                                        w.rng("securityware", i), sw.send_prob,
                                                        sw.top_m, w._securityware_packet))


def _drop(w: World, p, holder, detector):
    p.marked = True
    w._count(_BLOCKED, p.klass)
    w.signals.add_match(w.step, p.src, holder, detector)
    if p.src in w._quarantine_evidence:
        # traffic still in flight from a quarantined host: this detector
        # takes part in the elimination too
        w._quarantine_evidence[p.src].append((holder, detector))
    d = w.cfg.defense
    if d.active("blacklist"):
        blacklist_report(w.blacklist, holder, p.src)
    if d.lymph.enabled:
        lymph = w.nearest_lymph[holder]
        if lymph >= 0:
            w.lymph[lymph].capture(p.payload, w.step, holder, detector)


def _route(w: World):
    filtering = w.cfg.defense.active("router_filter")
    hosts, kinds, nh = w.hosts, w.kinds, w.next_hop
    arrivals, deliveries = [], []
    kept = []
    for p in w.packets:
        nxt = nh[p.cur][p.dst]
        p.cur = nxt
        p.hops_remaining -= 1
        if nxt == p.dst:
            deliveries.append(p)
            continue
        if p.hops_remaining <= 0:
            w._count(_BLOCKED, p.klass)
            continue
        kept.append(p)
        if filtering and kinds[nxt] is NodeKind.ROUTER and not exempt(p, w.token):
            arrivals.append(p)
    w.packets = kept
    if arrivals:
        arrivals.sort(key=lambda p: (p.cur, p.pid))
        jobs = [(hosts[p.cur].repertoire, p.payload) for p in arrivals]
        for p, hit in zip(arrivals, det.scan_many(jobs)):
            if hit is not None:
                _drop(w, p, p.cur, hit)
    return deliveries


def _deliver(w: World, deliveries):
    d = w.cfg.defense
    deliveries.sort(key=lambda p: (p.dst, p.pid))
    admitted = []
    for p in deliveries:
        h = w.hosts[p.dst]
        if h.barrier and barrier_admit(h, p, w.token, w.open_ports) is Verdict.DENY:
            w._count(_BLOCKED, p.klass)
            continue
        if blacklist_blocks(w.blacklist, h, p):
            w._count(_BLOCKED, p.klass)
            continue
        admitted.append(p)
    scanned = [p for p in admitted if w.hosts[p.dst].kind is NodeKind.ENDPOINT
               and w.hosts[p.dst].repertoire is not None and not exempt(p, w.token)]
    hits = det.scan_many([(w.hosts[p.dst].repertoire, p.payload) for p in scanned])
    marked = {id(p) for p, hit in zip(scanned, hits) if hit is not None}
    for p, hit in zip(scanned, hits):
        if hit is not None:
            _drop(w, p, p.dst, hit)
    infections = []
    for p in admitted:
        if id(p) in marked:
            continue
        h = w.hosts[p.dst]
        if p.proto is Proto.APP:
            w._count(_DELIVERED, p.klass)
            if p.klass is Klass.MALWARE:
                infections.append(p)
        elif p.proto is Proto.SECURITYWARE:
            if token_valid(p, w.token) and h.kind is NodeKind.ENDPOINT:
                _receive_securityware(w, h, p)
        elif p.kind is ControlKind.TRIGGER:
            valid = token_valid(p, w.token)
            w.signals.add_trigger(w.step, p.body, valid)
            w.forged_received += not valid
        elif p.kind is ControlKind.GOSSIP and token_valid(p, w.token) and h.repertoire is not None:
            merge_detectors(h.repertoire, p.body, p.src, w.det_ids)
    return infections


def _receive_securityware(w: World, h, p):
    sw = w.cfg.defense.p2p_securityware
    if not h.securityware:
        if not accept_securityware(h, w.rng("accept", h.id), sw.acceptance):
            return
        if h.repertoire is None:
            ep = w.cfg.defense.endpoint
            w._install_repertoire(h, ep.repertoire_size, ep.r)
    merge_detectors(h.repertoire, p.body, p.src, w.det_ids)


def _infect(w: World, packets):
    for p in packets:
        h = w.hosts[p.dst]
        if try_infect(h, p.strain, w.rng("infect", h.id)):
            w.registry.add(p.strain)
            w.infections.append(InfectionEvent(w.step, h.id, p.strain.id, p.pid))


def _mature(w: World):
    d = w.cfg.defense
    if not d.lymph.enabled:
        return
    lifespan = d.repertoire.effector_lifespan
    for lid in w.lymph_ids:
        lymph = w.lymph[lid]
        todo, seen = [], set()
        # genomes presented by quarantined hosts first, then this step's drops
        pending = sorted((c for c in lymph.captured
                          if (c.suspect is not None and not c.done) or c.step == w.step),
                         key=lambda c: c.suspect is None)
        for cap in pending:
            key = (cap.antigen.bits, cap.holder)
            if key in seen or (cap.suspect is None and key in lymph.matured):
                cap.done = True
                continue
            seen.add(key)
            todo.append(cap)
        todo = todo[: d.lymph.max_per_step]
        jobs = []
        for cap in todo:
            cap.done = True
            lymph.matured[(cap.antigen.bits, cap.holder)] = w.step
            seed = cap.seed
            if seed.offset is not None:
                seed = seed.copy(offset=None, r=w.base_r[cap.holder])
            jobs.append(([seed], cap.antigen))
        matured = det.mature_many(lymph, jobs, w.lymph_gen[lid], step=w.step, lifespan=lifespan,
                                  ids=w.det_ids)
        batches = []
        for cap, fresh in zip(todo, matured):
            if d.lymph.fragments:
                fresh += det.fragment_detectors(cap.antigen, d.lymph.fragments, d.lymph.fragment_width,
                                                step=w.step, lifespan=lifespan, ids=w.det_ids)
            batches.append(fresh)
        kept = set(map(id, det.censor_self([x for b in batches for x in b], w.self_training)))
        for cap, fresh in zip(todo, batches):
            fresh = [x for x in fresh if id(x) in kept]
            rep = w.hosts[cap.holder].repertoire
            if fresh and rep is not None:
                for dd in fresh:
                    rep.add(dd)
                w.counters.control_packets += 1  # lymph -> holder update
                if cap.suspect in w._quarantine_evidence:
                    w._quarantine_evidence[cap.suspect].extend((cap.holder, dd) for dd in fresh)
        lymph.evict(w.step)


def _present(w: World, h, detectors):
    """Show the quarantined host's strain genome to the lymph service of
    each holder whose detectors caught it."""
    if not w.cfg.defense.lymph.enabled:
        return
    genome = w.registry[h.strain].genome
    done = set()
    for holder, d in detectors:
        lymph = w.nearest_lymph[holder]
        if holder in done or lymph < 0:
            continue
        done.add(holder)
        w.lymph[lymph].capture(genome, w.step, holder, d, suspect=h.id)


def _disinfect(w: World, h, detectors):
    strain = h.strain
    h.state = HostState.CLEAN
    h.strain = None
    h.quarantine_until = -1
    if strain is not None and w.cfg.defense.memory.enabled:
        evidence = det.Elimination(strain, w.step)
        for holder, d in detectors:
            rep = w.hosts[holder].repertoire
            if rep is not None:
                det.promote_memory(rep, d, evidence)


def _regulate_and_clean(w: World):
    d = w.cfg.defense
    reg = d.regulation
    if d.regulation_on:
        for suspect in w.signals.suspects():
            h = w.hosts[suspect]
            if h.kind is not NodeKind.ENDPOINT or h.quarantined:
                continue
            ev = w.signals.view(suspect)
            ev.damage = h.damage() >= reg.damage_threshold
            action, duration = regulate_action(ev, h, w.step, reg.rule, reg.quarantine)
            if action is Action.QUARANTINE:
                h.state = HostState.QUARANTINED
                h.quarantine_until = w.step + duration
                w.quarantines.append(QuarantineRecord(w.step, h.id, h.strain is not None, ev.distinct,
                                                      ev.damage, ev.valid_triggers, ev.invalid_triggers))
                w._quarantine_evidence[h.id] = list(ev.detectors)
                if h.strain is not None:
                    _present(w, h, ev.detectors)
                w.signals.clear(suspect)
    for h in w.hosts:
        if h.quarantined:
            action, _ = regulate_action(None, h, w.step)
            if action is Action.DISINFECT:
                _disinfect(w, h, w._quarantine_evidence.pop(h.id, []))
    # endpoint scanners also scan their own host
    scanners = [h for h in w.hosts if h.strain is not None and not h.quarantined
                and h.repertoire is not None and h.kind is NodeKind.ENDPOINT]
    hits = det.scan_many([(h.repertoire, w.registry[h.strain].genome) for h in scanners])
    for h, hit in zip(scanners, hits):
        if hit is not None:
            _disinfect(w, h, [(h.id, hit)])
    cleanup(w)


def cleanup(w: World):
    """Purge marked packets, decay effectors, expire stale evidence."""
    w.packets = [p for p in w.packets if not p.marked]
    for h in w.hosts:
        if h.repertoire is not None:
            det.decay(h.repertoire, w.step)
    for lymph in w.lymph.values():
        lymph.evict(w.step)
    w.signals.expire(w.step + 1)
    return w


def record(w: World) -> MetricsRecord:
    c = w.counters
    rec = MetricsRecord(**{k: getattr(c, k) for k in c.__dataclass_fields__})
    rec.step = w.step
    infected = [h for h in w.hosts if h.strain is not None]
    rec.infected_count = len(infected)
    rec.quarantined_count = sum(1 for h in w.hosts if h.quarantined)
    rec.adopter_count = sum(1 for h in w.hosts if h.kind is NodeKind.ENDPOINT and h.adopter)
    rec.detectors_naive, rec.detectors_effector, rec.detectors_memory = census(
        h.repertoire for h in w.hosts if h.repertoire is not None)
    rec.distinct_strains_alive = len({h.strain for h in infected})
    rec.reports_filed = w.blacklist.filed
    return rec


def step(w: World) -> MetricsRecord:
    w.step += 1
    for h in w.hosts:
        h.damage_window.append(0)
    _legit_traffic(w)
    _malicious_traffic(w)
    _security_traffic(w)
    deliveries = _route(w)
    infections = _deliver(w, deliveries)
    _infect(w, infections)
    _mature(w)
    _regulate_and_clean(w)
    rec = record(w)
    _track_elimination(w, rec)
    if w.reinject_at is not None and w.step == w.reinject_at:
        _reinject(w)
    return rec


def _reinject(w: World):
    """Seed the root strain at patient zero again.  Like the initial seeding
    at step 0, it happens after the step's record, so the host first emits
    in the next step and both episodes are timed the same way."""
    h = w.hosts[w.patient_zero] if w.patient_zero >= 0 else None
    if h is not None and h.strain is None:
        h.state = HostState.INFECTED
        h.quarantine_until = -1
        h.strain = w.root.id
        w.infections.append(InfectionEvent(w.step, h.id, w.root.id, None))
    w.reinjected_step = w.step
    w.reinject_at = None
    w.eliminated_at = None
    w.zero_streak = 0


def _track_elimination(w: World, rec):
    if rec.infected_count == 0 and w.malware_in_flight() == 0:
        w.zero_streak += 1
    else:
        w.zero_streak = 0
    if w.zero_streak == w.cfg.run.cooldown and w.eliminated_at is None:
        w.eliminated_at = w.step - w.cfg.run.cooldown + 1
        w.eliminations.append(w.eliminated_at)
        if w.cfg.run.reinject_after >= 0 and w.reinjected_step is None:
            w.reinject_at = max(w.eliminated_at + w.cfg.run.reinject_after, w.step)


def finished(w: World) -> bool:
    return w.eliminated_at is not None and w.reinject_at is None


# --- runs ---------------------------------------------------------------------

@dataclass
class RunResult:
    replicate: int
    timeseries: list
    summary: Summary
    reinjected_step: int | None = None
    infections: list = field(default_factory=list)
    quarantines: list = field(default_factory=list)
    forged_received: int = 0
    eliminations: list = field(default_factory=list)
    world: World | None = None


def run(config: ScenarioConfig, replicate: int = 0, *, keep_world: bool = False,
        on_step=None) -> RunResult:
    w = World(config, replicate)
    series = []
    for _ in range(config.run.horizon):
        rec = step(w)
        series.append(rec)
        if on_step is not None:
            on_step(w, rec)
        if config.run.early_stop and finished(w):
            break
    return RunResult(replicate, series, summarize(series, config.run.cooldown), w.reinjected_step,
                     w.infections, w.quarantines, w.forged_received, w.eliminations,
                     w if keep_world else None)


def _run_one(args):
    config, i = args
    return run(config, i)


def run_replicates(config: ScenarioConfig, n: int | None = None, parallel: bool = False,
                   workers: int | None = None) -> list:
    """All replicates of a scenario, ordered by replicate id whatever the
    schedule."""
    n = config.run.replicates if n is None else n
    jobs = [(config, i) for i in range(n)]
    if parallel and n > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_one, jobs))
    else:
        results = [_run_one(j) for j in jobs]
    return sorted(results, key=lambda r: r.replicate)
