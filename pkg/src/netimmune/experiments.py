"""Scenario builders and measurements for the comparison experiments.

Every experiment runs configurations on paired seeds: seed ``s`` drives the
same topology, self model, strain genome and traffic streams in each arm, so
arms differ only in the defenses being compared.
"""
from __future__ import annotations

import statistics
from dataclasses import dataclass, field

from netimmune.config import ScenarioConfig
from netimmune.engine import RunResult, run

SEEDS = tuple(range(20))


def reference(**overrides) -> ScenarioConfig:
    """The reference scenario: 200 endpoints, 20 routers, L=64, one
    unmutating strain (vulnerability 0.8, infectivity 0.8, beta 2), 500 steps,
    no defenses.  ``overrides`` use dotted keys, e.g. ``{"run.seed": 3}``."""
    base = ScenarioConfig().replace(**{
        "world.L": 64, "world.endpoints": 200, "world.routers": 20,
        "world.vulnerability": 0.8, "strain.infectivity": 0.8, "strain.beta": 2,
        "strain.mutation_rate": 0.0, "run.horizon": 500, "defense.architectures": [],
    })
    return base.replace(**overrides) if overrides else base


def architecture(name: str, **overrides) -> ScenarioConfig:
    """Reference scenario with one of the compared defense set-ups."""
    presets = {
        "none": {},
        "barrier": {"defense.architectures": ["barrier"]},
        "endpoint": {"defense.architectures": ["endpoint"], "defense.endpoint.adoption": 0.6},
        "router_filter": {"defense.architectures": ["router_filter"]},
        "endpoint_low": {"defense.architectures": ["endpoint"], "defense.endpoint.adoption": 0.3},
        "endpoint_low+securityware": {
            "defense.architectures": ["endpoint", "p2p_securityware"],
            "defense.endpoint.adoption": 0.3, "defense.p2p_securityware.acceptance": 0.8,
        },
    }
    if name not in presets:
        raise KeyError(f"unknown preset {name!r}; choose from {', '.join(presets)}")
    return reference(**{**presets[name], **overrides})


def arms_race(adaptive: bool, **overrides) -> ScenarioConfig:
    """Fast-mutating strain (4 expected bit flips per copy) against routers
    that start with only the root strain's published signature.  The static
    arm switches off lymph maturation and gossip."""
    return reference(**{
        "strain.mutation_rate": 4 / 64,
        "strain.malware_fraction": 1.0,
        "defense.architectures": ["router_filter"],
        "defense.router_filter.repertoire_size": 0,
        "defense.repertoire.seed_signature": True,
        "defense.repertoire.signature_r": 32,
        "defense.lymph.enabled": adaptive,
        "defense.gossip.enabled": adaptive,
        **overrides,
    })


def recall(**overrides) -> ScenarioConfig:
    """Router filtering with the strain re-injected at patient zero 100 steps
    after it was first eliminated."""
    return architecture("router_filter", **{"run.reinject_after": 100, **overrides})


def calibration(**overrides) -> ScenarioConfig:
    """No defenses, every endpoint quickly becomes a zombie whose only
    malicious payload is malware, plus spam at ten times the legitimate
    per-host rate."""
    return reference(**{
        "world.vulnerability": 1.0, "strain.infectivity": 1.0, "strain.malware_fraction": 1.0,
        "traffic.spam_multiplier": 10.0, **overrides,
    })


def with_seed(config: ScenarioConfig, seed: int) -> ScenarioConfig:
    return config.replace(**{"run.seed": seed})


# --- measurements -----------------------------------------------------------

def final_prevalence(result: RunResult) -> int:
    return result.timeseries[-1].infected_count if result.timeseries else 0


def run_tracking_active(config: ScenarioConfig) -> tuple:
    """Run and also return the per-step count of infected hosts that are not
    quarantined (the ones still spreading)."""
    active = []

    def watch(w, rec):
        active.append(sum(1 for h in w.hosts if h.strain is not None and not h.quarantined))

    return run(config, on_step=watch), active


def rebound(series) -> bool:
    """True when the series falls below its running peak (suppression) and
    later reaches at least twice that peak (rebound)."""
    peak = 0
    for t, value in enumerate(series):
        if value < peak and any(later >= 2 * peak for later in series[t + 1:]):
            return True
        peak = max(peak, value)
    return False


def episode_lengths(result: RunResult):
    """(first, second) elimination times of a re-injection run, each counted
    from the start of its episode, or None when either episode did not end."""
    if result.reinjected_step is None or len(result.eliminations) < 2:
        return None
    return result.eliminations[0], result.eliminations[1] - result.reinjected_step


def false_quarantines(result: RunResult) -> int:
    return sum(1 for q in result.quarantines if not q.was_infected)


def spoof_only_quarantines(result: RunResult, rule: str = "two_signal") -> int:
    """Quarantines that the genuine evidence alone would not have justified."""
    need = 1 if rule == "one_signal" else 2
    count = 0
    for q in result.quarantines:
        genuine = q.distinct_matches + q.valid_triggers
        if not (genuine >= need or (rule == "two_signal" and genuine >= 1 and q.damage)):
            count += 1
    return count


def spam_legit_ratio(result: RunResult) -> float:
    last = result.timeseries[-1]
    return last.spam_sent / last.legit_sent if last.legit_sent else float("inf")


@dataclass
class Paired:
    """Results of several arms over the same seeds, keyed by arm name."""

    seeds: tuple
    results: dict = field(default_factory=dict)

    def metric(self, arm, fn):
        return [fn(r) for r in self.results[arm]]

    def median(self, arm, fn):
        return statistics.median(self.metric(arm, fn))


def paired(arms: dict, seeds=SEEDS) -> Paired:
    """Run every arm (name -> config) on every seed."""
    out = Paired(tuple(seeds))
    for name, cfg in arms.items():
        out.results[name] = [run(with_seed(cfg, s)) for s in seeds]
    return out
