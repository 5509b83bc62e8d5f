"""Seeded network-immunity simulator: mutating malware and spam versus
endpoint, router-level and peer-to-peer defenses driven by an
immune-style detector engine."""

from netimmune.signature import BitSignature
from netimmune.config import ScenarioConfig, parse_config, serialize_config
from netimmune.engine import World, run, step

__all__ = [
    "BitSignature",
    "ScenarioConfig",
    "World",
    "parse_config",
    "run",
    "serialize_config",
    "step",
]
