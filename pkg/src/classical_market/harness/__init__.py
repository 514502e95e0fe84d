"""Configuration, orchestration and persistence for command-line runs."""

from .config import COMMANDS, ScenarioConfig, build_config, config_hash, parse_config
from .runner import RunManifest, load_population, repetition_seed, run

__all__ = [
    "COMMANDS",
    "ScenarioConfig",
    "RunManifest",
    "parse_config",
    "build_config",
    "config_hash",
    "load_population",
    "repetition_seed",
    "run",
]
