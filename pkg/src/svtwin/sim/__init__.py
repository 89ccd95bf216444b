"""Simulation configuration and the orchestrator that runs every twin."""

from svtwin.sim.config import SimulationConfig, config_digest, from_dict, merge, to_dict
from svtwin.sim.engine import PlatformTwin, RunResult, World, adopters, persist, replay_world, run

__all__ = [
    "PlatformTwin",
    "RunResult",
    "SimulationConfig",
    "World",
    "adopters",
    "config_digest",
    "from_dict",
    "merge",
    "persist",
    "replay_world",
    "run",
    "to_dict",
]
