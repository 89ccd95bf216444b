"""Simulation configuration: one record assembling every twin's parameters."""

from __future__ import annotations

import dataclasses
import hashlib
import json
from dataclasses import dataclass, field
from typing import Any, Mapping

from svtwin.core.errors import ConfigError
from svtwin.decisions.optimizer import DecisionConfig
from svtwin.interaction.engine import BehaviorParams
from svtwin.platform.governance.control import STRATEGIES, GovernanceGoals
from svtwin.platform.governance.trends import TrendConfig
from svtwin.platform.promotion import GateConfig
from svtwin.platform.reco import RecoConfig, preset
from svtwin.users.learning import FeedbackParams
from svtwin.users.profile import TierConfig
from svtwin.users.session import SessionParams

_NESTED = {
    "tiers": TierConfig,
    "gate": GateConfig,
    "trend": TrendConfig,
    "goals": GovernanceGoals,
    "decisions": DecisionConfig,
    "behavior": BehaviorParams,
    "session": SessionParams,
    "feedback": FeedbackParams,
}


@dataclass(frozen=True)
class SimulationConfig:
    seed: int = 0
    horizon: int = 200
    population: int = 500
    tiers: TierConfig = field(default_factory=TierConfig)
    persona_source: str = "template"
    caption_source: str = "template"
    reco_variant: str = "tiktok"
    hybrid_lambda: float = 0.5
    reco_overrides: Mapping[str, Any] = field(default_factory=dict)
    gate: GateConfig = field(default_factory=GateConfig)
    trend: TrendConfig = field(default_factory=TrendConfig)
    goals: GovernanceGoals = field(default_factory=GovernanceGoals)
    governance_strategy: str = "S0"
    # What hashtag velocity counts: watched views and engagements, or uploads.
    hashtag_velocity: str = "interactions"
    control_interval: int = 1
    # S2 requests a fresh forecast every ``forecast_interval`` steps and reuses the latest in between.
    forecast_interval: int = 6
    monetization: str = "basic"
    planner_adoption: float = 0.0
    campaigns: bool = True
    campaign_tick: int = 72
    decisions: DecisionConfig = field(default_factory=DecisionConfig)
    behavior: BehaviorParams = field(default_factory=BehaviorParams)
    session: SessionParams = field(default_factory=SessionParams)
    feedback: FeedbackParams = field(default_factory=FeedbackParams)
    watch_budget: int = 5
    follows_per_agent: int = 3
    engagement_scale: float = 1.0
    # No uploads during the final ``drain_steps`` steps, so late items can finish their stages.
    drain_steps: int = 0
    checkpoint_every: int = 50
    trend_payload_top: int = 20
    validate_events: bool = True

    def __post_init__(self) -> None:
        if self.horizon < 0:
            raise ConfigError("horizon must be >= 0")
        if self.population < 0:
            raise ConfigError("population must be >= 0")
        if self.persona_source not in ("template", "llm") or self.caption_source not in ("template", "llm"):
            raise ConfigError("persona_source and caption_source must be 'template' or 'llm'")
        if self.governance_strategy not in STRATEGIES:
            raise ConfigError(f"governance_strategy must be one of {STRATEGIES}")
        if self.hashtag_velocity not in ("interactions", "posts"):
            raise ConfigError("hashtag_velocity must be 'interactions' or 'posts'")
        if self.monetization not in ("basic", "full"):
            raise ConfigError("monetization must be 'basic' or 'full'")
        if not 0.0 <= self.planner_adoption <= 1.0:
            raise ConfigError("planner_adoption must lie in [0, 1]")
        if min(self.control_interval, self.forecast_interval, self.campaign_tick, self.checkpoint_every) < 1:
            raise ConfigError("intervals must be positive")
        if self.watch_budget < 1:
            raise ConfigError("watch_budget must be positive")
        if self.engagement_scale < 0 or self.drain_steps < 0:
            raise ConfigError("engagement_scale and drain_steps must be non-negative")
        self.tiers.validate()
        self.reco()

    def reco(self) -> RecoConfig:
        return preset(self.reco_variant, self.hybrid_lambda, **dict(self.reco_overrides))

    def replace(self, **changes: Any) -> "SimulationConfig":
        return from_dict(merge(to_dict(self), changes))


def _plain(obj: Any) -> Any:
    if dataclasses.is_dataclass(obj):
        return {f.name: _plain(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, Mapping):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    return obj


def to_dict(config: SimulationConfig) -> dict[str, Any]:
    return _plain(config)


def merge(base: Mapping[str, Any], overrides: Mapping[str, Any]) -> dict[str, Any]:
    """Recursive dict merge; nested sections merge key by key."""
    out = dict(base)
    for k, v in overrides.items():
        if isinstance(v, Mapping) and isinstance(out.get(k), Mapping) and k != "reco_overrides":
            out[k] = merge(out[k], v)
        else:
            out[k] = v
    return out


def _build(cls, data: Mapping[str, Any]):
    names = {f.name: f for f in dataclasses.fields(cls)}
    unknown = set(data) - set(names)
    if unknown:
        raise ConfigError(f"unknown {cls.__name__} keys: {sorted(unknown)}")
    kwargs = {}
    for k, v in data.items():
        default = getattr(cls(), k) if k in names else None
        if isinstance(default, tuple) and isinstance(v, list):
            v = tuple(tuple(x) if isinstance(x, list) else x for x in v)
        elif isinstance(default, Mapping) and isinstance(v, Mapping):
            v = {kk: tuple(vv) if isinstance(vv, list) else vv for kk, vv in v.items()}
        kwargs[k] = v
    try:
        return cls(**kwargs)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def from_dict(data: Mapping[str, Any]) -> SimulationConfig:
    kwargs: dict[str, Any] = {}
    valid = {f.name for f in dataclasses.fields(SimulationConfig)}
    unknown = set(data) - valid
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    for k, v in data.items():
        if k in _NESTED and isinstance(v, Mapping):
            kwargs[k] = _build(_NESTED[k], v)
        else:
            kwargs[k] = v
    return SimulationConfig(**kwargs)


def config_digest(config: SimulationConfig) -> str:
    return hashlib.sha256(json.dumps(to_dict(config), sort_keys=True).encode()).hexdigest()[:16]
