"""Static agent attributes and creator tiers."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from svtwin.core.errors import ConfigError

TIERS: tuple[str, ...] = ("elite", "active", "casual", "consumer")
CREATOR_TIERS: frozenset[str] = frozenset({"elite", "active", "casual"})
ENGAGEMENT_KINDS: tuple[str, ...] = ("like", "comment", "share", "gift", "follow")

ATTENTION_MIN = 0.1
ATTENTION_MAX = 120.0


@dataclass(frozen=True)
class TierConfig:
    """Population tier shares and per-tier creation-probability ranges.

    Shares fall off roughly geometrically from consumers to elite creators,
    so a thin top tier produces most of the content.
    """

    shares: Mapping[str, float] = field(
        default_factory=lambda: {"elite": 0.01, "active": 0.03, "casual": 0.06, "consumer": 0.90}
    )
    creation_ranges: Mapping[str, tuple[float, float]] = field(
        default_factory=lambda: {
            "elite": (0.04, 0.08),
            "active": (0.01, 0.03),
            "casual": (0.002, 0.008),
            "consumer": (0.0, 0.0),
        }
    )

    def validate(self) -> None:
        if set(self.shares) != set(TIERS):
            raise ConfigError(f"tier shares must cover exactly {TIERS}")
        if any(v < 0 for v in self.shares.values()):
            raise ConfigError("tier shares must be non-negative")
        if abs(sum(self.shares.values()) - 1.0) > 1e-9:
            raise ConfigError(f"tier shares sum to {sum(self.shares.values())}, expected 1")
        for tier, (lo, hi) in self.creation_ranges.items():
            if not 0.0 <= lo <= hi <= 1.0:
                raise ConfigError(f"bad creation range for {tier}: {(lo, hi)}")
        if self.creation_ranges.get("consumer", (0.0, 0.0)) != (0.0, 0.0):
            raise ConfigError("consumers never post; their creation range must be (0, 0)")


@dataclass(frozen=True)
class AgentProfile:
    agent_id: int
    demographics: Mapping[str, str]
    creator_tier: str
    attention_span: float
    humor_affinity: float
    toxicity_tolerance: float
    domain_expertise: str
    engagement_propensities: Mapping[str, float]
    creation_probability: float
    persona_name: str = ""
    persona_source: str = "template"
    core_traits: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if self.creator_tier not in TIERS:
            raise ConfigError(f"unknown tier {self.creator_tier!r}")
        if not ATTENTION_MIN <= self.attention_span <= ATTENTION_MAX:
            raise ConfigError(f"attention_span {self.attention_span} outside [0.1, 120]")
        if self.creator_tier == "consumer" and self.creation_probability != 0.0:
            raise ConfigError("consumer agents must have creation_probability 0")

    @property
    def is_creator(self) -> bool:
        return self.creator_tier in CREATOR_TIERS

    def to_record(self) -> dict:
        return {
            "agent_id": self.agent_id,
            "demographics": dict(sorted(self.demographics.items())),
            "creator_tier": self.creator_tier,
            "attention_span": self.attention_span,
            "humor_affinity": self.humor_affinity,
            "toxicity_tolerance": self.toxicity_tolerance,
            "domain_expertise": self.domain_expertise,
            "engagement_propensities": dict(sorted(self.engagement_propensities.items())),
            "creation_probability": self.creation_probability,
            "persona_name": self.persona_name,
            "persona_source": self.persona_source,
            "core_traits": list(self.core_traits),
        }
