"""Decision task taxonomy, tiers and request/result records."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Mapping


class Task(str, Enum):
    PERSONA = "PERSONA"
    CAPTION = "CAPTION"
    COMMENT = "COMMENT"
    CAMPAIGN = "CAMPAIGN"
    TREND_PREDICTION = "TREND_PREDICTION"
    ACTION_SELECTION = "ACTION_SELECTION"


class Tier(str, Enum):
    LIVE = "live"
    CACHED = "cached"
    SURROGATE = "surrogate"


# Degradation only ever moves right along this order.
TIER_ORDER = {Tier.LIVE: 0, Tier.CACHED: 1, Tier.SURROGATE: 2}

DEFAULT_MODELS: Mapping[Task, tuple[str, float]] = {
    Task.PERSONA: ("gpt-4-turbo", 1.0),
    Task.CAPTION: ("gpt-3.5-turbo", 0.8),
    Task.COMMENT: ("gpt-3.5-turbo", 0.9),
    Task.CAMPAIGN: ("gpt-4-turbo", 0.7),
    Task.TREND_PREDICTION: ("gpt-4-turbo", 0.4),
    Task.ACTION_SELECTION: ("gpt-3.5-turbo", 0.5),
}


def cache_key(prompt: str, model_id: str, temperature: float) -> str:
    """Content address of a request: SHA-256 over (prompt, model, temperature)."""
    blob = json.dumps([prompt, model_id, float(temperature)], separators=(",", ":"), ensure_ascii=False)
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class DecisionRequest:
    task: Task
    payload: Mapping[str, Any]
    model_id: str = ""
    temperature: float = -1.0
    requester: tuple[str, int] = ("platform", -1)

    def __post_init__(self) -> None:
        task = Task(self.task)
        object.__setattr__(self, "task", task)
        model, temp = DEFAULT_MODELS[task]
        if not self.model_id:
            object.__setattr__(self, "model_id", model)
        if self.temperature < 0:
            object.__setattr__(self, "temperature", temp)


@dataclass(frozen=True)
class DecisionResult:
    task: Task
    tier: Tier
    output: Any
    cost: float = 0.0
    key: str = ""
    notes: tuple[str, ...] = field(default_factory=tuple)
