"""Graduated exposure: initial test audience, expanded distribution, viral or limited."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field, replace

import numpy as np

from svtwin.core.errors import ConfigError

INITIAL, EXPANDED, VIRAL, LIMITED = "initial", "expanded", "viral", "limited"
STAGES = (INITIAL, EXPANDED, VIRAL, LIMITED)
ABSORBING = frozenset({VIRAL, LIMITED})
ALLOWED_TRANSITIONS = {INITIAL: {EXPANDED, LIMITED}, EXPANDED: {VIRAL, LIMITED}, VIRAL: set(), LIMITED: set()}


@dataclass(frozen=True)
class GateConfig:
    initial_quota: int = 100
    expanded_quota: int = 500
    engagement_gate: float = 0.15
    velocity_gate: float = 100.0
    completion_gate: float = 0.5
    amplification_factor: float = 3.0
    limited_trickle: float = 0.1

    def __post_init__(self) -> None:
        if self.initial_quota <= 0 or self.expanded_quota <= 0:
            raise ConfigError("quotas must be positive")
        if not 0.0 <= self.engagement_gate <= 1.0 or not 0.0 <= self.completion_gate <= 1.0:
            raise ConfigError("rate gates must lie in [0, 1]")
        if self.velocity_gate < 0:
            raise ConfigError("velocity gate must be non-negative")
        if self.amplification_factor < 1.0:
            raise ConfigError("amplification factor must be >= 1")
        if not 0.0 <= self.limited_trickle <= 1.0:
            raise ConfigError("limited trickle must lie in [0, 1]")


@dataclass(frozen=True)
class GateMetrics:
    engagement_rate: float
    completion_mean: float
    velocity: float


@dataclass
class StageRecord:
    content_id: int
    stage: str = INITIAL
    impressions_served: int = 0
    impressions_quota: int = 100
    stage_start_impressions: int = 0
    entered_step: int = 0
    amplification: float = 1.0
    gate_metrics: GateMetrics | None = None

    @property
    def stage_impressions(self) -> int:
        return self.impressions_served - self.stage_start_impressions

    @property
    def quota_consumed(self) -> bool:
        return self.stage_impressions >= self.impressions_quota


def admit(content_id: int, step: int, config: GateConfig) -> StageRecord:
    return StageRecord(content_id=content_id, impressions_quota=config.initial_quota, entered_step=step)


def evaluate_gate(record: StageRecord, metrics: GateMetrics, config: GateConfig, step: int) -> tuple[StageRecord, bool]:
    """Apply the stage gates; returns ``(record, went_viral)``.

    Initial items are judged once their test quota is consumed: engagement
    strictly above the gate expands them, anything else limits them. Expanded
    items go viral as soon as velocity is strictly above the gate with enough
    completion, and are limited once the expanded quota runs out.
    """
    if record.stage == INITIAL:
        if not record.quota_consumed:
            return record, False
        if metrics.engagement_rate > config.engagement_gate:
            return _move(record, EXPANDED, config.expanded_quota, 1.0, metrics, step), False
        return _move(record, LIMITED, 0, 1.0, metrics, step), False
    if record.stage == EXPANDED:
        if metrics.velocity > config.velocity_gate and metrics.completion_mean >= config.completion_gate:
            return _move(record, VIRAL, 0, config.amplification_factor, metrics, step), True
        if record.quota_consumed:
            return _move(record, LIMITED, 0, 1.0, metrics, step), False
    return record, False


def _move(record: StageRecord, stage: str, quota: int, amp: float, metrics: GateMetrics, step: int) -> StageRecord:
    if stage not in ALLOWED_TRANSITIONS[record.stage]:
        raise ValueError(f"illegal transition {record.stage} -> {stage}")
    return replace(
        record,
        stage=stage,
        impressions_quota=quota,
        stage_start_impressions=record.impressions_served,
        entered_step=step,
        amplification=amp,
        gate_metrics=metrics,
    )


def eligibility_weight(record: StageRecord, config: GateConfig) -> float:
    if record.stage == VIRAL:
        return record.amplification
    if record.stage == LIMITED:
        return config.limited_trickle
    return 1.0


@dataclass
class PromotionStore:
    """Stage records plus a dense eligibility-weight array for the recommender."""

    config: GateConfig = field(default_factory=GateConfig)
    records: dict[int, StageRecord] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.weights = np.ones(64)

    def admit(self, content_id: int, step: int) -> StageRecord:
        if content_id in self.records:
            return self.records[content_id]
        rec = admit(content_id, step, self.config)
        self.records[content_id] = rec
        if content_id >= self.weights.shape[0]:
            grown = np.ones(max(2 * self.weights.shape[0], content_id + 1))
            grown[: self.weights.shape[0]] = self.weights
            self.weights = grown
        self.weights[content_id] = eligibility_weight(rec, self.config)
        return rec

    def count_impression(self, content_id: int) -> None:
        self.records[content_id].impressions_served += 1

    def apply_transition(self, content_id: int, to_stage: str, step: int, metrics: GateMetrics) -> StageRecord:
        rec = self.records[content_id]
        if to_stage == EXPANDED:
            new = _move(rec, EXPANDED, self.config.expanded_quota, 1.0, metrics, step)
        elif to_stage == VIRAL:
            new = _move(rec, VIRAL, 0, self.config.amplification_factor, metrics, step)
        else:
            new = _move(rec, to_stage, 0, 1.0, metrics, step)
        self.records[content_id] = new
        self.weights[content_id] = eligibility_weight(new, self.config)
        return new

    def stage_of(self, content_id: int) -> str:
        return self.records[content_id].stage

    def state_hash(self) -> str:
        h = hashlib.sha256()
        for cid in sorted(self.records):
            r = self.records[cid]
            h.update(
                f"{cid}|{r.stage}|{r.impressions_served}|{r.impressions_quota}|{r.stage_start_impressions}|"
                f"{r.entered_step}|{r.amplification!r};".encode()
            )
        return h.hexdigest()
