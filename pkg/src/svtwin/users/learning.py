"""Preference state and the per-encounter feedback learner."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING

import numpy as np

from svtwin.core.errors import ConfigError, DomainError

if TYPE_CHECKING:
    from svtwin.interaction.outcome import EncounterOutcome

PREF_DIM = 50
INITIAL_INTEREST = 0.1


@dataclass
class PreferenceState:
    content_interests: np.ndarray = field(default_factory=lambda: np.full(PREF_DIM, INITIAL_INTEREST))
    # Optional per-modality slots (visual 512, audio 128, caption 768); absent by default.
    modality_slots: dict[str, np.ndarray] | None = None

    def copy(self) -> "PreferenceState":
        slots = None if self.modality_slots is None else {k: v.copy() for k, v in self.modality_slots.items()}
        return PreferenceState(self.content_interests.copy(), slots)


@dataclass(frozen=True)
class FeedbackParams:
    positive_rate: float = 0.3
    negative_rate: float = 0.2
    completion_trigger: float = 0.8
    skip_trigger_seconds: float = 3.0

    def __post_init__(self) -> None:
        for name in ("positive_rate", "negative_rate"):
            v = getattr(self, name)
            if not 0.0 < v < 1.0:
                raise ConfigError(f"{name} must lie in (0, 1), got {v}")


def feedback_direction(outcome: "EncounterOutcome", params: FeedbackParams) -> int:
    """+1 for a positive trigger, -1 for a negative one, 0 otherwise."""
    if not outcome.skipped and (outcome.completion_rate > params.completion_trigger or "like" in outcome.engagements):
        return 1
    if outcome.skipped and outcome.watch_time < params.skip_trigger_seconds:
        return -1
    return 0


def nudge(interests: np.ndarray, content_vector: np.ndarray, direction: int, params: FeedbackParams) -> np.ndarray:
    """Convex step toward (direction +1) or away from (-1) the content vector, clamped to [0, 1]."""
    if direction > 0:
        out = interests + params.positive_rate * (content_vector - interests)
    elif direction < 0:
        out = interests - params.negative_rate * (content_vector - interests)
    else:
        return interests
    return np.clip(out, 0.0, 1.0)


def update_preferences(
    pref: PreferenceState,
    content_vector: np.ndarray,
    outcome: "EncounterOutcome",
    params: FeedbackParams | None = None,
) -> PreferenceState:
    """Return the preference state after one encounter; inputs are not mutated.

    With no trigger the returned state holds the identical interest array
    values (bit-for-bit).
    """
    params = params or FeedbackParams()
    content_vector = np.asarray(content_vector, dtype=np.float64)
    if content_vector.shape != pref.content_interests.shape:
        raise DomainError(f"dimension mismatch: {pref.content_interests.shape} vs {content_vector.shape}")
    direction = feedback_direction(outcome, params)
    new = pref.copy()
    if direction:
        new.content_interests = nudge(pref.content_interests, content_vector, direction, params)
    return new
