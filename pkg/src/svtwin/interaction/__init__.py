"""Interaction twin: the per-impression behaviour engine."""

from svtwin.interaction.engine import (
    COMMENT_BANK,
    BehaviorParams,
    engagement_gain,
    expected_completion,
    interest_match,
    sample_engagements,
    sample_watch,
    simulate_encounter,
    skip_probability,
)
from svtwin.interaction.outcome import ENGAGEMENT_TYPES, EncounterOutcome

__all__ = [
    "COMMENT_BANK",
    "ENGAGEMENT_TYPES",
    "BehaviorParams",
    "EncounterOutcome",
    "engagement_gain",
    "expected_completion",
    "interest_match",
    "sample_engagements",
    "sample_watch",
    "simulate_encounter",
    "skip_probability",
]
