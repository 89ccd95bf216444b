"""Result record of a single encounter."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Mapping

ENGAGEMENT_TYPES: tuple[str, ...] = ("like", "share", "comment", "gift")


@dataclass(frozen=True)
class EncounterOutcome:
    hooked: bool
    skipped: bool
    watch_time: float
    completion_rate: float
    engagements: tuple[str, ...] = ()
    comment_text: str | None = None
    gift_amount: float = 0.0
    follow: bool = False
    purchase_price: float = 0.0
    extras: Mapping[str, Any] = field(default_factory=dict)

    @classmethod
    def from_payload(cls, payload: Mapping[str, Any]) -> "EncounterOutcome":
        """Rebuild the behaviour-relevant part of an outcome from a watch event."""
        skipped = bool(payload["is_skipped"])
        return cls(
            hooked=bool(payload.get("hooked", not skipped)),
            skipped=skipped,
            watch_time=float(payload["watch_time"]),
            completion_rate=float(payload["completion_rate"]),
            engagements=tuple(payload.get("engagements", ())),
        )
