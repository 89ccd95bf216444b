"""Deterministic template generators for every decision task.

Each returns a document that passes the same output schema as a normalized
live response.
"""

from __future__ import annotations

from typing import Any, Mapping, Sequence

from svtwin.content.archetypes import TOPIC_TAGS, archetype_tag, resolve_archetype
from svtwin.content.model import canonical_tag, template_caption
from svtwin.core.rng import RngStream
from svtwin.interaction.engine import COMMENT_BANK
from svtwin.users.personas import PERSONA_TEMPLATES, TEMPLATE_NAMES


def surrogate_persona(tier: str, domain: str, rng: RngStream) -> dict[str, Any]:
    template = PERSONA_TEMPLATES[rng.choice(TEMPLATE_NAMES)]
    subject = domain.lower().replace("_", " ")
    return {
        "bio": f"{tier.capitalize()} creator posting {subject}; {template.name.lower()} by temperament.",
        "core_traits": list(template.core_traits),
        "viewing_preferences": template.viewing_preferences,
        "creation_style": template.creation_style,
    }


def surrogate_caption(archetype: str, trend_context: Sequence[str], rng: RngStream) -> dict[str, Any]:
    return template_caption(archetype, trend_context, rng)


def surrogate_comment(context: Mapping[str, Any], rng: RngStream) -> dict[str, Any]:
    return {"text": rng.choice(COMMENT_BANK)}


def surrogate_action(options: Sequence[str]) -> dict[str, Any]:
    return {"action": options[0]}


def surrogate_campaign(creator_context: Mapping[str, Any]) -> dict[str, Any]:
    """Three-day heuristic roadmap built only from the creator's own niche.

    Day 0 aims at discovery, day 1 at interaction and day 2 at conversion,
    with a purchase prompt when commerce is enabled and a live session
    otherwise. Trend data in the context is ignored.
    """
    category = resolve_archetype(str(creator_context.get("domain", "LIFESTYLE")))
    base = archetype_tag(category)
    topics = TOPIC_TAGS[category]
    commerce = bool(creator_context.get("commerce", False))
    subject = category.lower().replace("_", " ")
    days = (
        ("launch: introduce a recurring " + subject + " format", f"New {subject} series starts today", None, "follow"),
        ("engagement: answer viewer questions from yesterday", f"You asked, here is part two of the {subject} series", None, "comment"),
        (
            "conversion: " + ("shop the setup" if commerce else "go live with the community"),
            f"Everything I use for {subject}, link in bio" if commerce else f"Live {subject} session tonight",
            None if commerce else "20:00",
            "purchase" if commerce else "join_live",
        ),
    )
    entries = []
    for offset, (theme, caption, slot, cta) in enumerate(days):
        entries.append(
            {
                "day_offset": offset,
                "category": category,
                "theme": theme,
                "hashtags": [base, canonical_tag(topics[offset % len(topics)])],
                "short_caption": caption,
                "live_slot": slot,
                "cta": cta,
            }
        )
    return {"entries": entries}


def trend_signal(counts: Sequence[float]) -> float | None:
    """Confidence for one key, or ``None`` if the key is not rising.

    A key is rising when its last two epoch-to-epoch changes are positive.
    Confidence is the latest change in slope relative to the current level,
    doubled and clamped to [0, 1].
    """
    c = [float(x) for x in counts]
    if len(c) < 3:
        return None
    d1, d2 = c[-2] - c[-3], c[-1] - c[-2]
    if d1 <= 0 or d2 <= 0:
        return None
    accel = d2 - d1
    conf = 2.0 * accel / max(c[-1], 1.0)
    conf = min(1.0, max(0.0, conf))
    return conf if conf > 0 else None


def surrogate_trend(series: Mapping[str, Sequence[float]]) -> dict[str, Any]:
    forecasts = []
    for key in sorted(series):
        conf = trend_signal(series[key])
        if conf is None:
            continue
        tag = canonical_tag(key)
        if tag:
            forecasts.append({"hashtag": tag, "confidence": conf, "rationale": "accelerating interaction counts"})
    forecasts.sort(key=lambda f: (-f["confidence"], f["hashtag"]))
    return {"forecasts": forecasts}
