"""Prompt assembly for each decision task.

The rendered prompt is part of the cache key, so rendering must be a pure
function of the payload.
"""

from __future__ import annotations

import json
from typing import Any, Mapping

from svtwin.decisions.tasks import Task

_INSTRUCTIONS: Mapping[Task, str] = {
    Task.PERSONA: (
        "Role: persona writer for a simulated short-video app. Describe one {tier} creator "
        "whose main subject is {domain}. Reply with JSON only, keys: bio (one sentence), "
        "core_traits (list of exactly five single-word adjectives), viewing_preferences "
        "(a short phrase on what they like to watch), creation_style (a short phrase)."
    ),
    Task.CAPTION: (
        "Write upload metadata for a {archetype} clip. Currently popular tags: {trend_context}. "
        "Reply with JSON only, keys: title (under 100 characters), description (one line), "
        "hashtags (one to five lowercase tags without '#')."
    ),
    Task.COMMENT: (
        "Write one short viewer comment, under 20 words, reacting to a {archetype} clip. "
        'Reply with JSON only: {{"text": "..."}}.'
    ),
    Task.CAMPAIGN: (
        "You advise a {tier} creator focused on {domain}. Recent uploads (views, likes, retention): "
        "{history}. Tags trending right now: {trending}. Pick one trending tag worth joining and "
        "lay out a three-day posting plan that connects the creator's niche to it. Reply with JSON "
        "only: {{\"entries\": [...]}} holding three objects with day_offset (0, 1, 2), category, theme, "
        "hashtags, short_caption, live_slot (HH:MM or null) and cta (one of follow, comment, share, "
        "join_live, purchase, watch). Commerce enabled: {commerce}."
    ),
    Task.TREND_PREDICTION: (
        "Hourly interaction counts per hashtag over the last four epochs, oldest first: {series}. "
        "Flag tags that are just starting to take off; leave out tags that are flat or fading. "
        'Reply with JSON only: {{"forecasts": [{{"hashtag": str, "confidence": 0..1, "rationale": str}}]}}.'
    ),
    Task.ACTION_SELECTION: (
        "A simulated viewer (agent {agent_id}) can do one of: {options}. Current state: {state}. "
        'Reply with JSON only: {{"action": <one option>}}.'
    ),
}


def _fmt(value: Any) -> str:
    if isinstance(value, str):
        return value
    return json.dumps(value, sort_keys=True, separators=(",", ":"))


def render(task: Task, payload: Mapping[str, Any]) -> str:
    template = _INSTRUCTIONS[Task(task)]
    fields = {k: _fmt(v) for k, v in payload.items()}
    fields.setdefault("state", "{}")
    body = template.format(**fields)
    # Appending the full payload keeps distinct requests distinct even when
    # the template ignores some field (e.g. the agent id for personas).
    return body + "\nContext: " + _fmt(dict(payload))
