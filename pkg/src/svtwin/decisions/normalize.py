"""Turn raw live responses into canonical, schema-valid documents (or ``None``)."""

from __future__ import annotations

import json
from typing import Any

from svtwin.content.model import canonical_tag
from svtwin.decisions.schemas import CTAS, output_errors
from svtwin.decisions.tasks import Task


def parse_json(raw: str | None) -> Any:
    if raw is None:
        return None
    text = raw.strip()
    if text.startswith("```"):
        text = text.strip("`")
        if text.lower().startswith("json"):
            text = text[4:]
    try:
        return json.loads(text)
    except ValueError:
        return None


def _tags(values: Any, limit: int = 5) -> list[str] | None:
    if not isinstance(values, list):
        return None
    out: list[str] = []
    for v in values:
        t = canonical_tag(v) if isinstance(v, str) else ""
        if t and t not in out:
            out.append(t)
    return out[:limit]


def _campaign(doc: dict) -> dict | None:
    entries = doc.get("entries")
    if not isinstance(entries, list) or len(entries) != 3:
        return None
    out = []
    for e in entries:
        if not isinstance(e, dict):
            return None
        try:
            entry = {
                "day_offset": int(e["day_offset"]),
                "category": str(e["category"]),
                "theme": str(e["theme"]),
                "hashtags": _tags(e["hashtags"]),
                "short_caption": str(e["short_caption"])[:150],
                "live_slot": None if e.get("live_slot") in (None, "") else str(e["live_slot"]),
                "cta": str(e.get("cta", "watch")).lower(),
            }
        except (KeyError, TypeError, ValueError):
            return None
        if entry["cta"] not in CTAS:
            entry["cta"] = "watch"
        out.append(entry)
    return {"entries": sorted(out, key=lambda x: x["day_offset"])}


def _trend(doc: dict) -> dict | None:
    items = doc.get("forecasts")
    if not isinstance(items, list):
        return None
    out = []
    for f in items:
        if not isinstance(f, dict) or "hashtag" not in f or "confidence" not in f:
            continue
        tag = canonical_tag(f["hashtag"])
        try:
            conf = min(1.0, max(0.0, float(f["confidence"])))
        except (TypeError, ValueError):
            continue
        if tag:
            out.append({"hashtag": tag, "confidence": conf, "rationale": str(f.get("rationale", ""))[:200]})
    return {"forecasts": out}


def normalize(task: Task, raw: str | None) -> Any:
    """Unknown fields are dropped, optional ones defaulted; a hard miss yields ``None``."""
    doc = parse_json(raw)
    if not isinstance(doc, dict):
        return None
    task = Task(task)
    try:
        if task is Task.CAMPAIGN:
            out = _campaign(doc)
        elif task is Task.TREND_PREDICTION:
            out = _trend(doc)
        elif task is Task.PERSONA:
            traits = [str(t).strip() for t in doc["core_traits"] if str(t).strip()][:5]
            out = {
                "bio": str(doc["bio"]),
                "core_traits": traits,
                "viewing_preferences": str(doc.get("viewing_preferences", "")),
                "creation_style": str(doc.get("creation_style", "")),
            }
        elif task is Task.CAPTION:
            out = {"title": str(doc["title"])[:150], "description": str(doc.get("description", "")), "hashtags": _tags(doc["hashtags"])}
        elif task is Task.COMMENT:
            out = {"text": str(doc["text"]).strip()[:200]}
        else:
            out = {"action": str(doc["action"])}
    except (KeyError, TypeError):
        return None
    if out is None or output_errors(task, out):
        return None
    return out
