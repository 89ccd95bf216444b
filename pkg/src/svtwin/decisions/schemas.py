"""JSON schemas for decision-task inputs and outputs."""

from __future__ import annotations

from functools import lru_cache
from typing import Any

from jsonschema import Draft202012Validator

from svtwin.content.archetypes import ARCHETYPE_NAMES
from svtwin.decisions.tasks import Task

CTAS = ("follow", "comment", "share", "join_live", "purchase", "watch")
CONVERSION_CTAS = ("join_live", "purchase")
TAG_PATTERN = "^[a-z0-9_]+$"

_TAGS = {"type": "array", "items": {"type": "string", "pattern": TAG_PATTERN}}

INPUT_SCHEMAS: dict[Task, dict] = {
    Task.PERSONA: {
        "type": "object",
        "required": ["agent_id", "tier", "domain"],
        "properties": {
            "agent_id": {"type": "integer", "minimum": 0},
            "tier": {"enum": ["elite", "active", "casual", "consumer"]},
            "domain": {"type": "string", "minLength": 1},
        },
        "additionalProperties": False,
    },
    Task.CAPTION: {
        "type": "object",
        "required": ["archetype", "trend_context", "creator_id"],
        "properties": {
            "archetype": {"enum": list(ARCHETYPE_NAMES)},
            "trend_context": {"type": "array", "items": {"type": "string"}},
            "creator_id": {"type": "integer"},
        },
        "additionalProperties": False,
    },
    Task.COMMENT: {
        "type": "object",
        "required": ["user_id", "content_id", "archetype"],
        "properties": {
            "user_id": {"type": "integer"},
            "content_id": {"type": "integer"},
            "archetype": {"type": "string"},
        },
        "additionalProperties": False,
    },
    Task.CAMPAIGN: {
        "type": "object",
        "required": ["creator_id", "tier", "domain", "tick", "commerce", "history", "trending"],
        "properties": {
            "creator_id": {"type": "integer"},
            "tier": {"enum": ["elite", "active", "casual"]},
            "domain": {"type": "string", "minLength": 1},
            "tick": {"type": "integer", "minimum": 0},
            "commerce": {"type": "boolean"},
            "history": {
                "type": "array",
                "maxItems": 5,
                "items": {
                    "type": "object",
                    "required": ["views", "likes", "retention"],
                    "properties": {
                        "views": {"type": "integer", "minimum": 0},
                        "likes": {"type": "integer", "minimum": 0},
                        "retention": {"type": "number", "minimum": 0, "maximum": 1},
                    },
                },
            },
            "trending": {**_TAGS, "maxItems": 3},
        },
        "additionalProperties": False,
    },
    Task.TREND_PREDICTION: {
        "type": "object",
        "required": ["step", "series"],
        "properties": {
            "step": {"type": "integer"},
            "series": {
                "type": "object",
                "additionalProperties": {"type": "array", "items": {"type": "number", "minimum": 0}, "minItems": 1},
            },
        },
        "additionalProperties": False,
    },
    Task.ACTION_SELECTION: {
        "type": "object",
        "required": ["agent_id", "options"],
        "properties": {
            "agent_id": {"type": "integer"},
            "options": {"type": "array", "items": {"type": "string"}, "minItems": 1},
            "state": {"type": "object"},
        },
        "additionalProperties": False,
    },
}

_ENTRY = {
    "type": "object",
    "required": ["day_offset", "category", "theme", "hashtags", "short_caption", "live_slot", "cta"],
    "properties": {
        "day_offset": {"type": "integer", "enum": [0, 1, 2]},
        "category": {"type": "string", "minLength": 1},
        "theme": {"type": "string", "minLength": 1},
        "hashtags": {**_TAGS, "minItems": 1, "maxItems": 5},
        "short_caption": {"type": "string", "minLength": 1, "maxLength": 150},
        "live_slot": {"type": ["string", "null"]},
        "cta": {"enum": list(CTAS)},
    },
    "additionalProperties": False,
}

OUTPUT_SCHEMAS: dict[Task, dict] = {
    Task.PERSONA: {
        "type": "object",
        "required": ["bio", "core_traits", "viewing_preferences", "creation_style"],
        "properties": {
            "bio": {"type": "string", "minLength": 1},
            "core_traits": {"type": "array", "items": {"type": "string", "minLength": 1}, "minItems": 5, "maxItems": 5},
            "viewing_preferences": {"type": "string"},
            "creation_style": {"type": "string"},
        },
        "additionalProperties": False,
    },
    Task.CAPTION: {
        "type": "object",
        "required": ["title", "description", "hashtags"],
        "properties": {
            "title": {"type": "string", "minLength": 1, "maxLength": 150},
            "description": {"type": "string"},
            "hashtags": {**_TAGS, "minItems": 1, "maxItems": 5},
        },
        "additionalProperties": False,
    },
    Task.COMMENT: {
        "type": "object",
        "required": ["text"],
        "properties": {"text": {"type": "string", "minLength": 1, "maxLength": 200}},
        "additionalProperties": False,
    },
    Task.CAMPAIGN: {
        "type": "object",
        "required": ["entries"],
        "properties": {"entries": {"type": "array", "items": _ENTRY, "minItems": 3, "maxItems": 3}},
        "additionalProperties": False,
    },
    Task.TREND_PREDICTION: {
        "type": "object",
        "required": ["forecasts"],
        "properties": {
            "forecasts": {
                "type": "array",
                "items": {
                    "type": "object",
                    "required": ["hashtag", "confidence", "rationale"],
                    "properties": {
                        "hashtag": {"type": "string", "pattern": TAG_PATTERN, "minLength": 1},
                        "confidence": {"type": "number", "minimum": 0, "maximum": 1},
                        "rationale": {"type": "string"},
                    },
                    "additionalProperties": False,
                },
            }
        },
        "additionalProperties": False,
    },
    Task.ACTION_SELECTION: {
        "type": "object",
        "required": ["action"],
        "properties": {"action": {"type": "string", "minLength": 1}},
        "additionalProperties": False,
    },
}


class SchemaViolation(ValueError):
    pass


@lru_cache(maxsize=None)
def _validator(kind: str, task: Task) -> Draft202012Validator:
    schema = (INPUT_SCHEMAS if kind == "input" else OUTPUT_SCHEMAS)[task]
    Draft202012Validator.check_schema(schema)
    return Draft202012Validator(schema)


def _errors(kind: str, task: Task, doc: Any) -> list[str]:
    return [e.message for e in _validator(kind, Task(task)).iter_errors(doc)]


def input_errors(task: Task, payload: Any) -> list[str]:
    return _errors("input", task, payload)


def output_errors(task: Task, output: Any) -> list[str]:
    errs = _errors("output", task, output)
    if not errs and Task(task) is Task.CAMPAIGN:
        offsets = sorted(e["day_offset"] for e in output["entries"])
        if offsets != [0, 1, 2]:
            errs.append(f"day_offsets must be exactly 0, 1, 2; got {offsets}")
    return errs


def validate_input(task: Task, payload: Any) -> None:
    errs = input_errors(task, payload)
    if errs:
        raise SchemaViolation(f"{Task(task).value} input: {errs[0]}")


def validate_output(task: Task, output: Any) -> None:
    errs = output_errors(task, output)
    if errs:
        raise SchemaViolation(f"{Task(task).value} output: {errs[0]}")
