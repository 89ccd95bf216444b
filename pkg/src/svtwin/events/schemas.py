"""Per-event payload schemas, loaded from ``event_schemas.json``."""

from __future__ import annotations

import json
from functools import lru_cache
from importlib import resources
from typing import Any, Mapping

from svtwin.events.taxonomy import EventType


class PayloadError(ValueError):
    """Payload does not match its event type's schema."""


_PY_TYPES = {"int": (int,), "float": (int, float), "str": (str,), "bool": (bool,), "list": (list,), "dict": (dict,)}


@lru_cache(maxsize=None)
def _compile(spec: str) -> tuple[tuple[type, ...], bool, bool]:
    """``(types, nullable, bool_ok)`` for a ``|``-separated type spec."""
    options = spec.split("|")
    types: tuple[type, ...] = ()
    for option in options:
        if option != "null":
            types += _PY_TYPES[option]
    return types, "null" in options, "bool" in options


def _check_type(value: Any, spec: str) -> bool:
    types, nullable, bool_ok = _compile(spec)
    if value is None:
        return nullable
    if isinstance(value, bool):
        # bool is an int subclass; only an explicit "bool" accepts it.
        return bool_ok
    return isinstance(value, types)


@lru_cache(maxsize=1)
def load_schemas() -> dict[EventType, dict[str, dict[str, str]]]:
    raw = json.loads(resources.files("svtwin.events").joinpath("event_schemas.json").read_text("utf-8"))
    schemas = {}
    for name, spec in raw.items():
        schemas[EventType(name)] = {"required": spec.get("required", {}), "optional": spec.get("optional", {})}
    missing = set(EventType) - set(schemas)
    if missing:
        raise RuntimeError(f"schema registry lacks {sorted(m.value for m in missing)}")
    return schemas


def validate_payload(event_type: EventType, payload: Mapping[str, Any]) -> None:
    """Raise :class:`PayloadError` if ``payload`` violates the schema.

    Unknown keys are rejected so that logged payloads stay self-describing.
    """
    schema = load_schemas()[event_type]
    required = schema["required"]
    optional = schema["optional"]
    for key, spec in required.items():
        if key not in payload:
            raise PayloadError(f"{event_type.value} payload missing required field {key!r}")
        if not _check_type(payload[key], spec):
            raise PayloadError(f"{event_type.value}.{key} expected {spec}, got {type(payload[key]).__name__}")
    for key, value in payload.items():
        if key in required:
            continue
        spec = optional.get(key)
        if spec is None:
            raise PayloadError(f"{event_type.value} payload has unknown field {key!r}")
        if not _check_type(value, spec):
            raise PayloadError(f"{event_type.value}.{key} expected {spec}, got {type(value).__name__}")
