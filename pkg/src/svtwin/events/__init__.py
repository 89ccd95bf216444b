"""Event taxonomy, schemas and the synchronous bus."""

from svtwin.events.bus import (
    CorruptLogError,
    EventBus,
    EventLog,
    RegistrationError,
    Subscription,
    TypedEvent,
    iter_checked,
    read_log,
    replay,
)
from svtwin.events.schemas import PayloadError, load_schemas, validate_payload
from svtwin.events.taxonomy import (
    ACTIVE_ACTIONS,
    INERT_EVENTS,
    ActionCategory,
    ActionType,
    EventSource,
    EventType,
)

__all__ = [
    "ACTIVE_ACTIONS",
    "INERT_EVENTS",
    "ActionCategory",
    "ActionType",
    "CorruptLogError",
    "EventBus",
    "EventLog",
    "EventSource",
    "EventType",
    "PayloadError",
    "RegistrationError",
    "Subscription",
    "TypedEvent",
    "iter_checked",
    "load_schemas",
    "read_log",
    "replay",
    "validate_payload",
]
