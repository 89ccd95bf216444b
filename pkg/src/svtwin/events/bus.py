"""Typed publish/subscribe bus with an append-only, replayable log."""

from __future__ import annotations

import hashlib
import json
from bisect import insort
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Iterable, Iterator, Sequence

from svtwin.events.schemas import validate_payload
from svtwin.events.taxonomy import EventType


class RegistrationError(ValueError):
    pass


class CorruptLogError(ValueError):
    pass


@dataclass(frozen=True, slots=True)
class TypedEvent:
    seq: int
    step: int
    event_type: EventType
    source: str
    payload: dict[str, Any]

    def to_line(self) -> str:
        return json.dumps(
            {
                "seq": self.seq,
                "step": self.step,
                "type": self.event_type.value,
                "source": self.source,
                "payload": self.payload,
            },
            sort_keys=True,
            separators=(",", ":"),
        )

    @classmethod
    def from_line(cls, line: str) -> "TypedEvent":
        rec = json.loads(line)
        return cls(rec["seq"], rec["step"], EventType(rec["type"]), rec["source"], rec["payload"])


@dataclass(frozen=True, order=True, slots=True)
class Subscription:
    event_type: EventType
    handler_id: str
    priority: int = 0

    def sort_key(self) -> tuple[int, str]:
        return (self.priority, self.handler_id)


Callback = Callable[[TypedEvent], None]


class EventLog:
    """Append-only log of serialised events with a running SHA-256 digest.

    Only the serialised lines are retained; :meth:`events` parses them back.
    """

    def __init__(self, path: str | Path | None = None) -> None:
        self.lines: list[str] = []
        self._digest = hashlib.sha256()
        self._fh = open(path, "w", encoding="utf-8", newline="\n") if path is not None else None

    def append(self, event: TypedEvent) -> str:
        line = event.to_line()
        self.lines.append(line)
        encoded = line.encode("utf-8") + b"\n"
        self._digest.update(encoded)
        if self._fh is not None:
            self._fh.write(line + "\n")
        return line

    def __len__(self) -> int:
        return len(self.lines)

    def digest(self) -> str:
        return self._digest.hexdigest()

    def events(self, start: int = 0, stop: int | None = None) -> Iterator[TypedEvent]:
        for line in self.lines[start:stop]:
            yield TypedEvent.from_line(line)

    def flush(self) -> None:
        if self._fh is not None:
            self._fh.flush()

    def close(self) -> None:
        if self._fh is not None:
            self._fh.close()
            self._fh = None


class EventBus:
    """Synchronous bus: ``publish`` validates, logs, then dispatches before returning.

    Dispatch order within an event type is ascending priority with ties broken
    by handler id, so it depends only on the subscription set.
    """

    def __init__(self, log: EventLog | None = None, validate: bool = True) -> None:
        self.log = log if log is not None else EventLog()
        self.validate = validate
        self._subs: dict[EventType, list[tuple[tuple[int, str], Subscription, Callback]]] = {}
        self._keys: set[tuple[EventType, str]] = set()
        self.trace: list[tuple[int, str]] | None = None

    def register(self, sub: Subscription, callback: Callback) -> Subscription:
        if not isinstance(sub.event_type, EventType):
            raise RegistrationError(f"unknown event type {sub.event_type!r}")
        key = (sub.event_type, sub.handler_id)
        if key in self._keys:
            raise RegistrationError(f"duplicate subscription {sub.event_type.value}/{sub.handler_id}")
        self._keys.add(key)
        insort(self._subs.setdefault(sub.event_type, []), (sub.sort_key(), sub, callback), key=lambda t: t[0])
        return sub

    def subscribe(self, event_type: EventType, handler_id: str, callback: Callback, priority: int = 0) -> Subscription:
        return self.register(Subscription(event_type, handler_id, priority), callback)

    def subscribers(self, event_type: EventType) -> list[Subscription]:
        return [s for _, s, _ in self._subs.get(event_type, [])]

    def publish(self, event_type: EventType, payload: dict[str, Any], *, step: int, source: str) -> int:
        if self.validate:
            validate_payload(event_type, payload)
        event = TypedEvent(len(self.log), step, event_type, source, payload)
        self.log.append(event)
        self.dispatch(event)
        return event.seq

    def dispatch(self, event: TypedEvent) -> None:
        trace = self.trace
        for _, sub, callback in self._subs.get(event.event_type, ()):
            if trace is not None:
                trace.append((event.seq, sub.handler_id))
            callback(event)


def iter_checked(events: Iterable[TypedEvent]) -> Iterator[TypedEvent]:
    """Yield events, raising :class:`CorruptLogError` on any seq gap."""
    expected = 0
    for ev in events:
        if ev.seq != expected:
            raise CorruptLogError(f"expected seq {expected}, found {ev.seq}")
        expected += 1
        yield ev


def replay(log: Sequence[TypedEvent] | Iterable[TypedEvent] | EventLog, bus: EventBus) -> EventBus:
    """Re-dispatch ``log`` against the (freshly initialised) subscribers of ``bus``.

    Events are appended to ``bus.log`` as they are dispatched, so after a full
    replay the two logs carry the same digest.
    """
    events = log.events() if isinstance(log, EventLog) else log
    if len(bus.log):
        raise CorruptLogError("replay target bus must start with an empty log")
    for ev in iter_checked(events):
        bus.log.append(ev)
        bus.dispatch(ev)
    return bus


def read_log(path: str | Path) -> list[TypedEvent]:
    with open(path, encoding="utf-8") as fh:
        return [TypedEvent.from_line(line) for line in fh if line.strip()]
