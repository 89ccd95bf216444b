"""Platform system of record: versioned control state, aggregates and a mutation journal."""

from __future__ import annotations

import hashlib
import json
from collections import OrderedDict
from pathlib import Path
from types import MappingProxyType
from typing import Any, Iterable, Mapping

from svtwin.events.bus import EventBus, TypedEvent
from svtwin.events.taxonomy import EventType

PLATFORM_HANDLERS = frozenset(
    {
        "platform_registry",
        "platform_promotion",
        "platform_trends",
        "platform_governance",
        "platform_campaigns",
        "platform_reco",
    }
)

CONTENT_FIELDS = ("views", "skips", "likes", "shares", "comments", "gifts", "gift_revenue", "watch_time")
USER_FIELDS = ("watched", "skipped", "watch_time", "engagements", "gifts_sent", "purchases")
HASHTAG_FIELDS = ("uses", "views", "engagements")


class AccessViolation(PermissionError):
    pass


class IntegrityError(ValueError):
    pass


def _canon(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


class RollingCache:
    """LRU mirror of hot per-content counters; advisory only."""

    def __init__(self, capacity: int = 256) -> None:
        self.capacity = capacity
        self._data: OrderedDict[int, dict[str, float]] = OrderedDict()

    def put(self, content_id: int, values: Mapping[str, float]) -> None:
        self._data[content_id] = dict(values)
        self._data.move_to_end(content_id)
        while len(self._data) > self.capacity:
            self._data.popitem(last=False)

    def get(self, content_id: int) -> dict[str, float] | None:
        return self._data.get(content_id)

    def items(self):
        return self._data.items()

    def __len__(self) -> int:
        return len(self._data)


class Registry:
    """Single-writer store; every mutation goes through :meth:`commit`.

    Mutations are plain dicts with an ``op`` key so that the journal can be
    replayed from version 0 by :meth:`from_journal`.
    """

    def __init__(self, cache_capacity: int = 256, journal_path: str | Path | None = None) -> None:
        self.version = 0
        self.control: dict[str, Any] = {}
        self.content: dict[int, dict[str, float]] = {}
        self.content_meta: dict[int, dict[str, Any]] = {}
        self.users: dict[int, dict[str, float]] = {}
        self.hashtags: dict[str, dict[str, float]] = {}
        self.revenue: dict[str, dict[int, float]] = {"gifts": {}, "commerce": {}}
        self.records: dict[str, list] = {"stage": [], "audit": [], "viral": []}
        # Entries are serialised on demand unless a journal file is being written.
        self._entries: list[tuple[int, str, Mapping[str, Any]]] = []
        self.cache = RollingCache(cache_capacity)
        self._journal_fh = open(journal_path, "w", encoding="utf-8") if journal_path is not None else None

    # -- writes -----------------------------------------------------------
    def commit(self, handler_id: str, mutation: Mapping[str, Any]) -> int:
        if handler_id not in PLATFORM_HANDLERS:
            raise AccessViolation(f"{handler_id!r} may not mutate the registry")
        self._apply(mutation)
        self.version += 1
        self._entries.append((self.version, handler_id, mutation))
        if self._journal_fh is not None:
            self._journal_fh.write(_canon({"v": self.version, "h": handler_id, "m": mutation}) + "\n")
        return self.version

    @property
    def journal(self) -> list[str]:
        return [_canon({"v": v, "h": h, "m": m}) for v, h, m in self._entries]

    def _apply(self, m: Mapping[str, Any]) -> None:
        op = m["op"]
        if op == "set_control":
            self.control[m["key"]] = m["value"]
        elif op == "register_content":
            cid = int(m["content_id"])
            self.content_meta[cid] = {"creator_id": int(m["creator_id"]), "hashtags": list(m["hashtags"])}
            self.content.setdefault(cid, dict.fromkeys(CONTENT_FIELDS, 0))
            for tag in m["hashtags"]:
                self._tag(tag)["uses"] += 1
        elif op == "interaction":
            self._apply_interaction(m)
        elif op == "record":
            self.records.setdefault(m["table"], []).append(m["record"])
        else:
            raise ValueError(f"unknown registry op {op!r}")

    def _tag(self, tag: str) -> dict[str, float]:
        entry = self.hashtags.get(tag)
        if entry is None:
            entry = self.hashtags[tag] = dict.fromkeys(HASHTAG_FIELDS, 0)
        return entry

    def _apply_interaction(self, m: Mapping[str, Any]) -> None:
        kind = m["kind"]
        cid = int(m["content_id"])
        uid = int(m["user_id"])
        agg = self.content.setdefault(cid, dict.fromkeys(CONTENT_FIELDS, 0))
        user = self.users.setdefault(uid, dict.fromkeys(USER_FIELDS, 0))
        tags = self.content_meta.get(cid, {}).get("hashtags", ())
        if kind in ("watched", "skipped"):
            agg["views"] += 1
            agg["watch_time"] += m["watch_time"]
            user["watch_time"] += m["watch_time"]
            if kind == "skipped":
                agg["skips"] += 1
                user["skipped"] += 1
            else:
                user["watched"] += 1
            for tag in tags:
                self._tag(tag)["views"] += 1
        elif kind in ("like", "share", "comment"):
            agg[kind + "s"] += 1
            user["engagements"] += 1
            for tag in tags:
                self._tag(tag)["engagements"] += 1
        elif kind == "gift":
            amount = m["amount"]
            agg["gifts"] += 1
            agg["gift_revenue"] += amount
            user["gifts_sent"] += 1
            creator = int(m["creator_id"])
            self.revenue["gifts"][creator] = self.revenue["gifts"].get(creator, 0.0) + amount
        elif kind == "purchase":
            user["purchases"] += 1
            creator = int(m["creator_id"])
            self.revenue["commerce"][creator] = self.revenue["commerce"].get(creator, 0.0) + m["amount"]
        else:
            raise ValueError(f"unknown interaction kind {kind!r}")
        self.cache.put(cid, {k: agg[k] for k in ("views", "likes", "shares")})

    # -- reads ------------------------------------------------------------
    def query(self, view: str, key: Any = None):
        """Read-only accessor; results are copies wrapped as immutable mappings."""
        if view == "version":
            return self.version
        if view == "control":
            return MappingProxyType(json.loads(_canon(self.control)))
        if view == "content":
            src = self.content if key is None else {key: self.content.get(key, dict.fromkeys(CONTENT_FIELDS, 0))}
            return MappingProxyType({k: MappingProxyType(dict(v)) for k, v in src.items()})
        if view == "user":
            return MappingProxyType(dict(self.users.get(key, dict.fromkeys(USER_FIELDS, 0))))
        if view == "hashtag":
            return MappingProxyType(dict(self.hashtags.get(key, dict.fromkeys(HASHTAG_FIELDS, 0))))
        if view == "revenue":
            return MappingProxyType({k: MappingProxyType(dict(v)) for k, v in self.revenue.items()})
        if view == "records":
            return tuple(self.records.get(key, ()))
        raise KeyError(f"unknown registry view {view!r}")

    def creator_gift_revenue(self) -> dict[int, float]:
        return dict(self.revenue["gifts"])

    def reconcile_cache(self) -> list[int]:
        """Content ids whose cached counters disagree with the durable aggregates."""
        bad = []
        for cid, vals in self.cache.items():
            agg = self.content.get(cid, {})
            if any(agg.get(k) != v for k, v in vals.items()):
                bad.append(cid)
        return bad

    # -- persistence ------------------------------------------------------
    def _state(self) -> dict[str, Any]:
        return {
            "version": self.version,
            "control": self.control,
            "content": {str(k): v for k, v in sorted(self.content.items())},
            "content_meta": {str(k): v for k, v in sorted(self.content_meta.items())},
            "users": {str(k): v for k, v in sorted(self.users.items())},
            "hashtags": dict(sorted(self.hashtags.items())),
            "revenue": {n: {str(k): v for k, v in sorted(d.items())} for n, d in self.revenue.items()},
            "records": self.records,
        }

    def state_hash(self) -> str:
        return hashlib.sha256(_canon(self._state()).encode()).hexdigest()

    def snapshot(self) -> str:
        body = _canon(self._state())
        return _canon({"sha256": hashlib.sha256(body.encode()).hexdigest(), "state": json.loads(body)})

    @classmethod
    def restore(cls, snapshot: str, cache_capacity: int = 256) -> "Registry":
        try:
            wrapper = json.loads(snapshot)
            state = wrapper["state"]
            digest = wrapper["sha256"]
        except (ValueError, KeyError, TypeError) as exc:
            raise IntegrityError("unreadable snapshot") from exc
        if hashlib.sha256(_canon(state).encode()).hexdigest() != digest:
            raise IntegrityError("snapshot digest mismatch")
        reg = cls(cache_capacity)
        reg.version = state["version"]
        reg.control = state["control"]
        reg.content = {int(k): v for k, v in state["content"].items()}
        reg.content_meta = {int(k): v for k, v in state["content_meta"].items()}
        reg.users = {int(k): v for k, v in state["users"].items()}
        reg.hashtags = dict(state["hashtags"])
        reg.revenue = {n: {int(k): v for k, v in d.items()} for n, d in state["revenue"].items()}
        reg.records = {k: list(v) for k, v in state["records"].items()}
        return reg

    @classmethod
    def from_journal(cls, lines: Iterable[str], base: "Registry | None" = None) -> "Registry":
        """Replay journal lines onto ``base`` (or an empty registry)."""
        reg = base if base is not None else cls()
        for line in lines:
            rec = json.loads(line)
            if rec["v"] <= reg.version:
                continue
            if rec["v"] != reg.version + 1:
                raise IntegrityError(f"journal gap before version {rec['v']}")
            reg.commit(rec["h"], rec["m"])
        return reg

    def close(self) -> None:
        if self._journal_fh is not None:
            self._journal_fh.close()
            self._journal_fh = None

    # -- event wiring -----------------------------------------------------
    def attach(self, bus: EventBus) -> None:
        hid = "platform_registry"
        bus.subscribe(EventType.CONTENT_CREATED, hid, self._on_created, priority=20)
        for et in (EventType.VIDEO_WATCHED, EventType.VIDEO_SKIPPED):
            bus.subscribe(et, hid, self._on_view, priority=20)
        bus.subscribe(EventType.VIDEO_ENGAGED, hid, self._on_engaged, priority=20)
        bus.subscribe(EventType.GIFT_SENT, hid, self._on_gift, priority=20)
        bus.subscribe(EventType.PURCHASE_COMPLETED, hid, self._on_purchase, priority=20)
        bus.subscribe(EventType.STAGE_TRANSITION, hid, self._on_stage, priority=20)
        bus.subscribe(EventType.VIDEO_GOES_VIRAL, hid, self._on_viral, priority=20)
        bus.subscribe(EventType.GOVERNANCE_ACTION, hid, self._on_audit, priority=20)

    def _on_created(self, ev: TypedEvent) -> None:
        c = ev.payload["content"]
        self.commit(
            "platform_registry",
            {"op": "register_content", "content_id": c["content_id"], "creator_id": c["creator_id"], "hashtags": list(c["hashtags"])},
        )

    def _on_view(self, ev: TypedEvent) -> None:
        p = ev.payload
        kind = "skipped" if ev.event_type is EventType.VIDEO_SKIPPED else "watched"
        self.commit(
            "platform_registry",
            {
                "op": "interaction",
                "kind": kind,
                "content_id": p["content_id"],
                "user_id": p["user_id"],
                "creator_id": p["creator_id"],
                "watch_time": p["watch_time"],
            },
        )

    def _on_engaged(self, ev: TypedEvent) -> None:
        p = ev.payload
        self.commit(
            "platform_registry",
            {"op": "interaction", "kind": p["engagement_type"], "content_id": p["content_id"], "user_id": p["user_id"], "creator_id": p["creator_id"]},
        )

    def _on_gift(self, ev: TypedEvent) -> None:
        p = ev.payload
        self.commit(
            "platform_registry",
            {"op": "interaction", "kind": "gift", "content_id": p["content_id"], "user_id": p["user_id"], "creator_id": p["creator_id"], "amount": p["amount"]},
        )

    def _on_purchase(self, ev: TypedEvent) -> None:
        p = ev.payload
        self.commit(
            "platform_registry",
            {"op": "interaction", "kind": "purchase", "content_id": p["content_id"], "user_id": p["user_id"], "creator_id": p["creator_id"], "amount": p["price"]},
        )

    def _on_stage(self, ev: TypedEvent) -> None:
        p = ev.payload
        self.commit("platform_promotion", {"op": "record", "table": "stage", "record": [ev.step, p["content_id"], p["from_stage"], p["to_stage"]]})

    def _on_viral(self, ev: TypedEvent) -> None:
        self.commit("platform_promotion", {"op": "record", "table": "viral", "record": [ev.step, ev.payload["content_id"]]})

    def _on_audit(self, ev: TypedEvent) -> None:
        p = ev.payload
        self.commit(
            "platform_governance",
            {"op": "record", "table": "audit", "record": [ev.step, p["audit_id"], p["kind"], p["target"], p["guard_result"]]},
        )
