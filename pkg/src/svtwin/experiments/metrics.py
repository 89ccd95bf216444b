"""Run-level metrics, computed from world state or recomputed from an event log."""

from __future__ import annotations

import math
from collections import Counter
from typing import TYPE_CHECKING, Any, Iterable, Mapping, Sequence

from svtwin.core.metrics import gini, shannon_entropy_bits
from svtwin.events.bus import TypedEvent
from svtwin.events.taxonomy import EventType

if TYPE_CHECKING:
    from svtwin.sim.engine import World

METRIC_NAMES = (
    "mean_watch_time",
    "skip_rate",
    "view_gini",
    "gift_revenue",
    "gift_gini",
    "top_decile_gift_share",
    "hashtag_entropy",
    "llm_spend",
)


def top_share(values: Sequence[float], fraction: float = 0.1) -> float:
    """Share of the total held by the top ``ceil(fraction * n)`` values (0 when the total is 0)."""
    if not values:
        return 0.0
    total = float(sum(values))
    if total <= 0:
        return 0.0
    k = max(1, math.ceil(fraction * len(values) - 1e-12))
    return float(sum(sorted(values, reverse=True)[:k])) / total


def summarize(
    views: Sequence[float],
    creator_gifts: Sequence[float],
    impressions: int,
    skips: int,
    watch_time: float,
    hashtag_uses: Iterable[float],
    llm_spend: float,
) -> dict[str, float]:
    """Headline metrics; a run without impressions gets zeros and ``empty`` set to 1."""
    uses = [u for u in hashtag_uses if u > 0]
    return {
        "mean_watch_time": watch_time / impressions if impressions else 0.0,
        "skip_rate": skips / impressions if impressions else 0.0,
        "view_gini": gini(views) if len(views) else 0.0,
        "gift_revenue": float(sum(creator_gifts)),
        "gift_gini": gini(creator_gifts) if len(creator_gifts) else 0.0,
        "top_decile_gift_share": top_share(creator_gifts),
        "hashtag_entropy": shannon_entropy_bits(uses) if uses else 0.0,
        "llm_spend": float(llm_spend),
        "empty": float(impressions == 0),
    }


def summarize_world(world: "World") -> dict[str, Any]:
    """Headline metrics plus diagnostics, read from the twins after a run."""
    items = world.store.items
    impressions = sum(c.views for c in items)
    gifts_by_creator = world.registry.creator_gift_revenue()
    creator_gifts = [gifts_by_creator.get(c, 0.0) for c in world.creators]
    out: dict[str, Any] = summarize(
        [c.views for c in items],
        creator_gifts,
        impressions,
        sum(c.skips for c in items),
        sum(c.watch_time_total for c in items),
        world.store.hashtag_usage().values(),
        world.optimizer.budget.spent_total,
    )
    stages = Counter(r.stage for r in world.platform.promotion.records.values())
    engaged = sum(c.likes + c.shares + c.comments for c in items)
    out.update(
        {
            "steps": world.step,
            "agents": len(world.agents),
            "creators": len(world.creators),
            "content_items": len(items),
            "impressions": impressions,
            "engagement_rate": engaged / impressions if impressions else 0.0,
            "commerce_revenue": float(sum(world.registry.revenue["commerce"].values())),
            "stages": dict(sorted(stages.items())),
            "cascades": world.platform.cascades.summary(),
            "boost_actions": len(world.platform.ledger.audit),
        }
    )
    return out


def metrics_from_events(events: Iterable[TypedEvent], creators: Sequence[int] | None = None) -> dict[str, float]:
    """Recompute the headline metrics from logged events alone.

    ``creators`` lists every creator id (so creators without gifts count as
    zero); when omitted, creators seen in CONTENT_CREATED are used.
    """
    views: dict[int, int] = {}
    gifts: Counter = Counter()
    tags: Counter = Counter()
    seen_creators: set[int] = set()
    impressions = skips = 0
    watch = 0.0
    spend = 0.0
    for ev in events:
        et, p = ev.event_type, ev.payload
        if et is EventType.CONTENT_CREATED:
            views.setdefault(p["content"]["content_id"], 0)
            seen_creators.add(p["content"]["creator_id"])
            tags.update(p["content"]["hashtags"])
        elif et in (EventType.VIDEO_WATCHED, EventType.VIDEO_SKIPPED):
            views[p["content_id"]] = views.get(p["content_id"], 0) + 1
            impressions += 1
            skips += bool(p["is_skipped"])
            watch += p["watch_time"]
        elif et is EventType.GIFT_SENT:
            gifts[p["creator_id"]] += p["amount"]
    ids = sorted(creators) if creators is not None else sorted(seen_creators)
    return summarize([views[k] for k in sorted(views)], [gifts.get(c, 0.0) for c in ids], impressions, skips, watch, tags.values(), spend)


def content_aggregates(events: Iterable[TypedEvent], upto_seq: int | None = None) -> dict[int, dict[str, int]]:
    """Per-content view/like/share counts from the log, optionally up to a sequence number."""
    out: dict[int, dict[str, int]] = {}
    for ev in events:
        if upto_seq is not None and ev.seq > upto_seq:
            break
        et, p = ev.event_type, ev.payload
        if et is EventType.CONTENT_CREATED:
            out[p["content"]["content_id"]] = {"views": 0, "likes": 0, "shares": 0}
        elif et in (EventType.VIDEO_WATCHED, EventType.VIDEO_SKIPPED):
            out[p["content_id"]]["views"] += 1
        elif et is EventType.VIDEO_ENGAGED and p["engagement_type"] in ("like", "share"):
            out[p["content_id"]][p["engagement_type"] + "s"] += 1
    return out


def mean_std(values: Sequence[float]) -> tuple[float, float]:
    """Mean and sample (n - 1) standard deviation; std is 0 for fewer than two values."""
    n = len(values)
    if n == 0:
        return 0.0, 0.0
    mean = math.fsum(values) / n
    if n < 2:
        return mean, 0.0
    return mean, math.sqrt(math.fsum((v - mean) ** 2 for v in values) / (n - 1))


def aggregate(rows: Sequence[Mapping[str, float]], names: Sequence[str] = METRIC_NAMES) -> dict[str, tuple[float, float]]:
    return {k: mean_std([float(r[k]) for r in rows]) for k in names}
