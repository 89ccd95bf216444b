"""Content profiles: generation, vector layers and engagement counters."""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Mapping, Sequence

import numpy as np

from svtwin.content.archetypes import (
    ARCHETYPE_BY_NAME,
    ARCHETYPE_GROUP,
    ARCHETYPE_NAMES,
    AUDIO_KEYWORDS,
    BASE_HOOK,
    TOPIC_TAGS,
    VISUAL_KEYWORDS,
    archetype_tag,
    resolve_archetype,
)
from svtwin.core.embeddings import seeded_gaussian_embedding
from svtwin.core.rng import RngStream, derive_stream, stable_hash64
from svtwin.events.bus import TypedEvent
from svtwin.events.taxonomy import EventType

COMPACT_DIM = 50
KEYWORD_BUCKETS = range(20, 40)
NOISE_DIMS = range(40, 50)
KEYWORD_WEIGHT = 1.0
MAX_HASHTAGS = 5

TIER_SHIFT: Mapping[str, float] = {"elite": 0.15, "active": 0.08, "casual": 0.0}
EXPERTISE_BIAS = 0.6


class PolicyError(ValueError):
    """An operation was requested for an actor not allowed to perform it."""


_TAG_CLEAN = re.compile(r"[^a-z0-9_]")


def canonical_tag(tag: str) -> str:
    """Lowercase, strip '#', keep ``[a-z0-9_]``."""
    return _TAG_CLEAN.sub("", str(tag).strip().lstrip("#").lower())


def keyword_bucket(keyword: str) -> int:
    """Stable bucket index in dims 20-39 for a lowercase keyword."""
    return KEYWORD_BUCKETS.start + stable_hash64("kw", keyword.strip().lower()) % len(KEYWORD_BUCKETS)


@dataclass
class ContentProfile:
    content_id: int
    creator_id: int
    archetype: str
    title: str
    description: str
    hashtags: tuple[str, ...]
    visual_keywords: tuple[str, ...]
    audio_keywords: tuple[str, ...]
    duration: float
    hook_strength: float
    quality_score: float
    virality: float
    created_step: int
    caption_source: str = "template"
    cta: str | None = None
    plan_tick: int | None = None
    compact_vector: np.ndarray | None = None
    visual_embedding: np.ndarray | None = None
    audio_embedding: np.ndarray | None = None
    caption_embedding: np.ndarray | None = None
    # dynamic
    views: int = 0
    skips: int = 0
    likes: int = 0
    shares: int = 0
    comments: int = 0
    gifts: int = 0
    gift_revenue: float = 0.0
    watch_time_total: float = 0.0
    completion_total: float = 0.0
    completed_views: int = 0
    engagement_rate: float = 0.0
    last_interaction_step: int = -1

    STATIC_FIELDS = (
        "content_id",
        "creator_id",
        "archetype",
        "title",
        "description",
        "hashtags",
        "visual_keywords",
        "audio_keywords",
        "duration",
        "hook_strength",
        "quality_score",
        "virality",
        "created_step",
        "caption_source",
        "cta",
        "plan_tick",
    )
    DYNAMIC_FIELDS = (
        "views",
        "skips",
        "likes",
        "shares",
        "comments",
        "gifts",
        "gift_revenue",
        "watch_time_total",
        "completion_total",
        "completed_views",
        "engagement_rate",
        "last_interaction_step",
    )

    def static_record(self) -> dict[str, Any]:
        rec = {}
        for name in self.STATIC_FIELDS:
            v = getattr(self, name)
            rec[name] = list(v) if isinstance(v, tuple) else v
        return rec

    @classmethod
    def from_record(cls, rec: Mapping[str, Any]) -> "ContentProfile":
        kwargs = dict(rec)
        for name in ("hashtags", "visual_keywords", "audio_keywords"):
            kwargs[name] = tuple(kwargs[name])
        return cls(**kwargs)

    @property
    def completion_mean(self) -> float:
        """Mean completion over non-skipped watches."""
        return self.completion_total / self.completed_views if self.completed_views else 0.0

    def keywords(self) -> tuple[str, ...]:
        return tuple(self.hashtags) + tuple(self.visual_keywords)


def build_compact_vector(profile: ContentProfile, noise_rng: RngStream) -> np.ndarray:
    """50-dim layout: 0-9 archetype group one-hot, 10-19 reserved (zero),
    20-39 hashed keyword buckets (weight 1.0, capped), 40-49 U[0, 0.5] noise."""
    vec = np.zeros(COMPACT_DIM)
    vec[ARCHETYPE_GROUP[profile.archetype]] = 1.0
    for kw in profile.keywords():
        b = keyword_bucket(kw)
        vec[b] = min(KEYWORD_WEIGHT, vec[b] + KEYWORD_WEIGHT)
    for d in NOISE_DIMS:
        vec[d] = noise_rng.uniform(0.0, 0.5)
    return vec


def build_embeddings(profile: ContentProfile) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    visual = seeded_gaussian_embedding(f"visual:{','.join(profile.visual_keywords)}|creator:{profile.creator_id}", 512)
    audio = seeded_gaussian_embedding(f"audio:{','.join(profile.audio_keywords)}", 128)
    caption = seeded_gaussian_embedding(f"caption:{profile.title}\n{profile.description}", 768)
    return visual, audio, caption


def materialize(profile: ContentProfile, master_seed: int) -> ContentProfile:
    """Attach the compact vector and embeddings; they are pure functions of the record."""
    profile.compact_vector = build_compact_vector(profile, derive_stream(master_seed, "content-noise", (profile.content_id,)))
    profile.visual_embedding, profile.audio_embedding, profile.caption_embedding = build_embeddings(profile)
    return profile


# -- captions ------------------------------------------------------------------

_TITLE_PATTERNS = (
    "{Adj} {topic} you need to see",
    "POV: {topic} gone right",
    "{topic} in {n} seconds",
    "Wait for the end of this {topic}",
    "My {adj} {topic} routine",
)
_ADJECTIVES = ("wild", "cozy", "perfect", "chaotic", "unexpected", "tiny", "epic")


def template_caption(archetype: str, trend_context: Sequence[str], rng: RngStream) -> dict[str, Any]:
    """Template caption; any supplied trending tag is carried into the hashtags."""
    topic_tags = TOPIC_TAGS[archetype]
    topic = rng.choice(topic_tags)
    adj = rng.choice(_ADJECTIVES)
    title = rng.choice(_TITLE_PATTERNS).format(Adj=adj.capitalize(), adj=adj, topic=topic, n=5 + rng.randrange(55))
    tags = [archetype_tag(archetype), topic]
    for tag in trend_context[:1]:
        t = canonical_tag(tag)
        if t and t not in tags:
            tags.append(t)
    description = f"{ARCHETYPE_BY_NAME[archetype].signature.split(',')[0]}. #{' #'.join(tags)}"
    return {"title": title, "description": description, "hashtags": tags}


CaptionService = Callable[[str, Sequence[str], int], Mapping[str, Any] | None]


def sample_archetype(domain: str, rng: RngStream) -> str:
    home = resolve_archetype(domain)
    if rng.random() < EXPERTISE_BIAS:
        return home
    others = [a for a in ARCHETYPE_NAMES if a != home]
    return rng.choice(others)


def create_content(
    creator,
    step: int,
    trend_context: Sequence[str],
    caption_source: str,
    rng: RngStream,
    content_id: int,
    plan_entry: Mapping[str, Any] | None = None,
    caption_service: CaptionService | None = None,
) -> ContentProfile:
    """Generate a content record for ``creator`` (vectors are attached by :func:`materialize`).

    A campaign-plan entry, when given, fixes the archetype (via its category),
    contributes its hashtags and caption, and carries its call-to-action.
    """
    if creator.creator_tier not in TIER_SHIFT:
        raise PolicyError(f"agent {creator.agent_id} is a consumer and cannot create content")
    if plan_entry is not None and plan_entry.get("category"):
        archetype = resolve_archetype(str(plan_entry["category"]))
    else:
        archetype = sample_archetype(creator.domain_expertise, rng)
    arch = ARCHETYPE_BY_NAME[archetype]
    shift = TIER_SHIFT[creator.creator_tier]
    duration = max(1.0, rng.gauss(arch.duration_mean, arch.duration_sd))
    hook = min(1.0, max(0.01, rng.gauss(BASE_HOOK[archetype] + shift, 0.12)))
    quality = min(1.0, max(0.0, rng.gauss(0.5 + shift, 0.15)))
    virality = min(1.0, max(0.0, rng.gauss(arch.viral_potential, 0.1)))
    visual = tuple(rng.sample(VISUAL_KEYWORDS[archetype], 2))
    audio = tuple(rng.sample(AUDIO_KEYWORDS[archetype], 1))

    caption = None
    source = "template"
    if caption_source == "llm" and caption_service is not None:
        caption = caption_service(archetype, list(trend_context), creator.agent_id)
        if caption:
            source = "llm"
    if not caption:
        caption = template_caption(archetype, trend_context, rng)
    tags: list[str] = []
    extra = list(plan_entry.get("hashtags", ())) if plan_entry else []
    for tag in list(caption["hashtags"]) + extra:
        t = canonical_tag(tag)
        if t and t not in tags:
            tags.append(t)
    tags = tags[:MAX_HASHTAGS]
    title = str(caption["title"])
    if plan_entry and plan_entry.get("short_caption"):
        title = str(plan_entry["short_caption"])
    return ContentProfile(
        content_id=content_id,
        creator_id=creator.agent_id,
        archetype=archetype,
        title=title,
        description=str(caption["description"]),
        hashtags=tuple(tags),
        visual_keywords=visual,
        audio_keywords=audio,
        duration=duration,
        hook_strength=hook,
        quality_score=quality,
        virality=virality,
        created_step=step,
        caption_source=source,
        cta=(plan_entry or {}).get("cta"),
        plan_tick=(plan_entry or {}).get("plan_tick"),
    )


# -- dynamic state --------------------------------------------------------------

_ENGAGEMENT_COUNTER = {"like": "likes", "share": "shares", "comment": "comments"}


def apply_interaction(profile: ContentProfile, event: TypedEvent) -> ContentProfile:
    """Update counters in place for a watch, skip, engagement or gift event."""
    p = event.payload
    et = event.event_type
    if et == EventType.VIDEO_WATCHED or et == EventType.VIDEO_SKIPPED:
        profile.views += 1
        profile.watch_time_total += p["watch_time"]
        if p["is_skipped"]:
            profile.skips += 1
        else:
            profile.completion_total += p["completion_rate"]
            profile.completed_views += 1
    elif et == EventType.VIDEO_ENGAGED:
        attr = _ENGAGEMENT_COUNTER.get(p["engagement_type"])
        if attr is not None:
            setattr(profile, attr, getattr(profile, attr) + 1)
    elif et == EventType.GIFT_SENT:
        profile.gifts += 1
        profile.gift_revenue += p["amount"]
    else:
        raise ValueError(f"content twin does not handle {et.value}")
    profile.engagement_rate = (profile.likes + profile.shares + profile.comments) / max(profile.views, 1)
    profile.last_interaction_step = max(profile.last_interaction_step, event.step)
    return profile


@dataclass(frozen=True)
class CandidateFilter:
    archetypes: frozenset[str] | None = None
    created_after: int | None = None
    stages: frozenset[str] | None = None
    creators: frozenset[int] | None = None


class ContentStore:
    """Append-only store indexed by content id, with dense arrays for ranking."""

    HANDLER = "content_twin"

    def __init__(self, master_seed: int) -> None:
        self.master_seed = master_seed
        self.items: list[ContentProfile] = []
        self._cap = 64
        self.compact = np.zeros((self._cap, COMPACT_DIM))
        self.compact_norm = np.zeros(self._cap)
        self.created_step = np.zeros(self._cap, dtype=np.int64)
        self.creator = np.zeros(self._cap, dtype=np.int64)
        self.quality = np.zeros(self._cap)
        self.visual50 = np.zeros((self._cap, COMPACT_DIM))
        self.by_creator: dict[int, list[int]] = {}
        self.hashtag_index: dict[str, list[int]] = {}

    def __len__(self) -> int:
        return len(self.items)

    def next_id(self) -> int:
        return len(self.items)

    def get(self, content_id: int) -> ContentProfile:
        if not 0 <= content_id < len(self.items):
            raise KeyError(f"unknown content_id {content_id}")
        return self.items[content_id]

    def lookup_vector(self, content_id: int) -> tuple[np.ndarray, int, str]:
        c = self.get(content_id)
        return c.compact_vector, c.creator_id, c.archetype

    def _grow(self) -> None:
        self._cap *= 2
        for name in ("compact", "visual50"):
            old = getattr(self, name)
            new = np.zeros((self._cap, COMPACT_DIM))
            new[: old.shape[0]] = old
            setattr(self, name, new)
        for name in ("compact_norm", "created_step", "creator", "quality"):
            old = getattr(self, name)
            new = np.zeros(self._cap, dtype=old.dtype)
            new[: old.shape[0]] = old
            setattr(self, name, new)

    def insert(self, profile: ContentProfile) -> ContentProfile:
        if profile.content_id != len(self.items):
            raise ValueError(f"content ids must be contiguous: expected {len(self.items)}, got {profile.content_id}")
        if profile.compact_vector is None:
            materialize(profile, self.master_seed)
        if len(self.items) >= self._cap:
            self._grow()
        i = profile.content_id
        self.items.append(profile)
        self.compact[i] = profile.compact_vector
        self.compact_norm[i] = float(np.linalg.norm(profile.compact_vector))
        self.visual50[i] = profile.visual_embedding[:COMPACT_DIM]
        self.created_step[i] = profile.created_step
        self.creator[i] = profile.creator_id
        self.quality[i] = profile.quality_score
        self.by_creator.setdefault(profile.creator_id, []).append(i)
        for tag in profile.hashtags:
            self.hashtag_index.setdefault(tag, []).append(i)
        return profile

    # -- bus wiring ------------------------------------------------------------
    def attach(self, bus) -> None:
        bus.subscribe(EventType.CONTENT_CREATED, self.HANDLER, self._on_created)
        for et in (EventType.VIDEO_WATCHED, EventType.VIDEO_SKIPPED, EventType.VIDEO_ENGAGED, EventType.GIFT_SENT):
            bus.subscribe(et, self.HANDLER, self._on_interaction)

    def _on_created(self, event: TypedEvent) -> None:
        self.insert(ContentProfile.from_record(event.payload["content"]))

    def _on_interaction(self, event: TypedEvent) -> None:
        apply_interaction(self.get(event.payload["content_id"]), event)

    # -- read-only queries -------------------------------------------------------
    def query_candidates(
        self, flt: CandidateFilter | None = None, stage_of: Callable[[int], str] | None = None
    ) -> list[ContentProfile]:
        flt = flt or CandidateFilter()
        out = []
        for c in self.items:
            if flt.archetypes is not None and c.archetype not in flt.archetypes:
                continue
            if flt.created_after is not None and c.created_step <= flt.created_after:
                continue
            if flt.creators is not None and c.creator_id not in flt.creators:
                continue
            if flt.stages is not None and (stage_of is None or stage_of(c.content_id) not in flt.stages):
                continue
            out.append(c)
        return out

    def snapshot_records(self) -> list[str]:
        lines = []
        for c in self.items:
            rec = c.static_record()
            rec["dynamic"] = {k: getattr(c, k) for k in c.DYNAMIC_FIELDS}
            lines.append(json.dumps(rec, sort_keys=True, separators=(",", ":")))
        return lines

    def state_hash(self) -> str:
        h = hashlib.sha256()
        for line in self.snapshot_records():
            h.update(line.encode())
            h.update(b"\n")
        return h.hexdigest()

    def hashtag_usage(self) -> dict[str, int]:
        return {tag: len(ids) for tag, ids in sorted(self.hashtag_index.items())}


def iter_hashtags(items: Iterable[ContentProfile]) -> Iterable[str]:
    for c in items:
        yield from c.hashtags
