"""Two-stage recommendation: multi-pool retrieval, weighted ranking, diversity re-rank."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, NamedTuple, Sequence

import numpy as np

from svtwin.core.errors import ConfigError

POOLS = ("social", "viral", "semantic", "recent")
POOL_PRIORITY = {p: i for i, p in enumerate(POOLS)}

TIKTOK_MIX = {"social": 0.2, "viral": 0.2, "semantic": 0.4, "recent": 0.2}
KUAISHOU_MIX = {"social": 0.45, "viral": 0.1, "semantic": 0.3, "recent": 0.15}
TIKTOK_WEIGHTS = (0.4, 0.3, 0.2, 0.1)
KUAISHOU_WEIGHTS = (0.3, 0.2, 0.1, 0.4)


@dataclass(frozen=True)
class RecoConfig:
    variant: str = "tiktok"
    retrieval_n: int = 100
    pool_mix: Mapping[str, float] = field(default_factory=lambda: dict(TIKTOK_MIX))
    weights: tuple[float, float, float, float] = TIKTOK_WEIGHTS
    diversity: int = 1
    feed_length: int = 5
    hybrid_lambda: float = 0.5
    pre_rank_filter: bool = False
    half_life: float = 24.0
    viral_fraction: float = 0.01

    def __post_init__(self) -> None:
        if self.variant not in ("tiktok", "kuaishou", "hybrid"):
            raise ConfigError(f"unknown reco variant {self.variant!r}")
        if set(self.pool_mix) != set(POOLS) or abs(sum(self.pool_mix.values()) - 1.0) > 1e-9:
            raise ConfigError("pool_mix must cover social/viral/semantic/recent and sum to 1")
        if any(w < 0 for w in self.weights) or len(self.weights) != 4:
            raise ConfigError("ranking weights must be four non-negative numbers")
        if not 0.0 <= self.hybrid_lambda <= 1.0:
            raise ConfigError("hybrid_lambda must lie in [0, 1]")
        if self.diversity < 1 or self.feed_length < 1 or self.retrieval_n < 1:
            raise ConfigError("diversity, feed_length and retrieval_n must be positive")
        if self.half_life <= 0:
            raise ConfigError("half_life must be positive")


def preset(variant: str, hybrid_lambda: float = 0.5, **overrides) -> RecoConfig:
    """Variant defaults; ``hybrid`` interpolates kuaishou (lambda=1) and tiktok (lambda=0)."""
    if variant == "tiktok":
        mix, weights = dict(TIKTOK_MIX), TIKTOK_WEIGHTS
    elif variant == "kuaishou":
        mix, weights = dict(KUAISHOU_MIX), KUAISHOU_WEIGHTS
    elif variant == "hybrid":
        lam = hybrid_lambda
        mix = {p: (1 - lam) * TIKTOK_MIX[p] + lam * KUAISHOU_MIX[p] for p in POOLS}
        weights = tuple((1 - lam) * a + lam * b for a, b in zip(TIKTOK_WEIGHTS, KUAISHOU_WEIGHTS))
    else:
        raise ConfigError(f"unknown reco variant {variant!r}")
    return RecoConfig(variant=variant, pool_mix=mix, weights=weights, hybrid_lambda=hybrid_lambda, **overrides)


class ScoredCandidate(NamedTuple):
    content_id: int
    source_pool: str
    creator_id: int = -1
    sim: float = 0.0
    quality: float = 0.0
    recency: float = 0.0
    social: float = 0.0
    score: float = 0.0
    # Exposure multiplier from stage and governance; ranking orders by score * weight.
    weight: float = 1.0
    stage: str = "initial"

    @property
    def ranked_value(self) -> float:
        return self.score * self.weight


@dataclass
class RecoInputs:
    """Read-only view the recommender needs for one request."""

    n_items: int
    compact: np.ndarray
    compact_norm: np.ndarray
    created_step: np.ndarray
    creator: np.ndarray
    quality: np.ndarray
    # Dense per-item exposure multipliers (length >= n_items).
    stage_weight: np.ndarray
    stage_of: Callable[[int], str]
    governance_multiplier: np.ndarray
    viral_ids: Sequence[int]
    by_creator: Mapping[int, Sequence[int]]


def _quotas(n: int, shares: Mapping[str, float], available: Mapping[str, int]) -> dict[str, int]:
    live = {p: shares[p] for p in POOLS if available.get(p, 0) > 0 and shares[p] > 0}
    total = sum(live.values())
    if total <= 0:
        return {p: 0 for p in POOLS}
    raw = {p: n * live[p] / total for p in live}
    q = {p: int(math.floor(v)) for p, v in raw.items()}
    left = n - sum(q.values())
    for p in sorted(raw, key=lambda p: (-(raw[p] - q[p]), POOL_PRIORITY[p]))[:left]:
        q[p] += 1
    return {p: q.get(p, 0) for p in POOLS}


def similarities(pref: np.ndarray, inputs: RecoInputs) -> np.ndarray:
    n = inputs.n_items
    if n == 0:
        return np.zeros(0)
    pn = float(np.linalg.norm(pref))
    norms = inputs.compact_norm[:n]
    dots = inputs.compact[:n] @ pref
    with np.errstate(divide="ignore", invalid="ignore"):
        sims = np.where((norms > 0) & (pn > 0), dots / (norms * pn if pn > 0 else 1.0), 0.0)
    return np.clip(sims, -1.0, 1.0)


def _retrieve_arrays(
    user_id: int,
    following,
    inputs: RecoInputs,
    config: RecoConfig,
    sims: np.ndarray,
) -> tuple[np.ndarray, np.ndarray]:
    """Chosen item ids (ascending) and the index into ``POOLS`` that claimed each."""
    n = inputs.n_items
    ids = np.arange(n)
    own = inputs.creator[:n] == user_id

    followed = [np.asarray(inputs.by_creator[c], dtype=np.int64) for c in sorted(following) if c in inputs.by_creator]
    if followed:
        social = np.concatenate(followed)
        social = social[np.lexsort((social, -inputs.created_step[social]))]
    else:
        social = np.zeros(0, dtype=np.int64)
    viral = np.asarray([int(i) for i in inputs.viral_ids if not own[i]], dtype=np.int64)
    semantic = np.lexsort((ids, -sims))
    semantic = semantic[~own[semantic]]
    recent = np.lexsort((ids, -inputs.created_step[:n]))
    recent = recent[~own[recent]]
    pools = {"social": social, "viral": viral, "semantic": semantic, "recent": recent}

    quotas = _quotas(config.retrieval_n, config.pool_mix, {p: len(v) for p, v in pools.items()})
    # source[i] = index of the pool that claimed item i, or -1.
    source = np.full(n, -1, dtype=np.int64)
    for k, p in enumerate(POOLS):
        arr = pools[p]
        if quotas[p] and len(arr):
            source[arr[source[arr] < 0][: quotas[p]]] = k
    taken = int((source >= 0).sum())
    for p in ("semantic", "recent"):
        need = config.retrieval_n - taken
        if need <= 0:
            break
        arr = pools[p]
        add = arr[source[arr] < 0][:need]
        source[add] = POOL_PRIORITY[p]
        taken += len(add)
    chosen = np.flatnonzero(source >= 0)
    return chosen, source[chosen]


def retrieve(
    user_id: int,
    pref: np.ndarray,
    following: set[int] | frozenset[int],
    inputs: RecoInputs,
    config: RecoConfig,
    step: int,
    sims: np.ndarray | None = None,
) -> list[ScoredCandidate]:
    """Union of the four pools, deduplicated with social > viral > semantic > recent.

    Each pool contributes up to its share of ``retrieval_n``; shares of empty
    pools are redistributed and any shortfall is topped up from the semantic
    and then the recent ordering. The user's own uploads are excluded.
    """
    if inputs.n_items == 0:
        return []
    if sims is None:
        sims = similarities(pref, inputs)
    chosen, src = _retrieve_arrays(user_id, following, inputs, config, sims)
    creators = inputs.creator[chosen].tolist()
    return [ScoredCandidate(i, POOLS[k], c) for i, k, c in zip(chosen.tolist(), src.tolist(), creators)]


def featurize(
    candidates: Sequence[ScoredCandidate],
    sims: np.ndarray,
    following,
    inputs: RecoInputs,
    config: RecoConfig,
    step: int,
) -> list[ScoredCandidate]:
    """Attach features, exposure weight and the weighted utility score."""
    if not candidates:
        return []
    idl = [c.content_id for c in candidates]
    ids = np.asarray(idl, dtype=np.int64)
    age = np.maximum(0, step - inputs.created_step[ids])
    recency = np.exp(-age / config.half_life)
    w1, w2, w3, w4 = config.weights
    sim = sims[ids]
    quality = inputs.quality[ids]
    base = (w1 * sim + w2 * quality + w3 * recency).tolist()
    weight = (inputs.stage_weight[ids] * inputs.governance_multiplier[ids]).tolist()
    stage_of = inputs.stage_of
    out = []
    for c, s, q, r, b, w in zip(candidates, sim.tolist(), quality.tolist(), recency.tolist(), base, weight):
        social = 1.0 if c.creator_id in following else 0.0
        out.append(ScoredCandidate(c.content_id, c.source_pool, c.creator_id, s, q, r, social, b + w4 * social, w, stage_of(c.content_id)))
    return out


def score_of(c: ScoredCandidate, weights: Sequence[float]) -> float:
    w1, w2, w3, w4 = weights
    return w1 * c.sim + w2 * c.quality + w3 * c.recency + w4 * c.social


def rank(candidates: Sequence[ScoredCandidate], config: RecoConfig) -> list[ScoredCandidate]:
    """Sort featurized candidates by ``score * weight`` descending, ids ascending."""
    return sorted(candidates, key=lambda c: (-c.score * c.weight, c.content_id))


def rerank(ranked: Sequence[ScoredCandidate], config: RecoConfig) -> tuple[list[ScoredCandidate], list[int]]:
    """Greedy per-creator cap; returns the feed and the ids dropped by the cap."""
    feed: list[ScoredCandidate] = []
    per_creator: dict[int, int] = {}
    dropped: list[int] = []
    for c in ranked:
        if len(feed) >= config.feed_length:
            break
        k = per_creator.get(c.creator_id, 0)
        if k >= config.diversity:
            dropped.append(c.content_id)
            continue
        per_creator[c.creator_id] = k + 1
        feed.append(c)
    return feed, dropped


def serve_feed(
    user_id: int,
    pref: np.ndarray,
    following,
    inputs: RecoInputs,
    config: RecoConfig,
    step: int,
) -> tuple[list[ScoredCandidate], dict]:
    """Retrieve, rank and re-rank; the trace records candidate count and filter decisions.

    Vectorised equivalent of ``rerank(rank(featurize(retrieve(...))))``;
    only items that reach the feed are materialised as candidates.
    """
    trace: dict = {"candidates": 0, "filtered": [], "dropped": []}
    if inputs.n_items == 0:
        trace["note"] = "empty retrieval"
        return [], trace
    sims = similarities(pref, inputs)
    chosen, src = _retrieve_arrays(user_id, following, inputs, config, sims)
    trace["candidates"] = len(chosen)
    if config.variant == "hybrid" and config.pre_rank_filter and len(chosen):
        limited = np.asarray([inputs.stage_of(i) == "limited" for i in chosen.tolist()], dtype=bool)
        trace["filtered"] = chosen[limited].tolist()
        chosen, src = chosen[~limited], src[~limited]
    if not len(chosen):
        return [], trace
    w1, w2, w3, w4 = config.weights
    creators = inputs.creator[chosen]
    age = np.maximum(0, step - inputs.created_step[chosen])
    recency = np.exp(-age / config.half_life)
    sim = sims[chosen]
    quality = inputs.quality[chosen]
    social = np.isin(creators, np.fromiter(following, dtype=np.int64, count=len(following))).astype(float) if following else np.zeros(len(chosen))
    score = (w1 * sim + w2 * quality + w3 * recency) + w4 * social
    weight = inputs.stage_weight[chosen] * inputs.governance_multiplier[chosen]
    order = np.lexsort((chosen, -score * weight))
    feed: list[ScoredCandidate] = []
    per_creator: dict[int, int] = {}
    for j in order.tolist():
        if len(feed) >= config.feed_length:
            break
        c = int(creators[j])
        cid = int(chosen[j])
        k = per_creator.get(c, 0)
        if k >= config.diversity:
            trace["dropped"].append(cid)
            continue
        per_creator[c] = k + 1
        feed.append(
            ScoredCandidate(
                cid, POOLS[int(src[j])], c, float(sim[j]), float(quality[j]), float(recency[j]), float(social[j]), float(score[j]), float(weight[j]), inputs.stage_of(cid)
            )
        )
    return feed, trace
