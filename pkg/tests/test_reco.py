from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from svtwin.core.errors import ConfigError
from svtwin.platform.reco import (
    RecoConfig,
    RecoInputs,
    ScoredCandidate,
    featurize,
    preset,
    rank,
    rerank,
    retrieve,
    score_of,
    serve_feed,
    similarities,
)


def inputs(n, creators=None, created=None, quality=None, viral=(), seed=0, stages=None, gov=None):
    rng = np.random.default_rng(seed)
    compact = rng.uniform(0, 1, (n, 50))
    creators = np.asarray(creators if creators is not None else np.arange(n) + 100, dtype=np.int64)
    by_creator: dict[int, list[int]] = {}
    for i, c in enumerate(creators.tolist()):
        by_creator.setdefault(c, []).append(i)
    stages = stages or ["initial"] * n
    return RecoInputs(
        n_items=n,
        compact=compact,
        compact_norm=np.linalg.norm(compact, axis=1) if n else np.zeros(0),
        created_step=np.asarray(created if created is not None else np.zeros(n), dtype=np.int64),
        creator=creators,
        quality=np.asarray(quality if quality is not None else rng.uniform(0, 1, n)),
        stage_weight=np.ones(n),
        stage_of=lambda i: stages[i],
        governance_multiplier=np.asarray(gov if gov is not None else np.ones(n)),
        viral_ids=list(viral),
        by_creator=by_creator,
    )


PREF = np.full(50, 0.1)


def test_presets_and_validation():
    assert preset("tiktok").weights == (0.4, 0.3, 0.2, 0.1)
    assert preset("kuaishou").pool_mix["social"] == 0.45
    hybrid = preset("hybrid", 0.5)
    assert hybrid.pool_mix["social"] == pytest.approx(0.325)
    with pytest.raises(ConfigError):
        preset("youtube")
    with pytest.raises(ConfigError):
        RecoConfig(diversity=0)


def test_no_follows_redistributes_social_quota():
    inp = inputs(30)
    cands = retrieve(0, PREF, set(), inp, RecoConfig(retrieval_n=10), 0)
    assert len(cands) == 10
    assert not any(c.source_pool == "social" for c in cands)


def test_single_viral_item_is_retrieved_as_viral():
    inp = inputs(300, viral=[17])
    cands = retrieve(0, PREF, set(), inp, RecoConfig(retrieval_n=20), 0)
    assert [c.source_pool for c in cands if c.content_id == 17] == ["viral"]


def test_overlap_is_tagged_with_highest_priority_pool():
    creators = [100] * 3 + list(range(200, 297))
    inp = inputs(100, creators=creators, viral=[0, 1, 5])
    cands = retrieve(0, PREF, {100}, inp, RecoConfig(retrieval_n=30), 0)
    pools = {c.content_id: c.source_pool for c in cands}
    assert len(pools) == len(cands)
    assert pools[0] == pools[1] == "social"
    assert pools[5] == "viral"


def test_own_uploads_are_excluded():
    inp = inputs(20, creators=[7] * 20)
    assert retrieve(7, PREF, set(), inp, RecoConfig(), 0) == []


def test_degenerate_weights():
    inp = inputs(40)
    sims = similarities(PREF, inp)
    sim_only = RecoConfig(weights=(1.0, 0.0, 0.0, 0.0))
    cands = featurize(retrieve(0, PREF, set(), inp, sim_only, 0), sims, set(), inp, sim_only, 0)
    ranked = rank(cands, sim_only)
    assert [c.content_id for c in ranked] == [c.content_id for c in sorted(cands, key=lambda c: (-c.sim, c.content_id))]
    zero = RecoConfig(weights=(0.0, 0.0, 0.0, 0.0))
    ranked = rank(featurize(retrieve(0, PREF, set(), inp, zero, 0), sims, set(), inp, zero, 0), zero)
    assert all(c.score == 0.0 for c in ranked)
    assert [c.content_id for c in ranked] == sorted(c.content_id for c in ranked)


def test_score_arithmetic():
    c = ScoredCandidate(0, "semantic", 1, sim=0.5, quality=0.8, recency=1.0, social=0.0)
    assert score_of(c, (0.4, 0.3, 0.2, 0.1)) == pytest.approx(0.64, abs=1e-12)


def _ranked(pairs):
    return [ScoredCandidate(i, "semantic", creator, score=1.0 - 0.1 * i) for i, creator in pairs]


def test_diversity_cap():
    feed, dropped = rerank(_ranked([(0, 1), (1, 1), (2, 2), (3, 3)]), RecoConfig(diversity=1, feed_length=3))
    assert [c.content_id for c in feed] == [0, 2, 3] and dropped == [1]
    ranked = _ranked([(0, 1), (1, 2), (2, 3)])
    feed, _ = rerank(ranked, RecoConfig(diversity=5, feed_length=3))
    assert feed == ranked
    feed, _ = rerank(_ranked([(i, 9) for i in range(5)]), RecoConfig(diversity=1, feed_length=5))
    assert len(feed) == 1


def test_empty_store_feed():
    feed, trace = serve_feed(0, PREF, set(), inputs(0), RecoConfig(), 0)
    assert feed == [] and trace["note"] == "empty retrieval"


@settings(max_examples=60, deadline=None)
@given(
    st.integers(1, 120),
    st.integers(0, 2**31),
    st.sampled_from(["tiktok", "kuaishou", "hybrid"]),
    st.integers(1, 3),
    st.integers(0, 60),
)
def test_serve_feed_equals_staged_pipeline(n, seed, variant, diversity, step):
    rng = np.random.default_rng(seed)
    creators = rng.integers(0, max(2, n // 3), n)
    created = rng.integers(0, step + 1, n)
    gov = rng.choice([1.0, 2.0], n)
    inp = inputs(n, creators=creators, created=created, viral=sorted(set(rng.integers(0, n, 2).tolist())), seed=seed, gov=gov)
    cfg = preset(variant, 0.5, retrieval_n=int(rng.integers(1, 60)), diversity=diversity, feed_length=5)
    following = set(rng.integers(0, max(2, n // 3), 2).tolist())
    pref = rng.uniform(0, 1, 50)
    sims = similarities(pref, inp)
    staged, dropped = rerank(rank(featurize(retrieve(-1, pref, following, inp, cfg, step, sims), sims, following, inp, cfg, step), cfg), cfg)
    feed, trace = serve_feed(-1, pref, following, inp, cfg, step)
    assert [c.content_id for c in feed] == [c.content_id for c in staged]
    assert trace["dropped"] == dropped
    for a, b in zip(feed, staged):
        assert a.score == pytest.approx(b.score, abs=1e-12)
        assert abs(score_of(a, cfg.weights) - a.score) <= 1e-12
    ids = [c.content_id for c in feed]
    assert len(ids) == len(set(ids))
    per_creator: dict[int, int] = {}
    for c in feed:
        per_creator[c.creator_id] = per_creator.get(c.creator_id, 0) + 1
    assert max(per_creator.values(), default=0) <= diversity


def test_serving_is_read_only_and_deterministic():
    inp = inputs(80, creators=np.arange(80) % 20)
    before = (inp.compact.tobytes(), inp.quality.tobytes(), inp.governance_multiplier.tobytes())
    a = serve_feed(3, PREF, {5, 6}, inp, RecoConfig(), 10)
    b = serve_feed(3, PREF, {5, 6}, inp, RecoConfig(), 10)
    assert a == b
    assert before == (inp.compact.tobytes(), inp.quality.tobytes(), inp.governance_multiplier.tobytes())


def test_kuaishou_favours_followed_creators():
    # Followed creators post weaker, older items; tiktok mostly passes them over.
    n = 200
    creators = np.arange(n) + 1000
    creators[:40] = np.arange(40) % 8
    created = np.full(n, 40)
    created[:40] = 0
    quality = np.full(n, 0.9)
    quality[:40] = 0.3
    inp = inputs(n, creators=creators, created=created, quality=quality)
    following = set(range(8))
    counts = {}
    for variant in ("tiktok", "kuaishou"):
        feed, _ = serve_feed(99, PREF, following, inp, preset(variant, feed_length=5), 48)
        counts[variant] = sum(c.creator_id in following for c in feed)
    assert counts["kuaishou"] >= counts["tiktok"]
    assert counts["kuaishou"] > 0


def test_hybrid_pre_rank_filter_drops_limited():
    stages = ["limited" if i % 2 else "initial" for i in range(30)]
    inp = inputs(30, stages=stages)
    cfg = preset("hybrid", 0.5, pre_rank_filter=True)
    feed, trace = serve_feed(0, PREF, set(), inp, cfg, 0)
    assert trace["filtered"] and all(i % 2 for i in trace["filtered"])
    assert all(c.content_id % 2 == 0 for c in feed)
