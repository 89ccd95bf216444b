from __future__ import annotations

import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from svtwin.content.archetypes import ARCHETYPE_NAMES
from svtwin.core.rng import RngStream
from svtwin.decisions.budget import BudgetError, BudgetTracker, to_micro
from svtwin.decisions.cache import ResponseCache
from svtwin.decisions.clients import FixtureClient
from svtwin.decisions.normalize import normalize
from svtwin.decisions.optimizer import DecisionConfig, Optimizer, RequestQueue, batch_flush
from svtwin.decisions.schemas import SchemaViolation, output_errors
from svtwin.decisions.surrogates import surrogate_campaign, surrogate_trend, trend_signal
from svtwin.decisions.tasks import TIER_ORDER, DecisionRequest, Task, Tier
from svtwin.events.taxonomy import EventType


def caption(i: int) -> DecisionRequest:
    return DecisionRequest(Task.CAPTION, {"archetype": ARCHETYPE_NAMES[i % len(ARCHETYPE_NAMES)], "trend_context": [], "creator_id": i})


def persona(i: int) -> DecisionRequest:
    return DecisionRequest(Task.PERSONA, {"agent_id": i, "tier": "elite", "domain": "DANCE"})


def trend(i: int) -> DecisionRequest:
    return DecisionRequest(Task.TREND_PREDICTION, {"step": i, "series": {"dance": [1, 2, 4]}})


def comment(i: int) -> DecisionRequest:
    return DecisionRequest(Task.COMMENT, {"user_id": i, "content_id": 1, "archetype": "DANCE"})


def campaign_context(commerce: bool = True) -> dict:
    return {"creator_id": 1, "tier": "elite", "domain": "FOOD", "tick": 0, "commerce": commerce, "history": [], "trending": ["dance"]}


def optimizer(cap=100.0, published=None, **kw) -> Optimizer:
    pub = (lambda t, p: published.append((t, p))) if published is not None else None
    return Optimizer(DecisionConfig(mode="fixture", budget_cap=cap, **kw), publish=pub)


def set_utilization(opt: Optimizer, u: float) -> None:
    opt.budget.notional_micro = int(round(u * opt.budget.cap_micro))


# -- routing ---------------------------------------------------------------------
def test_comment_and_persona_thresholds():
    opt = optimizer(cap=10.0, comment_live=True)
    for u, comment_tier, persona_tier in [(0.80, Tier.LIVE, Tier.LIVE), (0.8001, Tier.SURROGATE, Tier.LIVE), (0.95, Tier.SURROGATE, Tier.LIVE), (0.9501, Tier.SURROGATE, Tier.SURROGATE)]:
        set_utilization(opt, u)
        assert opt.route(comment(0))[0] is comment_tier
        assert opt.route(persona(0))[0] is persona_tier


def test_comment_is_surrogate_only_by_default():
    assert optimizer().route(comment(0)) == (Tier.SURROGATE, "surrogate-only task")


def test_disabled_mode_always_surrogate():
    opt = Optimizer(DecisionConfig(mode="disabled"))
    res = opt.submit(persona(0))
    assert res.tier is Tier.SURROGATE and opt.budget.spent_total == 0.0
    assert not output_errors(Task.PERSONA, res.output)


@given(st.floats(0, 1.2), st.floats(0, 1.2), st.sampled_from([persona, caption, trend]))
def test_routing_is_monotone_in_utilization(u1, u2, make):
    lo, hi = sorted((u1, u2))
    opt = optimizer(cap=10.0)
    set_utilization(opt, lo)
    a = opt.route(make(0))[0]
    set_utilization(opt, hi)
    b = opt.route(make(0))[0]
    assert TIER_ORDER[b] >= TIER_ORDER[a]


# -- budget ----------------------------------------------------------------------
def test_budget_arithmetic():
    opt = optimizer(cap=10.0)
    results = opt.submit_many([trend(i) for i in range(400)])
    assert all(r.tier is Tier.LIVE for r in results)
    assert opt.budget.spent_total == pytest.approx(8.00, abs=1e-12)
    assert opt.spend_report()["utilization"] == pytest.approx(0.80, abs=1e-12)
    assert opt.budget.spent_by_task["TREND_PREDICTION"] == pytest.approx(8.00)


def test_budget_exceeded_event_and_cap():
    published: list = []
    opt = optimizer(cap=0.1, published=published)
    for i in range(12):
        opt.submit(persona(i))
        assert opt.budget.spent_micro <= opt.budget.cap_micro
    kinds = [t for t, _ in published]
    assert EventType.BUDGET_EXCEEDED in kinds
    assert opt.budget.spent_total == pytest.approx(0.1)
    assert [p["threshold"] for t, p in published if t is EventType.BUDGET_THRESHOLD_CROSSED] == [0.8, 0.9, 0.95, 1.0]
    assert kinds.count(EventType.BUDGET_EXCEEDED) == 1


def test_tracker_rejects_overspend():
    b = BudgetTracker(0.05)
    b.record_spend(Task.PERSONA, Tier.LIVE, 0.04)
    with pytest.raises(BudgetError):
        b.record_spend(Task.PERSONA, Tier.LIVE, 0.02)
    with pytest.raises(BudgetError):
        b.record_spend(Task.PERSONA, Tier.CACHED, 0.01)
    assert to_micro(0.02) * 400 == to_micro(8.0)


@given(st.lists(st.tuples(st.sampled_from(["p", "c", "t"]), st.integers(0, 30)), max_size=60), st.floats(0.0, 0.5))
def test_spend_never_exceeds_cap(ops, cap):
    opt = optimizer(cap=cap)
    make = {"p": persona, "c": caption, "t": trend}
    for kind, i in ops:
        opt.submit(make[kind](i))
        assert opt.budget.spent_micro <= opt.budget.cap_micro
        opt.budget.check()


# -- batching --------------------------------------------------------------------
def test_batches_of_fifty():
    assert [len(b) for b in batch_flush(list(range(120)))] == [50, 50, 20]
    opt = optimizer()
    opt.submit_many([caption(i) for i in range(120)])
    assert opt.client.batches == [50, 50, 20]


def test_queue_window():
    q = RequestQueue(batch_size=50, window_steps=2)
    for i in range(30):
        assert q.add(i, 5) == []
    assert q.due(6) == []
    assert [len(b) for b in q.due(7)] == [30]
    assert q.items == []
    full = [q.add(i, 0) for i in range(50)]
    assert [len(b) for b in full[-1]] == [50]


def test_duplicate_requests_in_one_batch_pay_once():
    opt = optimizer()
    results = opt.submit_many([persona(1), persona(1)])
    assert [r.tier for r in results] == [Tier.LIVE, Tier.CACHED]
    assert opt.client.calls == 1


# -- cache -----------------------------------------------------------------------
def test_cache_warm_rerun_is_free(tmp_path):
    path = tmp_path / "cache.jsonl"
    cold = Optimizer(DecisionConfig(mode="fixture", cache_path=str(path)))
    first = cold.submit_many([persona(i) for i in range(5)])
    assert cold.budget.spent_total == pytest.approx(0.10)
    warm = Optimizer(DecisionConfig(mode="fixture", cache_path=str(path)))
    second = warm.submit_many([persona(i) for i in range(5)])
    assert all(r.tier is Tier.CACHED for r in second)
    assert [r.output for r in second] == [r.output for r in first]
    assert warm.budget.spent_total == 0.0 and warm.client.calls == 0
    assert warm.budget.utilization() == cold.budget.utilization()


def test_cache_skips_bad_records(tmp_path):
    path = tmp_path / "c.jsonl"
    good = {"key": "k", "task": "COMMENT", "output": {"text": "hi"}, "cost": 0.0, "created_at": 0}
    bad = {"key": "b", "task": "COMMENT", "output": {"nope": 1}, "cost": 0.0, "created_at": 1}
    path.write_text(json.dumps(good) + "\n" + json.dumps(bad) + "\nnot json\n")
    cache = ResponseCache(path)
    assert "k" in cache and "b" not in cache and cache.rejected == 2


# -- normalization and fallback ---------------------------------------------------
def test_malformed_response_falls_back():
    opt = Optimizer(DecisionConfig(mode="fixture"), client=FixtureClient({"CAPTION": "{not json"}))
    res = opt.submit(caption(0))
    assert res.tier is Tier.SURROGATE and res.notes == ("malformed live response",)
    assert not output_errors(Task.CAPTION, res.output)
    assert len(opt.cache) == 0


def test_normalize_drops_unknown_fields():
    raw = json.dumps({"title": "t", "hashtags": ["#Dance", "dance", "Cats!"], "extra": 1})
    assert normalize(Task.CAPTION, raw) == {"title": "t", "description": "", "hashtags": ["dance", "cats"]}
    assert normalize(Task.CAPTION, json.dumps({"title": "t"})) is None
    assert normalize(Task.COMMENT, None) is None


def test_invalid_input_is_rejected():
    with pytest.raises(SchemaViolation):
        optimizer().submit(DecisionRequest(Task.PERSONA, {"agent_id": 1, "tier": "boss", "domain": "x"}))


# -- surrogates ------------------------------------------------------------------
@pytest.mark.parametrize("commerce", [True, False])
def test_campaign_plan_shape(commerce):
    plan = surrogate_campaign(campaign_context(commerce))
    assert not output_errors(Task.CAMPAIGN, plan)
    assert len(plan["entries"]) == 3
    assert {e["day_offset"] for e in plan["entries"]} == {0, 1, 2}
    assert plan["entries"][2]["cta"] == ("purchase" if commerce else "join_live")
    assert all("dance" not in e["hashtags"] for e in plan["entries"])


def test_campaign_needs_three_distinct_days():
    plan = surrogate_campaign(campaign_context())
    plan["entries"][2]["day_offset"] = 1
    assert output_errors(Task.CAMPAIGN, plan)


def test_trend_signal():
    assert trend_signal([1, 2, 4]) == pytest.approx(0.5)
    assert trend_signal([4, 2, 1]) is None
    assert trend_signal([1, 2]) is None
    out = surrogate_trend({"a": [1, 2, 4], "b": [1, 1, 1], "c": [1, 3, 8]})
    assert [(f["hashtag"], f["confidence"]) for f in out["forecasts"]] == [("c", 0.75), ("a", 0.5)]
    assert not output_errors(Task.TREND_PREDICTION, out)


@pytest.mark.parametrize("make", [persona, caption, trend, comment])
def test_surrogates_validate(make):
    opt = Optimizer(DecisionConfig(mode="disabled"))
    for i in range(20):
        req = make(i)
        out = opt.surrogate(req, "k", RngStream(i, "t"))
        assert not output_errors(req.task, out)
