from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from svtwin.platform.registry import AccessViolation, IntegrityError, Registry


def populated() -> Registry:
    reg = Registry(cache_capacity=2)
    reg.commit("platform_registry", {"op": "set_control", "key": "gate", "value": {"initial_quota": 100}})
    reg.commit("platform_registry", {"op": "register_content", "content_id": 0, "creator_id": 7, "hashtags": ["dance"]})
    reg.commit("platform_registry", {"op": "interaction", "kind": "watched", "content_id": 0, "user_id": 1, "creator_id": 7, "watch_time": 4.0})
    reg.commit("platform_registry", {"op": "interaction", "kind": "like", "content_id": 0, "user_id": 1, "creator_id": 7})
    reg.commit("platform_registry", {"op": "interaction", "kind": "gift", "content_id": 0, "user_id": 1, "creator_id": 7, "amount": 5.0})
    return reg


def test_only_platform_handlers_write():
    reg = Registry()
    with pytest.raises(AccessViolation):
        reg.commit("user_twin", {"op": "set_control", "key": "x", "value": 1})
    with pytest.raises(AccessViolation):
        reg.commit("content_twin", {"op": "set_control", "key": "x", "value": 1})
    assert reg.version == 0 and reg.control == {}


def test_versions_are_sequential():
    reg = populated()
    assert reg.version == 5
    assert [int(line.split('"v":')[1].split("}")[0]) for line in reg.journal] == [1, 2, 3, 4, 5]


def test_aggregates():
    reg = populated()
    c = reg.query("content", 0)[0]
    assert (c["views"], c["likes"], c["gifts"], c["gift_revenue"], c["watch_time"]) == (1, 1, 1, 5.0, 4.0)
    assert dict(reg.query("hashtag", "dance")) == {"uses": 1, "views": 1, "engagements": 1}
    assert reg.creator_gift_revenue() == {7: 5.0}
    assert reg.query("user", 1)["gifts_sent"] == 1


def test_queries_are_read_only():
    reg = populated()
    view = reg.query("control")
    with pytest.raises(TypeError):
        view["gate"] = 1  # type: ignore[index]
    view["gate"]["initial_quota"] = 0
    assert reg.control["gate"]["initial_quota"] == 100
    with pytest.raises(KeyError):
        reg.query("secrets")


def test_snapshot_restore_round_trip():
    reg = populated()
    back = Registry.restore(reg.snapshot())
    assert back.state_hash() == reg.state_hash()
    tampered = reg.snapshot().replace('"gift_revenue":5.0', '"gift_revenue":6.0')
    with pytest.raises(IntegrityError):
        Registry.restore(tampered)
    with pytest.raises(IntegrityError):
        Registry.restore("{}")


def test_journal_replay_and_gaps():
    reg = populated()
    assert Registry.from_journal(reg.journal).state_hash() == reg.state_hash()
    with pytest.raises(IntegrityError):
        Registry.from_journal(reg.journal[:1] + reg.journal[2:])
    base = Registry.restore(Registry.from_journal(reg.journal[:3]).snapshot())
    assert Registry.from_journal(reg.journal, base).state_hash() == reg.state_hash()


def test_journal_file_matches_memory(tmp_path):
    path = tmp_path / "j.jsonl"
    reg = Registry(journal_path=path)
    reg.commit("platform_registry", {"op": "set_control", "key": "k", "value": [1, 2]})
    reg.close()
    assert path.read_text().splitlines() == reg.journal


def test_rolling_cache_is_bounded_and_consistent():
    reg = populated()
    for cid in (1, 2, 3):
        reg.commit("platform_registry", {"op": "register_content", "content_id": cid, "creator_id": 7, "hashtags": []})
        reg.commit("platform_registry", {"op": "interaction", "kind": "skipped", "content_id": cid, "user_id": 2, "creator_id": 7, "watch_time": 1.0})
    assert len(reg.cache) == 2 and reg.reconcile_cache() == []


@settings(max_examples=40)
@given(st.lists(st.tuples(st.sampled_from(["watched", "skipped", "like", "share", "comment", "gift"]), st.integers(0, 3), st.integers(0, 5)), max_size=60))
def test_counters_match_brute_force(ops):
    reg = Registry()
    for cid in range(4):
        reg.commit("platform_registry", {"op": "register_content", "content_id": cid, "creator_id": cid, "hashtags": ["t"]})
    for kind, cid, uid in ops:
        m = {"op": "interaction", "kind": kind, "content_id": cid, "user_id": uid, "creator_id": cid, "watch_time": 1.0, "amount": 1.0}
        reg.commit("platform_registry", m)
    for cid in range(4):
        c = reg.query("content", cid)[cid]
        assert c["views"] == sum(1 for k, i, _ in ops if i == cid and k in ("watched", "skipped"))
        assert c["likes"] == sum(1 for k, i, _ in ops if i == cid and k == "like")
        assert c["gift_revenue"] == sum(1.0 for k, i, _ in ops if i == cid and k == "gift")
    assert reg.query("hashtag", "t")["engagements"] == sum(1 for k, _, _ in ops if k in ("like", "share", "comment"))
