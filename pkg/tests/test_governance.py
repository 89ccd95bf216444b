from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from svtwin.core.errors import ConfigError
from svtwin.platform.governance.cascades import CascadeTracker, CascadeTree, recompute_metrics
from svtwin.platform.governance.control import (
    BoostLedger,
    Forecast,
    GovernanceAction,
    GovernanceGoals,
    TelemetrySnapshot,
    control_step,
    guard,
    guarded_execute,
)
from svtwin.platform.governance.trends import TrendConfig, TrendState, TrendTracker, classify_lifecycle

GOALS = GovernanceGoals()


def state(key, velocity, counts=(1,)):
    return TrendState(key, tuple(counts), velocity, velocity, "emergence", "emergence")


# -- trends -----------------------------------------------------------------------
def test_lifecycle_examples():
    assert classify_lifecycle([1, 2, 4, 8]) == "emergence"
    assert classify_lifecycle([8, 4, 2, 1]) == "decline"
    assert classify_lifecycle([1, 5, 3, 5]) == "peak"


def test_silent_keys_are_absent():
    tracker = TrendTracker()
    tracker.record("dance", 0)
    assert [s.key for s in tracker.states(0)] == ["dance"]
    assert tracker.velocity("cats", 0) == 0.0
    assert tracker.states(30) == []


def test_velocity_counts_window_per_hour():
    tracker = TrendTracker(TrendConfig(window_epochs=4))
    for step, n in enumerate([10, 20, 30, 40, 50]):
        tracker.record("x", step, n)
    # Window at step 4 covers epochs 1..4.
    assert tracker.velocity("x", 4) == pytest.approx((20 + 30 + 40 + 50) / 4)
    # A key that exists for a single epoch is rated over that epoch only.
    tracker.record("y", 4, 8)
    assert tracker.velocity("y", 4) == 8.0


@settings(max_examples=50)
@given(st.lists(st.tuples(st.sampled_from("abc"), st.integers(0, 60), st.integers(1, 5)), max_size=80))
def test_velocity_matches_brute_force_recount(events):
    cfg = TrendConfig(window_epochs=6)
    tracker = TrendTracker(cfg)
    for key, step, n in sorted(events, key=lambda e: e[1]):
        tracker.record(key, step, n)
    for key in "abc":
        seen = [step for k, step, _ in events if k == key]
        for now in range(max(seen, default=0), 65, 7):
            window = sum(n for k, step, n in events if k == key and now - 6 < step <= now)
            if not seen:
                assert tracker.velocity(key, now) == 0.0
                continue
            span = max(1, min(6, now - min(seen) + 1))
            assert tracker.velocity(key, now) == pytest.approx(window / span)


@given(st.lists(st.integers(0, 20), min_size=1, max_size=24))
def test_lifecycle_is_pure(counts):
    assert classify_lifecycle(counts) == classify_lifecycle(list(counts))
    assert classify_lifecycle(counts) in ("emergence", "peak", "decline")


# -- cascades ---------------------------------------------------------------------
def test_cascade_examples():
    single = CascadeTree(0)
    single.add_share(5, None, 0)
    assert (single.depth, single.branching_factor) == (1, 1.0)
    chain = CascadeTree(0)
    chain.add_share(1, None, 0)
    chain.add_share(2, 1, 1)
    assert chain.depth == 2
    star = CascadeTree(0)
    for s in range(4):
        star.add_share(s, None, 0)
    assert (star.depth, star.branching_factor) == (1, 4.0)
    assert recompute_metrics(star.nodes) == (1, 4.0)


def test_repeat_share_and_unknown_parent():
    tree = CascadeTree(0)
    assert tree.add_share(1, None, 0)
    assert not tree.add_share(1, None, 1)
    tree.add_share(2, 99, 1)
    assert tree.flagged == 1 and tree.depth_of[2] == 1


@settings(max_examples=80)
@given(st.lists(st.tuples(st.integers(0, 120), st.integers(-1, 120)), max_size=100))
def test_incremental_metrics_match_recomputation(shares):
    tracker = CascadeTracker()
    for step, (sharer, parent) in enumerate(shares):
        tracker.record_share(0, sharer, None if parent < 0 else parent, step)
    tree = tracker.trees.get(0)
    if tree is not None:
        assert (tree.depth, tree.branching_factor) == recompute_metrics(tree.nodes)


# -- control ----------------------------------------------------------------------
def test_strategies():
    snap = TelemetrySnapshot(10, (state("hot", 120.0), state("cold", 20.0)), (Forecast("cold", 0.9),))
    assert control_step(snap, "S0", GOALS) == []
    s1 = control_step(snap, "S1", GOALS)
    assert [(a.kind, a.target) for a in s1] == [("boost", "hot")]
    s2 = control_step(snap, "S2", GOALS)
    assert [(a.kind, a.target) for a in s2] == [("boost", "cold"), ("boost", "hot")]
    low = TelemetrySnapshot(10, (state("cold", 20.0),), (Forecast("cold", 0.5),))
    assert control_step(low, "S2", GOALS) == []
    with pytest.raises(ConfigError):
        control_step(snap, "S9", GOALS)


def test_s1_gate_is_strict():
    snap = TelemetrySnapshot(0, (state("edge", 100.0), state("over", 100.5)))
    assert [a.target for a in control_step(snap, "S1", GOALS)] == ["over"]


def test_guards():
    ledger = BoostLedger()
    ok = GovernanceAction("boost", "dance", 2.0, "r")
    assert guard(ok, ledger, {"dance"}, 0, GOALS)[0] == "pass"
    assert guard(GovernanceAction("boost", "dance", 50.0, "r"), ledger, {"dance"}, 0, GOALS)[0] == "fail"
    assert guard(GovernanceAction("boost", "ghost", 2.0, "r"), ledger, {"dance"}, 0, GOALS)[0] == "fail"
    keys = {f"k{i}" for i in range(7)}
    results = [guarded_execute(GovernanceAction("boost", f"k{i}", 2.0, "r"), ledger, keys, 0, GOALS, i)["guard_result"] for i in range(7)]
    assert results == ["pass"] * 5 + ["fail"] * 2
    assert len(ledger.audit) == 7 and len(ledger.live(0)) == 5


def test_live_boost_is_not_renewed():
    ledger = BoostLedger()
    first = guarded_execute(GovernanceAction("boost", "a", 2.0, "r"), ledger, {"a"}, 0, GOALS, 0, expires_step=5)
    again = guarded_execute(GovernanceAction("boost", "a", 3.0, "r"), ledger, {"a"}, 3, GOALS, 1, expires_step=8)
    assert (first["guard_result"], again["guard_result"]) == ("pass", "fail")
    assert ledger.active["a"] == (2.0, 5)
    assert guarded_execute(GovernanceAction("boost", "a", 3.0, "r"), ledger, {"a"}, 5, GOALS, 2, expires_step=10)["guard_result"] == "pass"


def test_ledger_expiry_and_multiplier():
    ledger = BoostLedger()
    guarded_execute(GovernanceAction("boost", "a", 2.0, "r"), ledger, {"a"}, 0, GOALS, 0, expires_step=5)
    assert ledger.multiplier(["a", "b"], 4) == 2.0
    assert ledger.multiplier(["a"], 5) == 1.0
    ledger.expire(5)
    assert ledger.active == {}


def test_audit_replay_reconstructs_ledger():
    ledger = BoostLedger()
    keys = {"a", "b", "c"}
    for i, (t, m) in enumerate([("a", 2.0), ("b", 9.0), ("c", 1.5), ("ghost", 2.0)]):
        guarded_execute(GovernanceAction("boost", t, m, "r"), ledger, keys, i, GOALS, i)
    rebuilt = BoostLedger()
    for rec in ledger.audit:
        rebuilt.apply(rec)
    assert rebuilt.state_hash() == ledger.state_hash()
    assert rebuilt.active == ledger.active
