"""End-to-end acceptance checks, one test per criterion.

The heavy 200-step, 500-agent runs are shared through session fixtures, so
the whole module performs eight full simulations.
"""

from __future__ import annotations

import collections
import itertools
import json
import math
import time

import numpy as np
import pytest

from svtwin.content.archetypes import ARCHETYPE_NAMES
from svtwin.core.metrics import cosine, gini, shannon_entropy_bits
from svtwin.core.rng import RngStream
from svtwin.decisions.optimizer import DecisionConfig, Optimizer
from svtwin.decisions.schemas import output_errors
from svtwin.decisions.surrogates import surrogate_campaign, surrogate_trend
from svtwin.decisions.tasks import DecisionRequest, Task, Tier
from svtwin.events.bus import read_log
from svtwin.events.taxonomy import EventType
from svtwin.experiments import ExperimentGrid, aggregate, run_grid
from svtwin.experiments.cli import main as cli_main
from svtwin.experiments.metrics import content_aggregates
from svtwin.experiments.report import read_csv
from svtwin.interaction.engine import BehaviorParams, skip_probability
from svtwin.interaction.outcome import EncounterOutcome
from svtwin.platform.promotion import EXPANDED, INITIAL, LIMITED, VIRAL, GateConfig, GateMetrics, StageRecord, evaluate_gate
from svtwin.platform.registry import Registry
from svtwin.sim import SimulationConfig, replay_world, run
from svtwin.users.learning import PREF_DIM, PreferenceState, update_preferences
from svtwin.users.memory import MemoryTrace, retention

SEEDS = (0, 1, 2)
GATE = 100.0


# -- shared heavy runs ------------------------------------------------------------
@pytest.fixture(scope="session")
def baseline_dir(tmp_path_factory):
    return tmp_path_factory.mktemp("baseline")


@pytest.fixture(scope="session")
def baseline_runs(baseline_dir):
    """S0, surrogate-only, 200 steps x 500 agents; seed 0 is persisted and timed."""
    runs, times = {}, {}
    for seed in SEEDS:
        start = time.perf_counter()
        runs[seed] = run(SimulationConfig(seed=seed), baseline_dir / f"seed={seed}" if seed == 0 else None)
        times[seed] = time.perf_counter() - start
    return runs, times


@pytest.fixture(scope="session")
def s1_run():
    return run(SimulationConfig().replace(governance_strategy="S1"))


@pytest.fixture(scope="session")
def s2_run():
    return run(SimulationConfig().replace(governance_strategy="S2", decisions={"mode": "fixture"}))


def hashtag_velocity_oracle(events, window: int = 24):
    """Recount hashtag velocity from the log: watched views plus engagements per hour."""
    tags: dict[int, list[str]] = {}
    counts: dict[str, collections.Counter] = collections.defaultdict(collections.Counter)
    for ev in events:
        if ev.event_type is EventType.CONTENT_CREATED:
            tags[ev.payload["content"]["content_id"]] = ev.payload["content"]["hashtags"]
        elif ev.event_type in (EventType.VIDEO_WATCHED, EventType.VIDEO_ENGAGED):
            for t in tags[ev.payload["content_id"]]:
                counts[t][ev.step] += 1
    first = {t: min(c) for t, c in counts.items()}

    def velocity(tag: str, step: int) -> float:
        if tag not in counts or first[tag] > step:
            return 0.0
        total = sum(counts[tag][s] for s in range(step - window + 1, step + 1))
        return total / max(1, min(window, step - first[tag] + 1))

    return velocity, sorted(counts)


# -- 1 ------------------------------------------------------------------------------
def test_criterion_1_determinism_and_replay(criteria, baseline_runs, baseline_dir, tmp_path):
    runs, times = baseline_runs
    with criteria.check(1, "determinism, replay and runtime") as notes:
        first = runs[0]
        second = run(SimulationConfig(seed=0), tmp_path / "again")
        a = (baseline_dir / "seed=0" / "events.jsonl").read_bytes()
        b = (tmp_path / "again" / "events.jsonl").read_bytes()
        notes.append(f"{len(a)} log bytes")
        assert a == b
        world = replay_world(SimulationConfig(seed=0), read_log(baseline_dir / "seed=0" / "events.jsonl"))
        assert world.state_hashes() == first.state_hashes
        assert world.bus.log.digest() == first.digest
        assert second.state_hashes == first.state_hashes
        notes.append(f"200x500 run {times[0]:.1f}s")
        assert times[0] < 60.0


# -- 2 ------------------------------------------------------------------------------
def test_criterion_2_metric_oracles(criteria):
    with criteria.check(2, "gini, entropy, skip and retention oracles") as notes:
        checked = 0
        for n in range(1, 9):
            samples = np.array(list(itertools.product(range(5), repeat=n)), dtype=float)
            totals = samples.sum(axis=1)
            pair = np.abs(samples[:, :, None] - samples[:, None, :]).sum(axis=(1, 2))
            oracle = np.divide(pair, 2 * n * totals, out=np.zeros_like(pair), where=totals > 0)
            for row, expected in zip(samples, oracle):
                assert abs(gini(row) - expected) <= 1e-9, row
            checked += len(samples)
        notes.append(f"{checked} gini samples")
        assert abs(shannon_entropy_bits([3, 1]) - 0.811278) <= 1e-6
        rng = np.random.default_rng(2024)
        worst = 0.0
        for _ in range(1000):
            alpha, beta = rng.uniform(0.05, 3.0, 2)
            hook, attention, eps = rng.uniform(0.01, 1.0), rng.uniform(0.1, 120.0), rng.normal(0.0, 1.0)
            direct = 1.0 / (1.0 + math.exp(-(alpha / hook + beta / attention + eps)))
            worst = max(worst, abs(skip_probability(hook, attention, eps, BehaviorParams(alpha=alpha, beta=beta)) - direct))
        notes.append(f"max skip error {worst:.1e}")
        assert worst <= 1e-12
        assert abs(retention(MemoryTrace("k", 1.0, 0, 0, 10.0), 10) - 0.367879) <= 1e-6


# -- 3 ------------------------------------------------------------------------------
def test_criterion_3_heavy_tailed_attention(criteria, baseline_runs):
    runs, _ = baseline_runs
    with criteria.check(3, "baseline View-Gini >= 0.80 and top-decile gift share >= 50%") as notes:
        vg = [runs[s].summary["view_gini"] for s in SEEDS]
        top = [runs[s].summary["top_decile_gift_share"] for s in SEEDS]
        notes.append("view_gini " + "/".join(f"{v:.3f}" for v in vg) + f" mean {np.mean(vg):.3f}")
        notes.append("top decile " + "/".join(f"{v:.3f}" for v in top))
        assert all(v >= 0.80 for v in vg)
        assert all(v >= 0.50 for v in top)


# -- 4 ------------------------------------------------------------------------------
def test_criterion_4_exposure_gates(criteria):
    with criteria.check(4, "exposure-gate boundaries and zero-engagement run") as notes:
        cfg = GateConfig()
        initial = StageRecord(0, stage=INITIAL, impressions_served=100, impressions_quota=100)
        assert evaluate_gate(initial, GateMetrics(0.16, 0.6, 0.0), cfg, 1)[0].stage == EXPANDED
        assert evaluate_gate(initial, GateMetrics(0.15, 0.6, 0.0), cfg, 1)[0].stage == LIMITED
        expanded = StageRecord(0, stage=EXPANDED, impressions_served=150, impressions_quota=500, stage_start_impressions=100)
        assert evaluate_gate(expanded, GateMetrics(0.3, 0.6, 101.0), cfg, 1)[0].stage == VIRAL
        assert evaluate_gate(expanded, GateMetrics(0.3, 0.6, 100.0), cfg, 1)[0].stage != VIRAL
        res = run(SimulationConfig(population=200, horizon=120, engagement_scale=0.0, drain_steps=60))
        stages = res.summary["stages"]
        notes.append(f"zero-engagement stages {stages}")
        assert res.summary["content_items"] > 0
        assert stages == {LIMITED: res.summary["content_items"]}


# -- 5 ------------------------------------------------------------------------------
def test_criterion_5_feedback_direction(criteria):
    with criteria.check(5, "feedback learner direction") as notes:
        rng = np.random.default_rng(5)
        for _ in range(200):
            c = rng.uniform(0, 1, PREF_DIM)
            pref = PreferenceState(rng.uniform(0, 1, PREF_DIM))
            before = cosine(pref.content_interests, c)
            up = update_preferences(pref, c, EncounterOutcome(True, False, 18.0, 0.9))
            down = update_preferences(pref, c, EncounterOutcome(False, True, 2.5, 0.125))
            same = update_preferences(pref, c, EncounterOutcome(True, False, 10.0, 0.5))
            assert cosine(up.content_interests, c) > before
            assert cosine(down.content_interests, c) < before
            assert same.content_interests.tobytes() == pref.content_interests.tobytes()
        notes.append("200 random states")


# -- 6 ------------------------------------------------------------------------------
def _persona(i: int, model: str = "") -> DecisionRequest:
    return DecisionRequest(Task.PERSONA, {"agent_id": i, "tier": "elite", "domain": "DANCE"}, model_id=model)


def _comment(i: int) -> DecisionRequest:
    return DecisionRequest(Task.COMMENT, {"user_id": i, "content_id": 0, "archetype": "DANCE"})


def test_criterion_6_budget_governance(criteria, tmp_path):
    with criteria.check(6, "budget degradation, exceedance, cap and cache-warm rerun") as notes:
        published: list = []
        prices = {"gpt-4-turbo": 0.02, "gpt-3.5-turbo": 0.002, "gpt-4-turbo-long": 0.06}
        opt = Optimizer(DecisionConfig(mode="fixture", budget_cap=1.0, comment_live=True, prices=prices), publish=lambda t, p: published.append(t))
        trail = []
        # 47 persona calls at $0.02 take utilization to 0.94; one long call at $0.06 reaches 1.00.
        script = [_persona(i) for i in range(47)] + [_persona(99, "gpt-4-turbo-long")] + [_persona(100 + i) for i in range(3)]
        for req in script:
            opt.submit(req)
            assert opt.budget.spent_micro <= opt.budget.cap_micro
            trail.append((opt.budget.utilization(), opt.route(_comment(0))[0], opt.route(_persona(500))[0]))
        for util, comment_tier, persona_tier in trail:
            assert (comment_tier is Tier.SURROGATE) == (util > 0.80)
            assert (persona_tier is Tier.SURROGATE) == (util > 0.95)
        assert trail[39][0] == pytest.approx(0.80) and trail[40][0] == pytest.approx(0.82)
        assert opt.budget.spent_total == pytest.approx(1.0)
        assert EventType.BUDGET_EXCEEDED in published
        notes.append(f"spent {opt.budget.spent_total:.2f} of 1.00")
        base = SimulationConfig().replace(population=60, decisions={"mode": "fixture"})
        grid = ExperimentGrid("ablation", seeds=(0, 1), horizon=12)
        cold = run_grid(grid, base, cache_dir=tmp_path / "cache")
        warm = run_grid(grid, base, cache_dir=tmp_path / "cache")
        cold_spend = sum(r["llm_spend"] for rep in cold for r in rep.runs)
        warm_spend = sum(r["llm_spend"] for rep in warm for r in rep.runs)
        notes.append(f"grid spend cold {cold_spend:.3f} warm {warm_spend:.3f}")
        assert cold_spend > 0 and warm_spend == 0.0
        assert [r["digest"] for rep in cold for r in rep.runs] == [r["digest"] for rep in warm for r in rep.runs]


# -- 7 ------------------------------------------------------------------------------
def test_criterion_7_governance_strategies(criteria, baseline_runs, s1_run, s2_run):
    runs, _ = baseline_runs
    with criteria.check(7, "S0 silent, S1 matches oracle velocity, S2 pre-boosts") as notes:
        for seed in SEEDS:
            assert not any(ev.event_type is EventType.GOVERNANCE_ACTION for ev in runs[seed].log.events())
        events = list(s1_run.log.events())
        velocity, tags = hashtag_velocity_oracle(events)
        acted: dict[int, set[str]] = collections.defaultdict(set)
        for ev in events:
            if ev.event_type is EventType.GOVERNANCE_ACTION:
                assert ev.payload["kind"] == "boost"
                acted[ev.step].add(ev.payload["target"])
        for step in range(s1_run.config.horizon):
            assert acted.get(step, set()) == {t for t in tags if velocity(t, step) > GATE}, step
        notes.append(f"S1 {sum(len(v) for v in acted.values())} boosts over {len(acted)} ticks")

        events = list(s2_run.log.events())
        velocity, s2_tags = hashtag_velocity_oracle(events)
        first_cross = {t: next((s for s in range(s2_run.config.horizon) if velocity(t, s) > GATE), math.inf) for t in s2_tags}
        anticipated = []
        for ev in events:
            p = ev.payload
            if ev.event_type is EventType.GOVERNANCE_ACTION and p["guard_result"] == "pass" and velocity(p["target"], ev.step) <= GATE:
                if ev.step < first_cross[p["target"]] < math.inf:
                    anticipated.append((p["target"], ev.step, first_cross[p["target"]]))
        notes.append("S2 pre-boosts " + ", ".join(f"#{t}@{b}<{c}" for t, b, c in anticipated[:3]))
        assert anticipated


# -- 8 ------------------------------------------------------------------------------
def test_criterion_8_grid_fidelity(criteria, tmp_path):
    with criteria.check(8, "grid sizes, mean+-std oracle, adoption fraction") as notes:
        counts = {}
        for cmd, grid in (("run-set1", "set1"), ("run-set2", "set2"), ("run-ablation", "ablation")):
            out = tmp_path / grid
            assert cli_main([cmd, "--horizon", "3", "--population", "100", "--out", str(out), "--jobs", "4", "--formats", "csv,json"]) == 0
            records = sorted(out.glob("runs/*/seed=*/record.json"))
            summary = json.loads((out / f"{grid}_summary.json").read_text())
            counts[grid] = (len(records), len(summary))
            # Hand oracle over the raw per-run records.
            table = {row["key"]: row for row in read_csv(out / f"{grid}_conditions.csv")}
            for key, row in table.items():
                vals = [json.loads(p.read_text())["view_gini"] for p in sorted((out / "runs" / key).glob("seed=*/record.json"))]
                mean = sum(vals) / len(vals)
                std = math.sqrt(sum((v - mean) ** 2 for v in vals) / (len(vals) - 1))
                assert row["view_gini_mean"] == pytest.approx(mean, abs=1e-12)
                assert row["view_gini_std"] == pytest.approx(std, abs=1e-12)
            if grid == "set1":
                for cond in summary:
                    for rec in cond["runs"]:
                        creators = rec["creators"]
                        share = sum(c["strategy"] == "S1" for c in creators) / len(creators)
                        target = cond["condition"]["A"] if cond["condition"]["S"] == "S1" else 0.0
                        assert abs(share - target) <= 1 / len(creators)
        notes.append(", ".join(f"{g} {r}/{c}" for g, (r, c) in counts.items()))
        assert counts == {"set1": (48, 16), "set2": (27, 9), "ablation": (12, 4)}
        fixture = [{"view_gini": 0.8}, {"view_gini": 0.9}, {"view_gini": 1.0}]
        m, s = aggregate(fixture, ["view_gini"])["view_gini"]
        assert m == pytest.approx(0.9, abs=1e-12) and s == pytest.approx(0.1, abs=1e-12)


# -- 9 ------------------------------------------------------------------------------
ENTRY_FIELDS = {"day_offset", "category", "theme", "hashtags", "short_caption", "live_slot", "cta"}


def test_criterion_9_schema_conformance(criteria, baseline_runs):
    runs, _ = baseline_runs
    with criteria.check(9, "surrogate outputs validate; campaign plans have three days") as notes:
        opt = Optimizer(DecisionConfig(mode="disabled"))
        n = 0
        for i, arch in enumerate(ARCHETYPE_NAMES):
            for tier in ("elite", "active", "casual", "consumer"):
                req = DecisionRequest(Task.PERSONA, {"agent_id": i, "tier": tier, "domain": arch})
                assert not output_errors(Task.PERSONA, opt.submit(req, RngStream(i, tier)).output)
                n += 1
            for ctx in ([], ["dance", "cats"], ["Breaking News!", "#fyp"]):
                req = DecisionRequest(Task.CAPTION, {"archetype": arch, "trend_context": ctx, "creator_id": i})
                assert not output_errors(Task.CAPTION, opt.submit(req, RngStream(i, "c")).output)
                req = DecisionRequest(Task.COMMENT, {"user_id": i, "content_id": i, "archetype": arch})
                assert not output_errors(Task.COMMENT, opt.submit(req, RngStream(i, "m")).output)
                n += 2
            for commerce in (True, False):
                plan = surrogate_campaign({"creator_id": i, "tier": "elite", "domain": arch, "tick": 0, "commerce": commerce, "history": [], "trending": []})
                assert not output_errors(Task.CAMPAIGN, plan)
                n += 1
        for series in ({}, {"a": [1, 2, 4]}, {"a": [5, 3, 1], "b": [1, 3, 9, 27], "Bad Tag": [1, 2, 5]}):
            assert not output_errors(Task.TREND_PREDICTION, surrogate_trend(series))
            n += 1
        plans = 0
        for seed in SEEDS:
            for ev in runs[seed].log.events():
                if ev.event_type is EventType.CAMPAIGN_PLANNED:
                    entries = ev.payload["plan"]["entries"]
                    assert not output_errors(Task.CAMPAIGN, ev.payload["plan"])
                    assert len(entries) == 3 and {e["day_offset"] for e in entries} == {0, 1, 2}
                    assert all(set(e) == ENTRY_FIELDS for e in entries)
                    plans += 1
        notes.append(f"{n} surrogate documents, {plans} logged plans")
        assert plans > 0


# -- 10 -----------------------------------------------------------------------------
def test_criterion_10_ledger_reconciliation(criteria, baseline_runs):
    runs, _ = baseline_runs
    with criteria.check(10, "log aggregates equal the registry at every checkpoint") as notes:
        result = runs[0]
        events = list(result.log.events())
        journal = result.world.registry.journal
        checkpoints = [ev for ev in events if ev.event_type is EventType.CHECKPOINT]
        assert [ev.step for ev in checkpoints] == [49, 99, 149, 199]
        for ck in checkpoints:
            version = ck.payload["version"]
            reg = Registry.from_journal(journal[:version])
            assert reg.state_hash() == ck.payload["registry_hash"]
            from_log = content_aggregates(events, upto_seq=ck.seq)
            from_reg = {cid: {k: int(v[k]) for k in ("views", "likes", "shares")} for cid, v in reg.content.items()}
            assert from_log == from_reg, ck.step
        notes.append(f"{len(checkpoints)} checkpoints, {len(from_log)} items")
