"""Orchestrator: builds the world, advances time and enforces the replay contract.

Twin state changes only inside bus handlers. The orchestrator reads state,
draws from derived random streams and publishes events; replaying a log
against a freshly built world therefore reproduces every twin's state.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Iterator, Sequence

import numpy as np

from svtwin.content.archetypes import TOPIC_TAGS, resolve_archetype
from svtwin.content.model import ContentStore, create_content
from svtwin.core.rng import derive_stream
from svtwin.decisions.optimizer import Optimizer
from svtwin.decisions.surrogates import surrogate_campaign
from svtwin.decisions.tasks import DecisionRequest, Task, Tier
from svtwin.events.bus import EventBus, EventLog, TypedEvent, replay
from svtwin.events.taxonomy import ActionType, EventType
from svtwin.interaction.engine import simulate_encounter
from svtwin.platform.governance.cascades import CascadeTracker
from svtwin.platform.governance.control import BoostLedger, Forecast, TelemetrySnapshot, control_step, guard
from svtwin.platform.governance.trends import TrendTracker
from svtwin.platform.promotion import ABSORBING, GateMetrics, PromotionStore, evaluate_gate
from svtwin.platform.reco import RecoInputs, serve_feed
from svtwin.platform.registry import Registry
from svtwin.sim.config import SimulationConfig, to_dict
from svtwin.users.policy import plan_step_actions
from svtwin.users.population import init_population
from svtwin.users.twin import UserTwin

DAY_STEPS = 24


def adopters(creator_ids: Sequence[int], adoption: float) -> frozenset[int]:
    """First ``ceil(adoption * n)`` creators by id use the S1 planner."""
    ordered = sorted(creator_ids)
    k = math.ceil(adoption * len(ordered) - 1e-12)
    return frozenset(ordered[:k])


class PlatformTwin:
    """Promotion records, trend trackers, cascades, boosts, plans and the registry."""

    def __init__(self, config: SimulationConfig, store: ContentStore, registry: Registry) -> None:
        self.config = config
        self.store = store
        self.registry = registry
        self.promotion = PromotionStore(config.gate)
        self.content_trends = TrendTracker(config.trend)
        self.hashtag_trends = TrendTracker(config.trend)
        self.cascades = CascadeTracker()
        self.ledger = BoostLedger()
        self.forecasts: tuple[Forecast, ...] = ()
        self.forecast_log: list[tuple[int, tuple[Forecast, ...]]] = []
        self.plans: dict[int, tuple[int, list[dict]]] = {}

    def attach(self, bus: EventBus) -> None:
        bus.subscribe(EventType.CONTENT_CREATED, "platform_promotion", self._on_created, priority=5)
        for et in (EventType.VIDEO_WATCHED, EventType.VIDEO_SKIPPED):
            bus.subscribe(et, "platform_promotion", self._on_impression, priority=5)
            bus.subscribe(et, "platform_trends", self._on_view_trend, priority=5)
        bus.subscribe(EventType.STAGE_TRANSITION, "platform_promotion", self._on_transition)
        bus.subscribe(EventType.VIDEO_ENGAGED, "platform_trends", self._on_engaged_trend, priority=5)
        for et in (EventType.GIFT_SENT, EventType.PURCHASE_COMPLETED):
            bus.subscribe(et, "platform_trends", self._on_monetary_trend, priority=5)
        bus.subscribe(EventType.TREND_UPDATED, "platform_trends", self._on_trend_updated)
        bus.subscribe(EventType.TREND_FORECAST, "platform_governance", self._on_forecast)
        bus.subscribe(EventType.GOVERNANCE_ACTION, "platform_governance", self._on_governance)
        bus.subscribe(EventType.CAMPAIGN_PLANNED, "platform_campaigns", self._on_plan)

    # -- handlers ---------------------------------------------------------
    def _on_created(self, ev: TypedEvent) -> None:
        self.promotion.admit(ev.payload["content"]["content_id"], ev.step)
        if self.config.hashtag_velocity == "posts":
            for tag in ev.payload["content"]["hashtags"]:
                self.hashtag_trends.record(tag, ev.step)

    def _on_impression(self, ev: TypedEvent) -> None:
        self.promotion.count_impression(ev.payload["content_id"])

    def _on_view_trend(self, ev: TypedEvent) -> None:
        cid = ev.payload["content_id"]
        self.content_trends.record(cid, ev.step)
        if ev.event_type is EventType.VIDEO_WATCHED and self.config.hashtag_velocity == "interactions":
            for tag in self.store.get(cid).hashtags:
                self.hashtag_trends.record(tag, ev.step)

    def _on_engaged_trend(self, ev: TypedEvent) -> None:
        p = ev.payload
        self.content_trends.record(p["content_id"], ev.step)
        if self.config.hashtag_velocity == "interactions":
            for tag in self.store.get(p["content_id"]).hashtags:
                self.hashtag_trends.record(tag, ev.step)
        if p["engagement_type"] == "share":
            self.cascades.record_share(p["content_id"], p["user_id"], p.get("parent_sharer"), ev.step)

    def _on_monetary_trend(self, ev: TypedEvent) -> None:
        self.content_trends.record(ev.payload["content_id"], ev.step)

    def _on_trend_updated(self, ev: TypedEvent) -> None:
        self.hashtag_trends.commit_phases(self.hashtag_trends.states(ev.step), ev.step)
        self.hashtag_trends.prune(ev.step)
        self.content_trends.prune(ev.step)

    def _on_transition(self, ev: TypedEvent) -> None:
        p = ev.payload
        metrics = GateMetrics(p["engagement_rate"], p["completion_mean"], p["velocity"])
        self.promotion.apply_transition(p["content_id"], p["to_stage"], ev.step, metrics)

    def _on_forecast(self, ev: TypedEvent) -> None:
        self.forecasts = tuple(Forecast(h, c, r) for h, c, r in ev.payload["forecasts"])
        self.forecast_log.append((ev.step, self.forecasts))

    def _on_governance(self, ev: TypedEvent) -> None:
        self.ledger.expire(ev.step)
        self.ledger.apply(ev.payload)

    def _on_plan(self, ev: TypedEvent) -> None:
        self.plans[ev.payload["creator_id"]] = (ev.payload["tick"], ev.payload["plan"]["entries"])

    # -- read-only helpers ------------------------------------------------
    def plan_entry(self, creator_id: int, step: int) -> dict | None:
        held = self.plans.get(creator_id)
        if held is None:
            return None
        tick, entries = held
        day = (step - tick - 1) // DAY_STEPS
        for e in entries:
            if e["day_offset"] == day:
                return {**e, "plan_tick": tick}
        return None

    def trending(self, step: int, k: int = 3) -> list[str]:
        vel = [(self.hashtag_trends.velocity(t, step), t) for t in self.hashtag_trends.active_keys(step)]
        vel = [(v, t) for v, t in vel if v > 0]
        vel.sort(key=lambda x: (-x[0], x[1]))
        return [t for _, t in vel[:k]]

    def state_hash(self) -> str:
        import hashlib

        h = hashlib.sha256()
        for part in (
            self.promotion.state_hash(),
            self.content_trends.state_hash(),
            self.hashtag_trends.state_hash(),
            self.cascades.state_hash(),
            self.ledger.state_hash(),
            self.registry.state_hash(),
            repr(sorted((k, v[0], json.dumps(v[1], sort_keys=True)) for k, v in self.plans.items())),
            repr(self.forecasts),
        ):
            h.update(part.encode())
        return h.hexdigest()


class MetricsCollector:
    """Per-step counters for the metrics series (not part of any twin hash)."""

    FIELDS = ("step", "impressions", "skips", "watch_time", "likes", "shares", "comments", "gifts", "gift_revenue", "purchases", "created", "sessions")

    def __init__(self) -> None:
        self.rows: list[dict[str, float]] = []
        self.current: dict[str, float] | None = None

    def open(self, step: int) -> None:
        self.current = dict.fromkeys(self.FIELDS, 0)
        self.current["step"] = step

    def close(self) -> None:
        if self.current is not None:
            self.rows.append(self.current)
            self.current = None

    def attach(self, bus: EventBus) -> None:
        for et in (EventType.VIDEO_WATCHED, EventType.VIDEO_SKIPPED, EventType.VIDEO_ENGAGED, EventType.GIFT_SENT, EventType.PURCHASE_COMPLETED, EventType.CONTENT_CREATED, EventType.SESSION_STARTED):
            bus.subscribe(et, "metrics", self._on_event, priority=100)

    def _on_event(self, ev: TypedEvent) -> None:
        row = self.current
        if row is None:
            return
        et = ev.event_type
        p = ev.payload
        if et in (EventType.VIDEO_WATCHED, EventType.VIDEO_SKIPPED):
            row["impressions"] += 1
            row["watch_time"] += p["watch_time"]
            row["skips"] += p["is_skipped"]
        elif et is EventType.VIDEO_ENGAGED:
            row[p["engagement_type"] + "s"] += 1
        elif et is EventType.GIFT_SENT:
            row["gifts"] += 1
            row["gift_revenue"] += p["amount"]
        elif et is EventType.PURCHASE_COMPLETED:
            row["purchases"] += 1
        elif et is EventType.CONTENT_CREATED:
            row["created"] += 1
        else:
            row["sessions"] += 1


class World:
    """Every twin for one run, wired to one bus.

    With ``replay_mode`` the world is built identically but no decision
    service calls are made after initialisation; events come from a log.
    """

    def __init__(self, config: SimulationConfig, log: EventLog | None = None, optimizer: Optimizer | None = None) -> None:
        self.config = config
        self.seed = config.seed
        self.bus = EventBus(log if log is not None else EventLog(), validate=config.validate_events)
        self.step = 0
        self.optimizer = optimizer if optimizer is not None else Optimizer(config.decisions, seed=config.seed)
        self.optimizer.publish = lambda et, p: self.bus.publish(et, p, step=self.step, source="decisions")
        persona_service = self._persona_service if config.persona_source == "llm" else None
        self.agents = init_population(config.population, config.tiers, config.persona_source, config.seed, persona_service)
        self.store = ContentStore(config.seed)
        self.registry = Registry()
        self.users = UserTwin(self.agents, self.store.lookup_vector, config.feedback, config.session)
        self.users.seed_follow_graph(config.seed, config.follows_per_agent)
        self.platform = PlatformTwin(config, self.store, self.registry)
        self.metrics = MetricsCollector()
        self.creators = [a.agent_id for a in self.agents if a.is_creator]
        self.planner_s1 = adopters(self.creators, config.planner_adoption)
        self.reco = config.reco()
        self.checkpoint_mismatches: list[int] = []
        self._commit_control()
        # Dispatch order is fixed by (priority, handler id), not by attach order.
        self.store.attach(self.bus)
        self.users.attach(self.bus)
        self.platform.attach(self.bus)
        self.registry.attach(self.bus)
        self.metrics.attach(self.bus)
        self.bus.subscribe(EventType.CHECKPOINT, "checkpoint_verifier", self._on_checkpoint)

    # -- setup --------------------------------------------------------------
    def _persona_service(self, agent_id: int, tier: str, domain: str) -> dict | None:
        req = DecisionRequest(Task.PERSONA, {"agent_id": agent_id, "tier": tier, "domain": domain}, requester=("user_twin", agent_id))
        return self.optimizer.submit(req).output

    def _commit_control(self) -> None:
        cfg = to_dict(self.config)
        for key in ("reco_variant", "hybrid_lambda", "gate", "goals", "governance_strategy", "monetization", "decisions"):
            self.registry.commit("platform_registry", {"op": "set_control", "key": key, "value": cfg[key]})

    def _on_checkpoint(self, ev: TypedEvent) -> None:
        if ev.payload["registry_hash"] != self.registry.state_hash():
            self.checkpoint_mismatches.append(ev.step)

    def publish(self, event_type: EventType, payload: dict, source: str) -> int:
        return self.bus.publish(event_type, payload, step=self.step, source=source)

    # -- hashes -------------------------------------------------------------
    def state_hashes(self) -> dict[str, str]:
        return {
            "user": self.users.state_hash(),
            "content": self.store.state_hash(),
            "platform": self.platform.state_hash(),
            "registry": self.registry.state_hash(),
        }

    # -- services used while acting -------------------------------------------
    def _comment_source(self, user_id: int, content_id: int, archetype: str):
        def source(rng) -> str:
            req = DecisionRequest(Task.COMMENT, {"user_id": user_id, "content_id": content_id, "archetype": archetype}, requester=("interaction_twin", user_id))
            return self.optimizer.submit(req, rng).output["text"]

        return source

    def _caption_service(self, archetype: str, trend_context: list, creator_id: int) -> dict | None:
        req = DecisionRequest(Task.CAPTION, {"archetype": archetype, "trend_context": list(trend_context), "creator_id": creator_id}, requester=("content_twin", creator_id))
        res = self.optimizer.submit(req)
        return res.output if res.tier is not Tier.SURROGATE else None

    def _reco_inputs(self, gov: np.ndarray, viral: Sequence[int]) -> RecoInputs:
        store, promo = self.store, self.platform.promotion
        n = len(store)
        if gov.shape[0] < n:
            extra = [self.platform.ledger.multiplier(store.get(i).hashtags, self.step) for i in range(gov.shape[0], n)]
            gov = np.concatenate([gov, np.asarray(extra, dtype=float)])
            self._gov = gov
        return RecoInputs(
            n_items=n,
            compact=store.compact,
            compact_norm=store.compact_norm,
            created_step=store.created_step,
            creator=store.creator,
            quality=store.quality,
            stage_weight=promo.weights,
            stage_of=promo.stage_of,
            governance_multiplier=self._gov,
            viral_ids=viral,
            by_creator=store.by_creator,
        )

    def _viral_pool(self) -> list[int]:
        n = len(self.store)
        if n == 0:
            return []
        k = max(1, math.ceil(self.reco.viral_fraction * n))
        vel = [(self.platform.content_trends.velocity(i, self.step), i) for i in range(n)]
        vel = [(v, i) for v, i in vel if v > 0]
        vel.sort(key=lambda x: (-x[0], x[1]))
        return [i for _, i in vel[:k]]

    # -- the cycle ----------------------------------------------------------------------
    def run_cycle(self) -> None:
        step = self.step
        cfg = self.config
        self.metrics.open(step)
        allow_create = step < cfg.horizon - cfg.drain_steps
        # Phase 1: action selection, agent order by id.
        plans: list[tuple[int, list]] = []
        for agent in self.agents:
            aid = agent.agent_id
            rng = derive_stream(self.seed, "agent-step", (aid, step))
            session = self.users.sessions[aid]
            if not session.active and rng.random() < cfg.session.start_probability:
                self.publish(EventType.SESSION_STARTED, {"agent_id": aid}, "user_twin")
            actions = plan_step_actions(agent, session, rng, cfg.session, cfg.watch_budget, self.reco.feed_length)
            if not allow_create:
                actions = [a for a in actions if a[0] is not ActionType.CREATE_VIDEO]
            if actions:
                self.publish(EventType.ACTION_SUBMITTED, {"agent_id": aid, "actions": [[a.value, dict(p)] for a, p in actions]}, "user_twin")
                plans.append((aid, actions))
        # Phase 2-3: route actions to platform handlers and publish outcomes.
        self._gov = np.asarray([self.platform.ledger.multiplier(c.hashtags, step) for c in self.store.items], dtype=float)
        viral = self._viral_pool()
        trending = self.platform.trending(step)
        for aid, actions in plans:
            feed: list = []
            for action, payload in actions:
                if action is ActionType.CREATE_VIDEO:
                    self._create(self.agents[aid], trending)
                elif action is ActionType.REFRESH:
                    feed = self._serve(aid, viral)
                elif action is ActionType.WATCH_VIDEO:
                    slot = payload["slot"]
                    if slot < len(feed):
                        self._encounter(aid, feed[slot])
                elif action is ActionType.EXIT:
                    self.publish(EventType.SESSION_ENDED, {"agent_id": aid, "reason": "exit"}, "user_twin")
        # Phase 4: platform routines.
        if (step + 1) % cfg.control_interval == 0:
            states = self._trend_update()
            self._gate_evaluation()
            self._governance(states)
        if cfg.campaigns and step % cfg.campaign_tick == 0 and self.creators:
            self.plan_campaigns(step, trending)
        if (step + 1) % cfg.checkpoint_every == 0:
            self.publish(EventType.CHECKPOINT, {"version": self.registry.version, "registry_hash": self.registry.state_hash()}, "orchestrator")
        self.metrics.close()
        self.step += 1

    def _create(self, agent, trending: list[str]) -> None:
        step = self.step
        rng = derive_stream(self.seed, "create", (agent.agent_id, step))
        home = resolve_archetype(agent.domain_expertise)
        niche = [t for t in TOPIC_TAGS[home] if self.platform.hashtag_trends.velocity(t, step) > 0]
        niche.sort(key=lambda t: (-self.platform.hashtag_trends.velocity(t, step), t))
        context = list(dict.fromkeys(niche[:1] + trending))
        entry = self.platform.plan_entry(agent.agent_id, step) if self.config.campaigns else None
        profile = create_content(
            agent,
            step,
            context,
            self.config.caption_source,
            rng,
            self.store.next_id(),
            plan_entry=entry,
            caption_service=self._caption_service if self.config.caption_source == "llm" else None,
        )
        payload: dict[str, Any] = {"content": profile.static_record(), "caption_tier": profile.caption_source}
        if entry is not None:
            payload["plan_tick"] = entry["plan_tick"]
        self.publish(EventType.CONTENT_CREATED, payload, "content_twin")

    def _serve(self, aid: int, viral: Sequence[int]) -> list:
        inputs = self._reco_inputs(self._gov, viral)
        feed, trace = serve_feed(aid, self.users.interests[aid], self.users.following[aid], inputs, self.reco, self.step)
        self.publish(
            EventType.FEED_SERVED,
            {
                "user_id": aid,
                "content_ids": [c.content_id for c in feed],
                "sources": [c.source_pool for c in feed],
                "scores": [round(c.ranked_value, 6) for c in feed],
                "candidates": trace["candidates"],
                "dropped": len(trace["dropped"]),
            },
            "platform_reco",
        )
        return [c.content_id for c in feed]

    def _encounter(self, aid: int, content_id: int) -> None:
        step = self.step
        agent = self.agents[aid]
        content = self.store.get(content_id)
        rng = derive_stream(self.seed, "encounter", (aid, content_id, step))
        following = self.users.following[aid]
        user = agent
        if self.config.engagement_scale != 1.0:
            user = _ScaledAgent(agent, self.config.engagement_scale)
        outcome = simulate_encounter(
            user,
            self.users.sessions[aid],
            content,
            self.config.behavior,
            rng,
            pref=self.users.preference(aid),
            monetization=True,
            commerce=self.config.monetization == "full",
            already_following=content.creator_id in following,
            creator_retention=self.users.creator_retention(aid, content.creator_id, step),
            comment_source=self._comment_source(aid, content_id, content.archetype),
        )
        base = {"user_id": aid, "content_id": content_id, "creator_id": content.creator_id}
        et = EventType.VIDEO_SKIPPED if outcome.skipped else EventType.VIDEO_WATCHED
        self.publish(
            et,
            {
                **base,
                "watch_time": outcome.watch_time,
                "completion_rate": outcome.completion_rate,
                "is_skipped": outcome.skipped,
                "engagements": list(outcome.engagements),
                "hooked": outcome.hooked,
            },
            "interaction_twin",
        )
        for kind in outcome.engagements:
            if kind == "gift":
                self.publish(EventType.GIFT_SENT, {**base, "amount": float(outcome.gift_amount)}, "interaction_twin")
                continue
            payload = {**base, "engagement_type": kind}
            if kind == "comment" and outcome.comment_text:
                payload["comment_text"] = outcome.comment_text
            if kind == "share":
                payload["parent_sharer"] = self._parent_sharer(aid, content_id)
            self.publish(EventType.VIDEO_ENGAGED, payload, "interaction_twin")
        if outcome.purchase_price > 0:
            self.publish(EventType.PURCHASE_COMPLETED, {**base, "price": float(outcome.purchase_price)}, "interaction_twin")
        if outcome.follow:
            self.publish(EventType.USER_FOLLOWED, {"follower_id": aid, "creator_id": content.creator_id, "content_id": content_id}, "interaction_twin")

    def _parent_sharer(self, aid: int, content_id: int) -> int | None:
        following = self.users.following[aid]
        for sharer in reversed(self.platform.cascades.sharers(content_id)):
            if sharer in following and sharer != aid:
                return sharer
        return None

    def _trend_update(self) -> list:
        step = self.step
        states = self.platform.hashtag_trends.states(step)
        top = sorted(states, key=lambda s: (-s.velocity, s.key))[: self.config.trend_payload_top]
        self.publish(EventType.TREND_UPDATED, {"trends": [s.as_payload() for s in top]}, "platform_trends")
        return states

    def _gate_evaluation(self) -> None:
        step = self.step
        gate = self.config.gate
        promo = self.platform.promotion
        for cid in sorted(promo.records):
            rec = promo.records[cid]
            if rec.stage in ABSORBING:
                continue
            c = self.store.get(cid)
            metrics = GateMetrics(c.engagement_rate, c.completion_mean, self.platform.content_trends.velocity(cid, step))
            new, went_viral = evaluate_gate(rec, metrics, gate, step)
            if new.stage == rec.stage:
                continue
            self.publish(
                EventType.STAGE_TRANSITION,
                {
                    "content_id": cid,
                    "from_stage": rec.stage,
                    "to_stage": new.stage,
                    "engagement_rate": metrics.engagement_rate,
                    "completion_mean": metrics.completion_mean,
                    "velocity": metrics.velocity,
                    "impressions": rec.impressions_served,
                },
                "platform_promotion",
            )
            if went_viral:
                self.publish(EventType.VIDEO_GOES_VIRAL, {"content_id": cid, "velocity": metrics.velocity, "amplification": new.amplification}, "platform_promotion")

    def _governance(self, states: list) -> None:
        step = self.step
        strategy = self.config.governance_strategy
        if strategy == "S0":
            return
        goals = self.config.goals
        forecasts: tuple[Forecast, ...] = ()
        if strategy == "S2" and step % self.config.forecast_interval == 0:
            top = sorted(states, key=lambda s: (-s.velocity, s.key))[: self.config.trend_payload_top]
            series = {s.key: list(s.window_counts[-4:]) for s in top}
            req = DecisionRequest(Task.TREND_PREDICTION, {"step": step, "series": series}, requester=("platform_governance", step))
            res = self.optimizer.submit(req)
            rows = [[f["hashtag"], f["confidence"], f["rationale"]] for f in res.output["forecasts"]]
            self.publish(EventType.TREND_FORECAST, {"forecasts": rows, "tier": res.tier.value, "cost": res.cost}, "platform_governance")
        if strategy == "S2":
            forecasts = self.platform.forecasts
        snapshot = TelemetrySnapshot(step, tuple(states), forecasts, self.optimizer.budget.utilization())
        known = {s.key for s in states}
        for action in control_step(snapshot, strategy, goals):
            result, reason = guard(action, self.platform.ledger, known, step, goals)
            self.publish(
                EventType.GOVERNANCE_ACTION,
                {
                    "audit_id": len(self.platform.ledger.audit),
                    "kind": action.kind,
                    "target": action.target,
                    "magnitude": float(action.magnitude),
                    "guard_result": result,
                    "reason": reason,
                    "expires_step": step + 1 + goals.boost_epochs * self.config.trend.epoch_steps,
                    "strategy": strategy,
                },
                "platform_governance",
            )

    def plan_campaigns(self, tick: int, trending: list[str] | None = None) -> list[dict]:
        """Produce and publish one plan per creator; S1 adopters go through the optimizer."""
        trending = self.platform.trending(tick) if trending is None else trending
        commerce = self.config.monetization == "full"
        planned = []
        requests, owners = [], []
        contexts = {}
        for cid in self.creators:
            agent = self.agents[cid]
            recent = self.store.by_creator.get(cid, [])[-5:]
            history = []
            for i in recent:
                c = self.store.get(i)
                history.append({"views": int(c.views), "likes": int(c.likes), "retention": round(min(1.0, c.completion_mean), 4)})
            ctx = {
                "creator_id": cid,
                "tier": agent.creator_tier,
                "domain": agent.domain_expertise,
                "tick": tick,
                "commerce": commerce,
                "history": history,
                "trending": list(trending[:3]),
            }
            contexts[cid] = ctx
            if cid in self.planner_s1:
                requests.append(DecisionRequest(Task.CAMPAIGN, ctx, requester=("platform_campaigns", cid)))
                owners.append(cid)
        results = dict(zip(owners, self.optimizer.submit_many(requests))) if requests else {}
        for cid in self.creators:
            if cid in results:
                res = results[cid]
                strategy, tier, cost, plan = "S1", res.tier.value, res.cost, res.output
            else:
                strategy, tier, cost, plan = "S0", Tier.SURROGATE.value, 0.0, surrogate_campaign(contexts[cid])
            payload = {"creator_id": cid, "tick": tick, "strategy": strategy, "tier": tier, "cost": float(cost), "plan": plan}
            self.publish(EventType.CAMPAIGN_PLANNED, payload, "platform_campaigns")
            planned.append(payload)
        return planned


class _ScaledAgent:
    """Read-only view of an agent with engagement propensities scaled."""

    def __init__(self, agent, scale: float) -> None:
        self._agent = agent
        self.engagement_propensities = {k: v * scale for k, v in agent.engagement_propensities.items()}

    def __getattr__(self, name: str):
        return getattr(self._agent, name)


@dataclass
class RunResult:
    config: SimulationConfig
    series: list[dict[str, float]]
    summary: dict[str, Any]
    log: EventLog
    digest: str
    state_hashes: dict[str, str]
    spend: dict[str, Any]
    world: World | None = field(default=None, repr=False)
    run_dir: Path | None = None


def run(config: SimulationConfig, run_dir: str | Path | None = None, optimizer: Optimizer | None = None, keep_world: bool = True) -> RunResult:
    """Execute ``config.horizon`` cycles; persist artefacts under ``run_dir`` when given."""
    from svtwin.experiments.metrics import summarize_world

    out = Path(run_dir) if run_dir is not None else None
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
    log = EventLog(out / "events.jsonl" if out is not None else None)
    world = World(config, log, optimizer)
    try:
        for _ in range(config.horizon):
            world.run_cycle()
    finally:
        log.flush()
    summary = summarize_world(world)
    result = RunResult(
        config=config,
        series=world.metrics.rows,
        summary=summary,
        log=log,
        digest=log.digest(),
        state_hashes=world.state_hashes(),
        spend=world.optimizer.spend_report(),
        world=world if keep_world else None,
        run_dir=out,
    )
    if out is not None:
        persist(result, world)
    log.close()
    return result


def persist(result: RunResult, world: World) -> None:
    out = result.run_dir
    assert out is not None
    (out / "config.json").write_text(json.dumps(to_dict(result.config), indent=2, sort_keys=True))
    (out / "registry_journal.jsonl").write_text("".join(line + "\n" for line in world.registry.journal))
    (out / "registry_snapshot.json").write_text(world.registry.snapshot())
    (out / "summary.json").write_text(json.dumps(result.summary, indent=2, sort_keys=True))
    (out / "spend.json").write_text(json.dumps(result.spend, indent=2, sort_keys=True))
    (out / "state_hashes.json").write_text(json.dumps({"digest": result.digest, **result.state_hashes}, indent=2, sort_keys=True))
    with open(out / "metrics.csv", "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=MetricsCollector.FIELDS)
        writer.writeheader()
        writer.writerows(result.series)


def replay_world(config: SimulationConfig, events: Iterable[TypedEvent] | EventLog, optimizer: Optimizer | None = None) -> World:
    """Rebuild the world from ``config`` and re-dispatch ``events`` against it.

    Initialisation may itself publish (budget events from persona requests);
    those lines are in ``events`` too, so the rebuilt world starts from an
    empty log before replaying.
    """
    world = World(config, optimizer=optimizer)
    world.bus.log = EventLog()
    world.optimizer.publish = None
    replay(_stepping(events, world), world.bus)
    return world


def _stepping(events: Iterable[TypedEvent] | EventLog, world: World) -> Iterator[TypedEvent]:
    source = events.events() if isinstance(events, EventLog) else events
    for ev in source:
        world.step = ev.step
        yield ev
