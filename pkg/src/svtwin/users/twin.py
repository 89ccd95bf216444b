"""User twin: agent profiles plus the mutable state driven by events."""

from __future__ import annotations

import hashlib
from typing import Callable, Sequence

import numpy as np

from svtwin.core.rng import derive_stream
from svtwin.events.bus import EventBus, TypedEvent
from svtwin.events.taxonomy import ActionType, EventType
from svtwin.interaction.outcome import EncounterOutcome
from svtwin.users.learning import INITIAL_INTEREST, PREF_DIM, FeedbackParams, PreferenceState, feedback_direction, nudge
from svtwin.users.memory import MemoryTrace, reinforce_memory, retention
from svtwin.users.profile import AgentProfile
from svtwin.users.session import SessionParams, SessionState

_ENGAGEMENT_ACTION = {
    "like": ActionType.LIKE,
    "share": ActionType.SHARE,
    "comment": ActionType.COMMENT,
    "gift": ActionType.SEND_GIFT,
}

# content_id -> (compact_vector, creator_id, archetype)
ContentLookup = Callable[[int], tuple[np.ndarray, int, str]]


class UserTwin:
    """Owns preferences, memory, sessions and the follow graph.

    All mutation happens in the bus handlers registered by :meth:`attach`,
    so replaying a log against a freshly built twin reproduces its state.
    """

    HANDLER = "user_twin"

    def __init__(
        self,
        agents: Sequence[AgentProfile],
        content_lookup: ContentLookup,
        feedback: FeedbackParams | None = None,
        session_params: SessionParams | None = None,
        memory_tau: float = 48.0,
        memory_kappa: float = 0.2,
    ) -> None:
        self.agents = list(agents)
        self.content_lookup = content_lookup
        self.feedback = feedback or FeedbackParams()
        self.session_params = session_params or SessionParams()
        self.memory_tau = memory_tau
        self.memory_kappa = memory_kappa
        n = len(self.agents)
        self.interests = np.full((n, PREF_DIM), INITIAL_INTEREST)
        self.sessions = [SessionState() for _ in range(n)]
        self.memory: list[dict[str, MemoryTrace]] = [{} for _ in range(n)]
        self.following: list[set[int]] = [set() for _ in range(n)]
        self.follower_count = [0] * n

    # -- initial social graph -------------------------------------------------
    def seed_follow_graph(self, seed: int, follows_per_agent: int = 3) -> None:
        """Preferential attachment over creators; consumers and creators both follow."""
        creators = [a.agent_id for a in self.agents if a.is_creator]
        if not creators:
            return
        tier_weight = {"elite": 4.0, "active": 2.0, "casual": 1.0}
        for agent in self.agents:
            rng = derive_stream(seed, "follow-graph", (agent.agent_id,))
            pool = [c for c in creators if c != agent.agent_id]
            for _ in range(min(follows_per_agent, len(pool))):
                weights = [
                    0.0 if c in self.following[agent.agent_id] else (self.follower_count[c] + 1) * tier_weight[self.agents[c].creator_tier]
                    for c in pool
                ]
                if sum(weights) <= 0:
                    break
                target = rng.weighted_choice(pool, weights)
                self.following[agent.agent_id].add(target)
                self.follower_count[target] += 1

    # -- read-only accessors --------------------------------------------------
    def preference(self, agent_id: int) -> PreferenceState:
        return PreferenceState(self.interests[agent_id].copy())

    def creator_retention(self, agent_id: int, creator_id: int, step: int) -> float:
        trace = self.memory[agent_id].get(f"creator:{creator_id}")
        if trace is None:
            return 0.0
        return retention(trace, max(step, trace.last_access_step), self.memory_kappa)

    # -- handlers ---------------------------------------------------------------
    def attach(self, bus: EventBus) -> None:
        bus.subscribe(EventType.SESSION_STARTED, self.HANDLER, self._on_session_started)
        bus.subscribe(EventType.SESSION_ENDED, self.HANDLER, self._on_session_ended)
        bus.subscribe(EventType.VIDEO_WATCHED, self.HANDLER, self._on_watch, priority=10)
        bus.subscribe(EventType.VIDEO_SKIPPED, self.HANDLER, self._on_watch, priority=10)
        bus.subscribe(EventType.USER_FOLLOWED, self.HANDLER, self._on_follow)

    def _on_session_started(self, event: TypedEvent) -> None:
        self.sessions[event.payload["agent_id"]].start(event.step, self.session_params)

    def _on_session_ended(self, event: TypedEvent) -> None:
        self.sessions[event.payload["agent_id"]].end()

    def _on_follow(self, event: TypedEvent) -> None:
        follower, creator = event.payload["follower_id"], event.payload["creator_id"]
        if creator not in self.following[follower]:
            self.following[follower].add(creator)
            self.follower_count[creator] += 1
        traces = self.memory[follower]
        key = f"creator:{creator}"
        traces[key] = reinforce_memory(traces.get(key) or MemoryTrace(key, tau=self.memory_tau), ActionType.FOLLOW, event.step)

    def _on_watch(self, event: TypedEvent) -> None:
        p = event.payload
        uid = p["user_id"]
        outcome = EncounterOutcome.from_payload(p)
        compact, creator_id, archetype = self.content_lookup(p["content_id"])
        direction = feedback_direction(outcome, self.feedback)
        if direction:
            self.interests[uid] = nudge(self.interests[uid], compact, direction, self.feedback)
        self.sessions[uid].record_watch(
            outcome.watch_time, outcome.completion_rate, outcome.skipped, bool(outcome.engagements), self.session_params
        )
        if outcome.skipped:
            return
        traces = self.memory[uid]
        for key in (f"creator:{creator_id}", f"topic:{archetype}"):
            trace = traces.get(key) or MemoryTrace(key, tau=self.memory_tau, last_access_step=event.step)
            trace = reinforce_memory(trace, ActionType.WATCH_VIDEO, event.step)
            if key[0] == "c":
                for kind in outcome.engagements:
                    trace = reinforce_memory(trace, _ENGAGEMENT_ACTION[kind], event.step)
            traces[key] = trace

    # -- hashing ----------------------------------------------------------------
    def state_hash(self) -> str:
        h = hashlib.sha256()
        h.update(self.interests.tobytes())
        for s in self.sessions:
            h.update(repr(s.key()).encode())
        for traces in self.memory:
            for key in sorted(traces):
                t = traces[key]
                h.update(f"{key}|{t.strength!r}|{t.last_access_step}|{t.access_count}|{t.tau!r};".encode())
        for f in self.following:
            h.update(repr(sorted(f)).encode())
        h.update(repr(self.follower_count).encode())
        return h.hexdigest()
