"""Action selection: a rule policy with an optional external decision hook."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable

from svtwin.core.rng import RngStream
from svtwin.events.taxonomy import ActionType
from svtwin.users.profile import AgentProfile
from svtwin.users.session import SessionParams, SessionState


@dataclass(frozen=True)
class FeedContext:
    """What the agent can see when choosing its next action.

    ``pending`` counts feed slots still unwatched (content ids are resolved by
    the platform when the action is executed). ``created`` marks that a
    creation action was already chosen this step.
    """

    pending: int = 0
    watched: int = 0
    refreshed: bool = False
    created: bool = False
    watch_budget: int = 4


Action = tuple[ActionType, dict[str, Any]]
# Hook for external (LLM-backed) policies: returns an ActionType name or None to defer.
ActionOracle = Callable[[AgentProfile, SessionState, FeedContext, Action], str | None]


def rule_action(agent: AgentProfile, session: SessionState, ctx: FeedContext, params: SessionParams, rng: RngStream) -> Action:
    if session.should_exit(params):
        return ActionType.EXIT, {}
    if not ctx.created and agent.creation_probability > 0 and rng.random() < agent.creation_probability:
        return ActionType.CREATE_VIDEO, {}
    if ctx.watched >= ctx.watch_budget:
        return ActionType.EXIT, {"reason": "step_budget"}
    if ctx.pending > 0:
        return ActionType.WATCH_VIDEO, {"slot": ctx.watched}
    return ActionType.REFRESH, {}


def select_action(
    agent: AgentProfile,
    session: SessionState,
    feed_context: FeedContext,
    rng: RngStream,
    params: SessionParams | None = None,
    policy: str = "rule",
    oracle: ActionOracle | None = None,
) -> Action:
    """Choose one action.

    The rule policy exits on low energy or accumulated boredom, creates with
    ``creation_probability``, watches the next feed item when one is pending
    and otherwise refreshes. The ``llm`` policy asks ``oracle`` and keeps the
    rule choice when the oracle defers or answers with an unknown action.
    """
    params = params or SessionParams()
    chosen = rule_action(agent, session, feed_context, params, rng)
    if policy == "llm" and oracle is not None:
        answer = oracle(agent, session, feed_context, chosen)
        if answer is not None:
            try:
                action = ActionType(answer)
            except ValueError:
                return chosen
            if action != chosen[0] and action in (ActionType.EXIT, ActionType.REFRESH, ActionType.WATCH_VIDEO):
                if action == ActionType.WATCH_VIDEO and feed_context.pending == 0:
                    return ActionType.REFRESH, {}
                payload = {"slot": feed_context.watched} if action == ActionType.WATCH_VIDEO else {}
                return action, payload
    return chosen


def plan_step_actions(
    agent: AgentProfile,
    session: SessionState,
    rng: RngStream,
    params: SessionParams,
    watch_budget: int,
    feed_length: int,
    policy: str = "rule",
    oracle: ActionOracle | None = None,
) -> list[Action]:
    """Unroll ``select_action`` into the burst of actions an agent submits for one step.

    The burst is chosen from the step-start session state. A step-budget EXIT
    only closes the burst; it is not submitted and does not end the session.
    """
    if not session.active:
        # Off-session agents only get their creation draw.
        if agent.creation_probability > 0 and rng.random() < agent.creation_probability:
            return [(ActionType.CREATE_VIDEO, {})]
        return []
    actions: list[Action] = []
    ctx = FeedContext(watch_budget=watch_budget)
    for _ in range(watch_budget + 4):
        act, payload = select_action(agent, session, ctx, rng, params, policy, oracle)
        if act == ActionType.EXIT:
            if payload.get("reason") != "step_budget":
                actions.append((act, payload))
            break
        actions.append((act, payload))
        if not ctx.created:
            # The creation draw happens once per step, on the first action.
            ctx = FeedContext(ctx.pending, ctx.watched, ctx.refreshed, True, watch_budget)
        if act == ActionType.REFRESH:
            if ctx.refreshed:
                break
            ctx = FeedContext(feed_length, ctx.watched, True, ctx.created, watch_budget)
        elif act == ActionType.WATCH_VIDEO:
            ctx = FeedContext(ctx.pending - 1, ctx.watched + 1, ctx.refreshed, ctx.created, watch_budget)
    return actions
