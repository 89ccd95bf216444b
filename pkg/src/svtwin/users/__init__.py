"""User twin: agents, preferences, memory, sessions and action selection."""

from svtwin.users.learning import FeedbackParams, PreferenceState, feedback_direction, update_preferences
from svtwin.users.memory import MemoryTrace, reinforce_memory, retention
from svtwin.users.personas import PERSONA_TEMPLATES, TRAIT_LEXICON, persona_parameters
from svtwin.users.policy import FeedContext, plan_step_actions, select_action
from svtwin.users.population import assign_tiers, init_population, tier_counts
from svtwin.users.profile import CREATOR_TIERS, TIERS, AgentProfile, TierConfig
from svtwin.users.session import SessionParams, SessionState
from svtwin.users.twin import UserTwin

__all__ = [
    "CREATOR_TIERS",
    "PERSONA_TEMPLATES",
    "TIERS",
    "TRAIT_LEXICON",
    "AgentProfile",
    "FeedContext",
    "FeedbackParams",
    "MemoryTrace",
    "PreferenceState",
    "SessionParams",
    "SessionState",
    "TierConfig",
    "UserTwin",
    "assign_tiers",
    "feedback_direction",
    "init_population",
    "persona_parameters",
    "plan_step_actions",
    "reinforce_memory",
    "retention",
    "select_action",
    "tier_counts",
    "update_preferences",
]
