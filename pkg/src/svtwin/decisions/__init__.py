"""Decision services: schema-checked tasks routed across live, cached and surrogate tiers."""

from svtwin.decisions.budget import BudgetError, BudgetTracker
from svtwin.decisions.cache import CacheEntry, ResponseCache
from svtwin.decisions.clients import FixtureClient, HttpClient
from svtwin.decisions.normalize import normalize
from svtwin.decisions.optimizer import DecisionConfig, Optimizer, RequestQueue, batch_flush
from svtwin.decisions.schemas import INPUT_SCHEMAS, OUTPUT_SCHEMAS, SchemaViolation, output_errors, validate_input, validate_output
from svtwin.decisions.surrogates import surrogate_campaign, surrogate_caption, surrogate_comment, surrogate_persona, surrogate_trend
from svtwin.decisions.tasks import DecisionRequest, DecisionResult, Task, Tier, cache_key

__all__ = [
    "INPUT_SCHEMAS",
    "OUTPUT_SCHEMAS",
    "BudgetError",
    "BudgetTracker",
    "CacheEntry",
    "DecisionConfig",
    "DecisionRequest",
    "DecisionResult",
    "FixtureClient",
    "HttpClient",
    "Optimizer",
    "RequestQueue",
    "ResponseCache",
    "SchemaViolation",
    "Task",
    "Tier",
    "batch_flush",
    "cache_key",
    "normalize",
    "output_errors",
    "surrogate_campaign",
    "surrogate_caption",
    "surrogate_comment",
    "surrogate_persona",
    "surrogate_trend",
    "validate_input",
    "validate_output",
]
