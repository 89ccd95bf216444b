"""The unified optimizer: routing, batching, caching and surrogate fallback."""

from __future__ import annotations

import copy
from dataclasses import dataclass, field
from typing import Any, Callable, Mapping, Sequence

from svtwin.core.errors import ConfigError
from svtwin.core.rng import RngStream, stable_hash64
from svtwin.decisions import surrogates
from svtwin.decisions.budget import BudgetTracker
from svtwin.decisions.cache import ResponseCache
from svtwin.decisions.clients import FixtureClient, HttpClient, LiveClient
from svtwin.decisions.normalize import normalize
from svtwin.decisions.prompts import render
from svtwin.decisions.schemas import validate_input, validate_output
from svtwin.decisions.tasks import DecisionRequest, DecisionResult, Task, Tier, cache_key
from svtwin.events.taxonomy import EventType

LLM_MODES = ("disabled", "fixture", "live")

DEFAULT_PRICES: Mapping[str, float] = {"gpt-4-turbo": 0.02, "gpt-3.5-turbo": 0.002}
DEFAULT_THRESHOLDS: Mapping[str, float] = {"COMMENT": 0.80, "PERSONA": 0.95}


@dataclass(frozen=True)
class DecisionConfig:
    mode: str = "disabled"
    budget_cap: float = 100.0
    prices: Mapping[str, float] = field(default_factory=lambda: dict(DEFAULT_PRICES))
    thresholds: Mapping[str, float] = field(default_factory=lambda: dict(DEFAULT_THRESHOLDS))
    # Applies to tasks without an entry in ``thresholds``.
    default_threshold: float = 0.90
    comment_live: bool = False
    batch_size: int = 50
    flush_window_steps: int = 1
    cache_path: str | None = None
    endpoint: str = ""
    timeout: float = 30.0

    def __post_init__(self) -> None:
        if self.mode not in LLM_MODES:
            raise ConfigError(f"llm mode must be one of {LLM_MODES}")
        if self.budget_cap < 0:
            raise ConfigError("budget cap must be non-negative")
        if not 1 <= self.batch_size <= 50:
            raise ConfigError("batch_size must lie in [1, 50]")
        for k in self.thresholds:
            Task(k)

    def threshold(self, task: Task) -> float:
        return float(self.thresholds.get(Task(task).value, self.default_threshold))

    def price(self, model_id: str) -> float:
        try:
            return float(self.prices[model_id])
        except KeyError as exc:
            raise ConfigError(f"no price for model {model_id!r}") from exc


def batch_flush(pending: Sequence[Any], batch_size: int = 50) -> list[list[Any]]:
    """Split ``pending`` into consecutive groups of at most ``batch_size``."""
    return [list(pending[i : i + batch_size]) for i in range(0, len(pending), batch_size)]


class RequestQueue:
    """Collects requests and releases them when full or when the window expires."""

    def __init__(self, batch_size: int = 50, window_steps: int = 1) -> None:
        self.batch_size = batch_size
        self.window_steps = window_steps
        self.items: list[Any] = []
        self.opened_at: int | None = None

    def add(self, item: Any, step: int) -> list[list[Any]]:
        if not self.items:
            self.opened_at = step
        self.items.append(item)
        if len(self.items) >= self.batch_size:
            return self.flush()
        return []

    def due(self, step: int) -> list[list[Any]]:
        if self.items and self.opened_at is not None and step - self.opened_at >= self.window_steps:
            return self.flush()
        return []

    def flush(self) -> list[list[Any]]:
        out = batch_flush(self.items, self.batch_size)
        self.items, self.opened_at = [], None
        return out


@dataclass
class _Job:
    index: int
    request: DecisionRequest
    prompt: str
    key: str
    cost: float


class Optimizer:
    """Single service shared by every twin.

    Requests go through one queue; routing and spend are booked in
    submission order so results never depend on batching.
    """

    def __init__(
        self,
        config: DecisionConfig | None = None,
        client: LiveClient | None = None,
        cache: ResponseCache | None = None,
        publish: Callable[[EventType, dict], Any] | None = None,
        seed: int = 0,
    ) -> None:
        self.config = config or DecisionConfig()
        if client is None and self.config.mode == "fixture":
            client = FixtureClient()
        elif client is None and self.config.mode == "live":
            client = HttpClient.from_env(self.config.endpoint, self.config.timeout)
        self.client = client if self.config.mode != "disabled" else None
        self.cache = cache if cache is not None else ResponseCache(self.config.cache_path)
        self.budget = BudgetTracker(self.config.budget_cap)
        self.publish = publish
        self.seed = seed
        self.counts: dict[tuple[str, str], int] = {}
        self.exceeded_tasks: set[Task] = set()
        self._cached_results: dict[str, DecisionResult] = {}

    # -- routing ----------------------------------------------------------
    def route(self, request: DecisionRequest) -> tuple[Tier, str]:
        """Choose a tier. Never fails; may publish a budget-exceeded event."""
        tier, reason, _ = self._route(request, render(request.task, request.payload))
        return tier, reason

    def _route(self, request: DecisionRequest, prompt: str) -> tuple[Tier, str, str]:
        key = cache_key(prompt, request.model_id, request.temperature)
        task = request.task
        if self.client is None:
            return Tier.SURROGATE, "live tier disabled", key
        if task is Task.COMMENT and not self.config.comment_live:
            return Tier.SURROGATE, "surrogate-only task", key
        util = self.budget.utilization()
        if util > self.config.threshold(task):
            if util >= 1.0:
                self._exceeded(task)
            return Tier.SURROGATE, f"degraded at utilization {util:.3f}", key
        if key in self.cache:
            return Tier.CACHED, "cache hit", key
        if not self.budget.affordable(self.config.price(request.model_id)):
            self._exceeded(task)
            return Tier.SURROGATE, "budget exhausted", key
        return Tier.LIVE, "live", key

    def _emit(self, event_type: EventType, payload: dict) -> None:
        if self.publish is not None:
            self.publish(event_type, payload)

    def _exceeded(self, task: Task) -> None:
        if task in self.exceeded_tasks:
            return
        self.exceeded_tasks.add(task)
        self._emit(
            EventType.BUDGET_EXCEEDED,
            {
                "task": task.value,
                "utilization": self.budget.utilization(),
                "spent_total": self.budget.spent_total,
                "cap": float(self.config.budget_cap),
            },
        )

    def _thresholds(self, crossed: Sequence[float], task: Task) -> None:
        for t in crossed:
            self._emit(
                EventType.BUDGET_THRESHOLD_CROSSED,
                {"threshold": t, "utilization": self.budget.utilization(), "spent_total": self.budget.spent_total},
            )
            if t >= 1.0:
                self._exceeded(task)

    # -- surrogates -------------------------------------------------------
    def surrogate(self, request: DecisionRequest, key: str, rng: RngStream | None = None) -> Any:
        if rng is None:
            rng = RngStream(self.seed, "surrogate-" + request.task.value, (stable_hash64(key) & 0x7FFFFFFF,))
        p = request.payload
        task = request.task
        if task is Task.PERSONA:
            out = surrogates.surrogate_persona(p["tier"], p["domain"], rng)
        elif task is Task.CAPTION:
            out = surrogates.surrogate_caption(p["archetype"], p["trend_context"], rng)
        elif task is Task.COMMENT:
            out = surrogates.surrogate_comment(p, rng)
        elif task is Task.CAMPAIGN:
            out = surrogates.surrogate_campaign(p)
        elif task is Task.TREND_PREDICTION:
            out = surrogates.surrogate_trend(p["series"])
        else:
            out = surrogates.surrogate_action(p["options"])
        # Surrogates are deterministic; an invalid document is a defect, not a fallback case.
        validate_output(task, out)
        return out

    # -- submission -------------------------------------------------------
    def _count(self, task: Task, tier: Tier) -> None:
        k = (task.value, tier.value)
        self.counts[k] = self.counts.get(k, 0) + 1

    def submit(self, request: DecisionRequest, rng: RngStream | None = None) -> DecisionResult:
        return self.submit_many([request], [rng])[0]

    def submit_many(self, requests: Sequence[DecisionRequest], rngs: Sequence[RngStream | None] | None = None) -> list[DecisionResult]:
        results: list[DecisionResult | None] = [None] * len(requests)
        live: list[_Job] = []
        pending: dict[str, int] = {}
        duplicates: list[tuple[int, int]] = []
        for i, req in enumerate(requests):
            validate_input(req.task, req.payload)
            prompt = render(req.task, req.payload)
            tier, reason, key = self._route(req, prompt)
            rng = rngs[i] if rngs is not None else None
            if tier is Tier.LIVE and key in pending:
                duplicates.append((i, pending[key]))
                continue
            if tier is Tier.LIVE:
                cost = self.config.price(req.model_id)
                self._thresholds(self.budget.record_spend(req.task, Tier.LIVE, cost), req.task)
                pending[key] = i
                live.append(_Job(i, req, prompt, key, cost))
            elif tier is Tier.CACHED:
                results[i] = self._from_cache(req, key)
            else:
                results[i] = DecisionResult(req.task, Tier.SURROGATE, self.surrogate(req, key, rng), 0.0, key, (reason,))
                self._count(req.task, Tier.SURROGATE)
        for batch in batch_flush(live, self.config.batch_size):
            raws = self.client.complete([(j.request, j.prompt) for j in batch])
            for job, raw in zip(batch, raws):
                out = normalize(job.request.task, raw)
                if out is None:
                    fallback = self.surrogate(job.request, job.key, rngs[job.index] if rngs is not None else None)
                    results[job.index] = DecisionResult(job.request.task, Tier.SURROGATE, fallback, job.cost, job.key, ("malformed live response",))
                    self._count(job.request.task, Tier.SURROGATE)
                    continue
                self.cache.put(job.key, job.request.task, out, job.cost)
                results[job.index] = DecisionResult(job.request.task, Tier.LIVE, copy.deepcopy(out), job.cost, job.key, ("live",))
                self._count(job.request.task, Tier.LIVE)
        for i, first in duplicates:
            req = requests[i]
            if results[first].tier is Tier.LIVE:
                results[i] = self._from_cache(req, results[first].key)
            else:
                results[i] = results[first]
                self._count(req.task, results[first].tier)
        return results  # type: ignore[return-value]

    def _from_cache(self, request: DecisionRequest, key: str) -> DecisionResult:
        entry = self.cache.get(key)
        self._thresholds(self.budget.record_cache_hit(entry.cost), request.task)
        self._count(request.task, Tier.CACHED)
        hit = self._cached_results.get(key)
        if hit is None:
            hit = DecisionResult(request.task, Tier.CACHED, copy.deepcopy(entry.output), 0.0, key, ("cache hit",))
            self._cached_results[key] = hit
        return hit

    def spend_report(self) -> dict:
        report = self.budget.report()
        report["routing"] = {f"{t}/{tier}": n for (t, tier), n in sorted(self.counts.items())}
        return report
