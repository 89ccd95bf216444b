"""Spend accounting in integer micro-units."""

from __future__ import annotations

from dataclasses import dataclass, field

from svtwin.decisions.tasks import Task, Tier

MICRO = 1_000_000
THRESHOLDS = (0.8, 0.9, 0.95, 1.0)


def to_micro(cost: float) -> int:
    return int(round(cost * MICRO))


class BudgetError(ValueError):
    pass


@dataclass
class BudgetTracker:
    """Tracks actual spend and a notional total used for routing.

    The notional total also counts the original cost of every cache hit, so
    a cache-warm rerun sees the same utilization trajectory (and therefore
    the same routing) as the run that filled the cache, while its actual
    spend stays at zero.
    """

    cap: float
    spent_micro: int = 0
    notional_micro: int = 0
    by_task: dict[Task, int] = field(default_factory=lambda: {t: 0 for t in Task})
    by_tier: dict[Tier, int] = field(default_factory=lambda: {t: 0 for t in Tier})
    crossed: set[float] = field(default_factory=set)

    def __post_init__(self) -> None:
        if self.cap < 0:
            raise BudgetError("budget cap must be non-negative")
        self.cap_micro = to_micro(self.cap)

    @property
    def spent_total(self) -> float:
        return self.spent_micro / MICRO

    @property
    def spent_by_task(self) -> dict[str, float]:
        return {t.value: v / MICRO for t, v in self.by_task.items()}

    @property
    def spent_by_tier(self) -> dict[str, float]:
        return {t.value: v / MICRO for t, v in self.by_tier.items()}

    def utilization(self) -> float:
        """Routing utilization (notional spend over cap)."""
        if self.cap_micro == 0:
            return 1.0
        return self.notional_micro / self.cap_micro

    def actual_utilization(self) -> float:
        return 1.0 if self.cap_micro == 0 else self.spent_micro / self.cap_micro

    def affordable(self, cost: float) -> bool:
        return self.notional_micro + to_micro(cost) <= self.cap_micro

    def _advance(self, micro: int) -> list[float]:
        before = self.utilization()
        self.notional_micro += micro
        after = self.utilization()
        hits = [t for t in THRESHOLDS if before < t <= after and t not in self.crossed]
        self.crossed.update(hits)
        return hits

    def record_spend(self, task: Task, tier: Tier, cost: float) -> list[float]:
        """Book a spend; returns utilization thresholds crossed by it."""
        if cost < 0:
            raise BudgetError("cost must be non-negative")
        micro = to_micro(cost)
        if tier is not Tier.LIVE and micro:
            raise BudgetError(f"{tier.value} tier is free")
        if self.spent_micro + micro > self.cap_micro or self.notional_micro + micro > self.cap_micro:
            raise BudgetError("spend would exceed the cap")
        self.spent_micro += micro
        self.by_task[Task(task)] += micro
        self.by_tier[tier] += micro
        self.check()
        return self._advance(micro)

    def record_cache_hit(self, cost: float) -> list[float]:
        """Advance the notional total by a cached result's original cost."""
        return self._advance(to_micro(cost))

    def check(self) -> None:
        if self.spent_micro > self.cap_micro:
            raise BudgetError("spent_total exceeds cap")
        if sum(self.by_task.values()) != self.spent_micro or sum(self.by_tier.values()) != self.spent_micro:
            raise BudgetError("per-task or per-tier totals do not reconcile")

    def report(self) -> dict:
        return {
            "cap": self.cap,
            "spent_total": self.spent_total,
            "utilization": self.actual_utilization(),
            "by_task": self.spent_by_task,
            "by_tier": self.spent_by_tier,
        }
