"""Governance control loop: read telemetry, choose actions, run them through guards."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from svtwin.core.errors import ConfigError
from svtwin.platform.governance.trends import TrendState

STRATEGIES = ("S0", "S1", "S2")


@dataclass(frozen=True)
class Forecast:
    hashtag: str
    confidence: float
    rationale: str = ""


@dataclass(frozen=True)
class GovernanceGoals:
    velocity_gate: float = 100.0
    confidence_gate: float = 0.7
    boost_magnitude: float = 2.0
    boost_epochs: int = 12
    max_concurrent_boosts: int = 5
    min_magnitude: float = 1.1
    max_magnitude: float = 5.0

    def __post_init__(self) -> None:
        if not 1.0 <= self.min_magnitude <= self.max_magnitude:
            raise ConfigError("magnitude bounds must satisfy 1 <= min <= max")
        if self.max_concurrent_boosts < 0 or self.boost_epochs <= 0:
            raise ConfigError("bad boost limits")


@dataclass(frozen=True)
class TelemetrySnapshot:
    step: int
    trends: tuple[TrendState, ...]
    forecasts: tuple[Forecast, ...] = ()
    budget_utilization: float = 0.0
    stats: Mapping[str, float] = field(default_factory=dict)

    def velocity(self, key: str) -> float:
        for t in self.trends:
            if t.key == key:
                return t.velocity
        return 0.0


@dataclass(frozen=True)
class GovernanceAction:
    kind: str  # boost | suppress | none
    target: str
    magnitude: float
    reason: str


def control_step(snapshot: TelemetrySnapshot, strategy: str, goals: GovernanceGoals) -> list[GovernanceAction]:
    """Choose actions for one control tick.

    S0 never acts. S1 boosts every hashtag whose current velocity is strictly
    above the gate. S2 also pre-boosts forecasts at or above the confidence
    gate; they come first so that anticipation gets any free boost slot ahead
    of tags that are already hot. Capacity limits are left to the guard so
    that rejected attempts still reach the audit log.
    """
    if strategy not in STRATEGIES:
        raise ConfigError(f"unknown strategy {strategy!r}")
    if strategy == "S0":
        return []
    actions: list[GovernanceAction] = []
    chosen: set[str] = set()
    if strategy == "S2":
        for f in sorted(snapshot.forecasts, key=lambda f: (-f.confidence, f.hashtag)):
            if f.confidence >= goals.confidence_gate and f.hashtag not in chosen:
                actions.append(GovernanceAction("boost", f.hashtag, goals.boost_magnitude, f"forecast {f.confidence:.2f}"))
                chosen.add(f.hashtag)
    for t in sorted(snapshot.trends, key=lambda s: (-s.velocity, s.key)):
        if t.velocity > goals.velocity_gate and t.key not in chosen:
            actions.append(GovernanceAction("boost", t.key, goals.boost_magnitude, f"velocity {t.velocity:.1f}/h"))
            chosen.add(t.key)
    # Never boost and suppress the same key in one tick.
    suppressed = {a.target for a in actions if a.kind == "suppress"}
    return [a for a in actions if not (a.kind == "boost" and a.target in suppressed)]


@dataclass
class BoostLedger:
    """Applied exposure multipliers keyed by hashtag, each with an expiry step."""

    active: dict[str, tuple[float, int]] = field(default_factory=dict)
    audit: list[dict] = field(default_factory=list)

    def live(self, step: int) -> dict[str, float]:
        return {k: m for k, (m, exp) in self.active.items() if step < exp}

    def expire(self, step: int) -> None:
        for k in [k for k, (_, exp) in self.active.items() if step >= exp]:
            del self.active[k]

    def multiplier(self, tags: Iterable[str], step: int) -> float:
        best = 1.0
        for t in tags:
            entry = self.active.get(t)
            if entry is not None and step < entry[1]:
                m = entry[0]
                if m > best or (m < 1.0 and best == 1.0):
                    best = m
        return best

    def apply(self, record: Mapping) -> None:
        """Apply one audit record (from the log); failed guards change nothing."""
        self.audit.append(dict(record))
        if record["guard_result"] != "pass":
            return
        if record["kind"] == "boost":
            self.active[record["target"]] = (record["magnitude"], record["expires_step"])
        elif record["kind"] == "suppress":
            self.active[record["target"]] = (1.0 / record["magnitude"], record["expires_step"])

    def state_hash(self) -> str:
        return hashlib.sha256(repr((sorted(self.active.items()), len(self.audit))).encode()).hexdigest()


def guard(action: GovernanceAction, ledger: BoostLedger, known_keys: Sequence[str] | set, step: int, goals: GovernanceGoals) -> tuple[str, str]:
    """Safety checks; returns ``(guard_result, reason)`` and never raises."""
    if action.kind not in ("boost", "suppress"):
        return "fail", "unsupported action kind"
    if not goals.min_magnitude <= action.magnitude <= goals.max_magnitude:
        return "fail", f"magnitude {action.magnitude} outside [{goals.min_magnitude}, {goals.max_magnitude}]"
    if action.target not in known_keys:
        return "fail", f"unknown target {action.target!r}"
    live = ledger.live(step)
    # A live boost runs to its expiry; renewing it would hold the slot forever.
    if action.target in live:
        return "fail", f"{action.target!r} already boosted until step {ledger.active[action.target][1]}"
    if len(live) >= goals.max_concurrent_boosts:
        return "fail", f"concurrent boost cap {goals.max_concurrent_boosts} reached"
    return "pass", action.reason


def guarded_execute(
    action: GovernanceAction,
    ledger: BoostLedger,
    known_keys,
    step: int,
    goals: GovernanceGoals,
    audit_id: int,
    expires_step: int | None = None,
) -> dict:
    """Check ``action`` and apply it to ``ledger`` when the guard passes.

    Returns the audit record (the same shape logged as GOVERNANCE_ACTION).
    """
    result, reason = guard(action, ledger, known_keys, step, goals)
    record = {
        "audit_id": audit_id,
        "kind": action.kind,
        "target": action.target,
        "magnitude": float(action.magnitude),
        "guard_result": result,
        "reason": reason,
        "expires_step": int(expires_step if expires_step is not None else step + 1 + goals.boost_epochs),
    }
    ledger.apply(record)
    return record
