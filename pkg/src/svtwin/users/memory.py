"""Forgetting-curve memory of creators and topics."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

from svtwin.core.errors import DomainError
from svtwin.events.taxonomy import ActionType

DEFAULT_TAU = 48.0
DEFAULT_KAPPA = 0.2

# Strength added per reinforcing action; SHARE > GIFT > COMMENT > LIKE > passive watch.
REINFORCEMENT: Mapping[str, float] = {
    ActionType.SHARE.value: 1.0,
    ActionType.SEND_GIFT.value: 0.8,
    ActionType.COMMENT.value: 0.6,
    ActionType.LIKE.value: 0.5,
    ActionType.FOLLOW.value: 0.5,
    ActionType.WATCH_VIDEO.value: 0.2,
    ActionType.REWATCH_VIDEO.value: 0.3,
}


@dataclass(frozen=True)
class MemoryTrace:
    key: str
    strength: float = 0.0
    last_access_step: int = 0
    access_count: int = 0
    tau: float = DEFAULT_TAU

    def __post_init__(self) -> None:
        if self.strength < 0:
            raise DomainError("memory strength must be non-negative")
        if self.access_count < 0:
            raise DomainError("access_count must be non-negative")


def retention(trace: MemoryTrace, now_step: int, kappa: float = DEFAULT_KAPPA) -> float:
    """``S * exp(-dt / tau_eff)`` with ``tau_eff = tau * (1 + kappa * access_count)``."""
    if trace.tau <= 0:
        raise DomainError(f"tau must be positive, got {trace.tau}")
    dt = now_step - trace.last_access_step
    if dt < 0:
        raise DomainError("now_step precedes the trace's last access")
    tau_eff = trace.tau * (1.0 + kappa * trace.access_count)
    return trace.strength * math.exp(-dt / tau_eff)


def reinforce_memory(trace: MemoryTrace, action: ActionType | str, step: int | None = None) -> MemoryTrace:
    name = action.value if isinstance(action, ActionType) else str(action)
    if name not in REINFORCEMENT:
        raise DomainError(f"{name} does not reinforce memory")
    last = trace.last_access_step if step is None else max(step, trace.last_access_step)
    return MemoryTrace(trace.key, trace.strength + REINFORCEMENT[name], last, trace.access_count + 1, trace.tau)
