"""Rolling-window trend tracking with lifecycle labels."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Hashable, Iterable, Sequence

EMERGENCE, PEAK, DECLINE = "emergence", "peak", "decline"
PHASE_ORDER = {EMERGENCE: 0, PEAK: 1, DECLINE: 2}


@dataclass(frozen=True)
class TrendConfig:
    window_epochs: int = 24
    epoch_steps: int = 1
    epoch_hours: float = 1.0
    lifecycle_k: int = 3


@dataclass(frozen=True)
class TrendState:
    key: str
    window_counts: tuple[int, ...]
    velocity: float
    score: float
    lifecycle: str
    phase: str

    def as_payload(self) -> list:
        return [self.key, self.velocity, self.score, self.lifecycle, self.phase, self.window_counts[-1]]


def classify_lifecycle(counts: Sequence[float], k: int = 3) -> str:
    """Label the window's shape; a pure function of the counts.

    ``emergence`` when the last ``k`` epoch-to-epoch changes are all rises,
    ``decline`` when they are all falls; otherwise ``peak`` while the current
    epoch sits at the window maximum and ``decline`` below it.
    """
    tail = list(counts[-(k + 1):])
    diffs = [b - a for a, b in zip(tail, tail[1:])]
    if len(diffs) == k and all(d > 0 for d in diffs):
        return EMERGENCE
    if len(diffs) == k and all(d < 0 for d in diffs):
        return DECLINE
    if counts and counts[-1] >= max(counts):
        return PEAK
    return DECLINE


def velocity_from_counts(counts: Sequence[float], span_epochs: int, epoch_hours: float) -> float:
    """Window total per hour over the span the key has actually existed."""
    span = max(1, min(span_epochs, len(counts)))
    return float(sum(counts)) / (span * epoch_hours)


class TrendTracker:
    """Per-key interaction counts bucketed into epochs.

    ``record`` is called from event handlers; ``states`` is a read-only view
    for the epoch containing ``step``.
    """

    def __init__(self, config: TrendConfig | None = None) -> None:
        self.config = config or TrendConfig()
        self.counts: dict[Hashable, dict[int, int]] = {}
        self.first_epoch: dict[Hashable, int] = {}
        self.phase: dict[Hashable, str] = {}

    def epoch_of(self, step: int) -> int:
        return step // self.config.epoch_steps

    def record(self, key: Hashable, step: int, n: int = 1) -> None:
        e = self.epoch_of(step)
        bucket = self.counts.get(key)
        if bucket is None:
            bucket = self.counts[key] = {}
            self.first_epoch[key] = e
        bucket[e] = bucket.get(e, 0) + n

    def window(self, key: Hashable, step: int) -> tuple[int, ...]:
        e = self.epoch_of(step)
        bucket = self.counts.get(key, {})
        w = self.config.window_epochs
        return tuple(bucket.get(i, 0) for i in range(e - w + 1, e + 1))

    def span(self, key: Hashable, step: int) -> int:
        first = self.first_epoch.get(key)
        if first is None:
            return 1
        return min(self.config.window_epochs, self.epoch_of(step) - first + 1)

    def velocity(self, key: Hashable, step: int) -> float:
        if key not in self.counts:
            return 0.0
        return velocity_from_counts(self.window(key, step), self.span(key, step), self.config.epoch_hours)

    def active_keys(self, step: int) -> list:
        lo = self.epoch_of(step) - self.config.window_epochs + 1
        return sorted(k for k, b in self.counts.items() if any(e >= lo for e in b))

    def prune(self, step: int) -> None:
        lo = self.epoch_of(step) - self.config.window_epochs + 1
        for k, b in self.counts.items():
            for e in [e for e in b if e < lo]:
                del b[e]

    def states(self, step: int, keys: Iterable[Hashable] | None = None) -> list[TrendState]:
        """Trend states for keys with interactions in the window (pure read)."""
        out = []
        for key in self.active_keys(step) if keys is None else keys:
            counts = self.window(key, step)
            if not any(counts):
                continue
            vel = velocity_from_counts(counts, self.span(key, step), self.config.epoch_hours)
            label = classify_lifecycle(counts, self.config.lifecycle_k)
            prev = self.phase.get(key)
            phase = label if prev is None or PHASE_ORDER[label] >= PHASE_ORDER[prev] else prev
            score = 0.5 * counts[-1] + 0.5 * vel
            out.append(TrendState(str(key), counts, vel, score, label, phase))
        return out

    def commit_phases(self, states: Iterable[TrendState], step: int) -> None:
        """Advance the monotone phase machine; keys silent for a whole window retire."""
        seen = set()
        for s in states:
            self.phase[s.key] = s.phase
            seen.add(s.key)
        for key in [k for k in self.phase if k not in seen]:
            del self.phase[key]

    def state_hash(self) -> str:
        h = hashlib.sha256()
        for key in sorted(self.counts, key=str):
            h.update(f"{key}|{self.first_epoch[key]}|{sorted(self.counts[key].items())};".encode())
        h.update(repr(sorted(self.phase.items(), key=lambda kv: str(kv[0]))).encode())
        return h.hexdigest()
