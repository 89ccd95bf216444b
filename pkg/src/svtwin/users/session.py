"""Per-agent session state: energy, boredom and recent satisfaction."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field


@dataclass(frozen=True)
class SessionParams:
    start_probability: float = 0.14
    energy_decay: float = 0.004
    energy_exponent: float = 1.2
    exit_energy: float = 0.05
    boredom_limit: int = 5
    satisfaction_window: int = 10


@dataclass
class SessionState:
    active: bool = False
    started_step: int = -1
    energy_level: float = 1.0
    boredom_counter: int = 0
    satisfaction_window: deque = field(default_factory=lambda: deque(maxlen=10))

    def start(self, step: int, params: SessionParams) -> None:
        self.active = True
        self.started_step = step
        self.energy_level = 1.0
        self.boredom_counter = 0
        self.satisfaction_window = deque(maxlen=params.satisfaction_window)

    def end(self) -> None:
        self.active = False

    def record_watch(self, watch_time: float, completion: float, skipped: bool, engaged: bool, params: SessionParams) -> None:
        """Energy decays as ``lambda * watch_time ** exponent``; skips build boredom."""
        self.energy_level = max(0.0, self.energy_level - params.energy_decay * watch_time**params.energy_exponent)
        if skipped:
            self.boredom_counter += 1
            self.satisfaction_window.append(0.0)
        else:
            if engaged or completion > 0.8:
                self.boredom_counter = 0
            self.satisfaction_window.append(completion)

    def should_exit(self, params: SessionParams) -> bool:
        return self.energy_level < params.exit_energy or self.boredom_counter >= params.boredom_limit

    def key(self) -> tuple:
        return (self.active, self.started_step, self.energy_level, self.boredom_counter, tuple(self.satisfaction_window))
