"""Trend tracking, share cascades and the governance control loop."""

from svtwin.platform.governance.cascades import CascadeTracker, CascadeTree, recompute_metrics
from svtwin.platform.governance.control import (
    STRATEGIES,
    BoostLedger,
    Forecast,
    GovernanceAction,
    GovernanceGoals,
    TelemetrySnapshot,
    control_step,
    guard,
    guarded_execute,
)
from svtwin.platform.governance.trends import (
    DECLINE,
    EMERGENCE,
    PEAK,
    TrendConfig,
    TrendState,
    TrendTracker,
    classify_lifecycle,
    velocity_from_counts,
)

__all__ = [
    "DECLINE",
    "EMERGENCE",
    "PEAK",
    "STRATEGIES",
    "BoostLedger",
    "CascadeTracker",
    "CascadeTree",
    "Forecast",
    "GovernanceAction",
    "GovernanceGoals",
    "TelemetrySnapshot",
    "TrendConfig",
    "TrendState",
    "TrendTracker",
    "classify_lifecycle",
    "control_step",
    "guard",
    "guarded_execute",
    "recompute_metrics",
    "velocity_from_counts",
]
