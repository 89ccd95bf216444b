"""Experiment grids, run metrics and reports."""

from svtwin.experiments.grid import ConditionReport, ExperimentGrid, condition_key, condition_overrides, run_grid
from svtwin.experiments.metrics import METRIC_NAMES, aggregate, mean_std, metrics_from_events, summarize

__all__ = [
    "METRIC_NAMES",
    "ConditionReport",
    "ExperimentGrid",
    "aggregate",
    "condition_key",
    "condition_overrides",
    "mean_std",
    "metrics_from_events",
    "run_grid",
    "summarize",
]
