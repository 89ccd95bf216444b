"""Factorial experiment grids and the runner that executes them."""

from __future__ import annotations

import itertools
import json
import logging
import time
import traceback
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping, Sequence

from svtwin.core.errors import ConfigError
from svtwin.events.taxonomy import EventType
from svtwin.experiments.metrics import METRIC_NAMES, aggregate, mean_std
from svtwin.sim.config import SimulationConfig, merge, to_dict

log = logging.getLogger(__name__)

GRID_NAMES = ("set1", "set2", "ablation")

FACTORS: Mapping[str, Mapping[str, tuple]] = {
    "set1": {"S": ("S0", "S1"), "A": (0.0, 0.2, 0.5, 1.0), "M": ("basic", "full")},
    "set2": {"S": ("S0", "S1", "S2"), "B": (100.0, 50.0, 10.0)},
    "ablation": {"P": (0, 1), "C": (0, 1)},
}

DEFAULT_HORIZONS: Mapping[str, int] = {"set1": 350, "set2": 200, "ablation": 200}

# Run-level values that are not headline metrics but still aggregated over seeds.
EXTRA_METRICS = ("time_s", "engagement_rate", "commerce_revenue", "boost_actions")


@dataclass(frozen=True)
class ExperimentGrid:
    name: str
    factors: Mapping[str, tuple] = field(default_factory=dict)
    seeds: tuple[int, ...] = (0, 1, 2)
    horizon: int | None = None

    def __post_init__(self) -> None:
        if self.name not in GRID_NAMES:
            raise ConfigError(f"grid name must be one of {GRID_NAMES}")
        if not self.factors:
            object.__setattr__(self, "factors", dict(FACTORS[self.name]))
        if set(self.factors) != set(FACTORS[self.name]):
            raise ConfigError(f"{self.name} factors must be {sorted(FACTORS[self.name])}")
        if not self.seeds:
            raise ConfigError("at least one seed is required")
        if self.horizon is not None and self.horizon < 0:
            raise ConfigError("horizon must be >= 0")

    def conditions(self) -> list[dict[str, Any]]:
        names = list(FACTORS[self.name])
        return [dict(zip(names, levels)) for levels in itertools.product(*(self.factors[n] for n in names))]

    def runs(self) -> list[tuple[dict[str, Any], int]]:
        return [(c, s) for c in self.conditions() for s in self.seeds]

    @property
    def effective_horizon(self) -> int:
        return DEFAULT_HORIZONS[self.name] if self.horizon is None else self.horizon


def condition_key(condition: Mapping[str, Any]) -> str:
    """Stable, filesystem-safe label such as ``S=S1_A=0.2_M=full``."""
    return "_".join(f"{k}={v:g}" if isinstance(v, float) else f"{k}={v}" for k, v in condition.items())


def condition_overrides(grid_name: str, condition: Mapping[str, Any]) -> dict[str, Any]:
    """Config overrides for one condition of a grid.

    In Set 1 the S0 arm assigns nobody to the planner whatever ``A`` says, so
    its four adoption cells are replicates of the heuristic baseline.
    """
    if grid_name == "set1":
        adoption = float(condition["A"]) if condition["S"] == "S1" else 0.0
        return {"planner_adoption": adoption, "monetization": condition["M"], "governance_strategy": "S0"}
    if grid_name == "set2":
        return {"governance_strategy": condition["S"], "decisions": {"budget_cap": float(condition["B"])}}
    if grid_name == "ablation":
        return {
            "persona_source": "llm" if int(condition["P"]) else "template",
            "caption_source": "llm" if int(condition["C"]) else "template",
        }
    raise ConfigError(f"unknown grid {grid_name!r}")


def run_config(grid: ExperimentGrid, base: SimulationConfig, condition: Mapping[str, Any], seed: int, cache_dir: Path | None) -> SimulationConfig:
    changes = merge({"seed": seed, "horizon": grid.effective_horizon}, condition_overrides(grid.name, condition))
    if cache_dir is not None:
        path = cache_dir / f"{condition_key(condition)}_seed={seed}.jsonl"
        changes = merge(changes, {"decisions": {"cache_path": str(path)}})
    return SimulationConfig.replace(base, **changes)


@dataclass
class ConditionReport:
    grid: str
    key: str
    condition: dict[str, Any]
    runs: list[dict[str, Any]]
    stats: dict[str, tuple[float, float]]
    failed: bool = False
    errors: list[str] = field(default_factory=list)

    def as_dict(self) -> dict[str, Any]:
        return {
            "grid": self.grid,
            "key": self.key,
            "condition": self.condition,
            "failed": self.failed,
            "errors": self.errors,
            "stats": {k: {"mean": m, "std": s} for k, (m, s) in self.stats.items()},
            "runs": self.runs,
        }


def _creator_earnings(world) -> list[dict[str, Any]]:
    gifts = world.registry.creator_gift_revenue()
    commerce = world.registry.revenue["commerce"]
    return [
        {
            "creator_id": c,
            "strategy": "S1" if c in world.planner_s1 else "S0",
            "gifts": float(gifts.get(c, 0.0)),
            "commerce": float(commerce.get(c, 0.0)),
        }
        for c in world.creators
    ]


def _trend_series(log_events, top: int = 3) -> dict[str, Any]:
    """Per-step score and volume for the most active hashtags, plus the forecast times."""
    volume: dict[str, dict[int, float]] = {}
    score: dict[str, dict[int, float]] = {}
    forecasts: dict[str, list[list[float]]] = {}
    for ev in log_events:
        if ev.event_type is EventType.TREND_UPDATED:
            for key, _velocity, sc, _life, _phase, last in ev.payload["trends"]:
                score.setdefault(key, {})[ev.step] = float(sc)
                volume.setdefault(key, {})[ev.step] = float(last)
        elif ev.event_type is EventType.TREND_FORECAST:
            for tag, conf, _ in ev.payload["forecasts"]:
                forecasts.setdefault(tag, []).append([ev.step, float(conf)])
    ranked = sorted(volume, key=lambda k: (-sum(volume[k].values()), k))[:top]
    return {
        k: {
            "steps": sorted(score[k]),
            "score": [score[k][s] for s in sorted(score[k])],
            "volume": [volume[k][s] for s in sorted(score[k])],
            "forecasts": forecasts.get(k, []),
        }
        for k in ranked
    }


def execute_run(grid_name: str, key: str, seed: int, config_dict: dict[str, Any], run_dir: str | None) -> dict[str, Any]:
    """Worker entry point: one simulation, reduced to a picklable record."""
    from svtwin.sim.config import from_dict
    from svtwin.sim.engine import run

    config = from_dict(config_dict)
    start = time.perf_counter()
    result = run(config, run_dir)
    elapsed = time.perf_counter() - start
    summary = result.summary
    record: dict[str, Any] = {"key": key, "seed": seed, "time_s": elapsed, "digest": result.digest}
    for name in METRIC_NAMES + EXTRA_METRICS[1:]:
        record[name] = float(summary[name])
    record["creators"] = _creator_earnings(result.world)
    if grid_name == "set2":
        record["trends"] = _trend_series(result.log.events())
    if run_dir is not None:
        Path(run_dir, "record.json").write_text(json.dumps(record, indent=2, sort_keys=True))
    return record


def run_grid(
    grid: ExperimentGrid,
    base_config: SimulationConfig | None = None,
    parallelism: int = 1,
    out_dir: str | Path | None = None,
    cache_dir: str | Path | None = None,
) -> list[ConditionReport]:
    """Run every (condition, seed) pair and aggregate per condition.

    A failing run marks its condition failed; the remaining runs still go ahead.
    With ``out_dir`` each run persists its artefacts under ``out_dir/<condition>/seed=<s>``.
    """
    base = base_config or SimulationConfig()
    root = Path(out_dir) if out_dir is not None else None
    cache = Path(cache_dir) if cache_dir is not None else None
    jobs = []
    for condition, seed in grid.runs():
        key = condition_key(condition)
        cfg = run_config(grid, base, condition, seed, cache)
        run_dir = str(root / key / f"seed={seed}") if root is not None else None
        jobs.append((grid.name, key, seed, to_dict(cfg), run_dir))

    outcomes: list[dict[str, Any] | BaseException] = []
    if parallelism <= 1:
        for job in jobs:
            outcomes.append(_guarded(job))
    else:
        with ProcessPoolExecutor(max_workers=parallelism) as pool:
            futures = [pool.submit(execute_run, *job) for job in jobs]
            for fut in futures:
                try:
                    outcomes.append(fut.result())
                except Exception as exc:  # noqa: BLE001 - any failure marks the condition
                    outcomes.append(exc)

    by_key: dict[str, list] = {}
    for job, outcome in zip(jobs, outcomes):
        by_key.setdefault(job[1], []).append((job[2], outcome))
    reports = []
    for condition in grid.conditions():
        key = condition_key(condition)
        runs, errors = [], []
        for seed, outcome in by_key[key]:
            if isinstance(outcome, BaseException):
                errors.append(f"seed {seed}: {type(outcome).__name__}: {outcome}")
            else:
                runs.append(outcome)
        stats = aggregate(runs, METRIC_NAMES + EXTRA_METRICS) if runs else {}
        reports.append(ConditionReport(grid.name, key, dict(condition), runs, stats, bool(errors), errors))
    return reports


def _guarded(job: tuple) -> dict[str, Any] | BaseException:
    try:
        return execute_run(*job)
    except Exception as exc:  # noqa: BLE001 - any failure marks the condition
        log.error("run %s seed %s failed:\n%s", job[1], job[2], traceback.format_exc())
        return exc


def pooled_stats(reports: Sequence[ConditionReport], factor: str, names: Sequence[str] = METRIC_NAMES) -> dict[Any, dict[str, tuple[float, float]]]:
    """Mean and std over every run sharing a level of ``factor`` (e.g. Table-style strategy rows)."""
    groups: dict[Any, list[dict[str, Any]]] = {}
    for r in reports:
        groups.setdefault(r.condition[factor], []).extend(r.runs)
    return {level: {n: mean_std([float(x[n]) for x in rows]) for n in names} for level, rows in groups.items()}
