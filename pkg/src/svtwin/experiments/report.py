"""CSV/JSON tables and SVG figures for grid reports."""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path
from typing import Any, Iterable, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from svtwin.experiments.grid import EXTRA_METRICS, ConditionReport  # noqa: E402
from svtwin.experiments.metrics import METRIC_NAMES, mean_std  # noqa: E402

FORMATS = ("csv", "json", "svg")
STAT_NAMES = METRIC_NAMES + EXTRA_METRICS


def csv_columns(reports: Sequence[ConditionReport]) -> list[str]:
    factors = list(reports[0].condition) if reports else []
    stats = [f"{n}_{s}" for n in STAT_NAMES for s in ("mean", "std")]
    return ["grid", "key", *factors, "n_runs", "failed", *stats]


def csv_rows(reports: Sequence[ConditionReport]) -> list[dict[str, Any]]:
    rows = []
    for r in reports:
        row: dict[str, Any] = {"grid": r.grid, "key": r.key, **r.condition, "n_runs": len(r.runs), "failed": int(r.failed)}
        for n in STAT_NAMES:
            m, s = r.stats.get(n, (math.nan, math.nan))
            row[f"{n}_mean"], row[f"{n}_std"] = m, s
        rows.append(row)
    return rows


def write_csv(reports: Sequence[ConditionReport], path: Path) -> Path:
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=csv_columns(reports))
        writer.writeheader()
        # Python writes floats with repr, so re-parsing gives the same values bit for bit.
        writer.writerows(csv_rows(reports))
    return path


def read_csv(path: str | Path) -> list[dict[str, Any]]:
    """Parse a condition table back, converting numeric cells."""
    out = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            parsed: dict[str, Any] = {}
            for k, v in row.items():
                if k in ("grid", "key", "S", "M"):
                    parsed[k] = v
                elif k in ("n_runs", "failed", "P", "C"):
                    parsed[k] = int(v)
                else:
                    parsed[k] = float(v)
            out.append(parsed)
    return out


def write_json(reports: Sequence[ConditionReport], path: Path) -> Path:
    path.write_text(json.dumps([r.as_dict() for r in reports], indent=1, sort_keys=True))
    return path


def load_reports(path: str | Path) -> list[ConditionReport]:
    """Rebuild reports from a summary JSON written by :func:`write_json`."""
    data = json.loads(Path(path).read_text())
    return [
        ConditionReport(
            d["grid"],
            d["key"],
            d["condition"],
            d["runs"],
            {k: (v["mean"], v["std"]) for k, v in d["stats"].items()},
            d["failed"],
            d["errors"],
        )
        for d in data
    ]


# -- figures --------------------------------------------------------------------
def plot_earnings(reports: Sequence[ConditionReport], path: Path) -> Path:
    """Histogram of per-creator earnings, one overlaid distribution per planning strategy."""
    earnings: dict[str, list[float]] = {"S0": [], "S1": []}
    for r in reports:
        for run in r.runs:
            for c in run.get("creators", []):
                earnings.setdefault(c["strategy"], []).append(math.log10(1.0 + c["gifts"] + c["commerce"]))
    fig, ax = plt.subplots(figsize=(6, 4))
    pooled = [v for vals in earnings.values() for v in vals]
    bins = 30 if pooled else 1
    colors = {"S0": "tab:gray", "S1": "tab:green"}
    for strategy, vals in sorted(earnings.items()):
        if vals:
            ax.hist(vals, bins=bins, range=(0, max(pooled) or 1.0), density=True, alpha=0.5, color=colors.get(strategy), label=f"{strategy} (n={len(vals)})")
    ax.set_xlabel("log10(1 + creator earnings)")
    ax.set_ylabel("density")
    ax.set_title("Creator earnings by planning strategy")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)
    return path


def adoption_curve(reports: Sequence[ConditionReport]) -> list[tuple[float, float, float, float, float]]:
    """(A, gini mean, gini std, revenue mean, revenue std) over the S1 arm, pooling monetization levels."""
    groups: dict[float, list[dict[str, Any]]] = {}
    for r in reports:
        if r.condition.get("S") == "S1":
            groups.setdefault(float(r.condition["A"]), []).extend(r.runs)
    out = []
    for a in sorted(groups):
        g = mean_std([x["gift_gini"] for x in groups[a]])
        rev = mean_std([x["gift_revenue"] + x["commerce_revenue"] for x in groups[a]])
        out.append((a, *g, *rev))
    return out


def plot_adoption(reports: Sequence[ConditionReport], path: Path) -> Path:
    curve = adoption_curve(reports)
    fig, ax = plt.subplots(figsize=(6, 4))
    xs = [100 * c[0] for c in curve]
    ax.errorbar(xs, [c[1] for c in curve], yerr=[c[2] for c in curve], color="tab:red", marker="o", label="gift Gini")
    ax.set_xlabel("planner adoption (%)")
    ax.set_ylabel("gift Gini", color="tab:red")
    ax2 = ax.twinx()
    ax2.errorbar(xs, [c[3] for c in curve], yerr=[c[4] for c in curve], color="tab:blue", linestyle="--", marker="s", label="revenue")
    ax2.set_ylabel("total revenue", color="tab:blue")
    ax.set_title("Adoption vs inequality and revenue")
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)
    return path


def _lifecycle_run(reports: Sequence[ConditionReport]) -> dict[str, Any] | None:
    """Prefer a forecasting run (S2, largest budget) for the lifecycle figure."""
    ranked = sorted(reports, key=lambda r: (r.condition.get("S") != "S2", -float(r.condition.get("B", 0))))
    for r in ranked:
        for run in r.runs:
            if run.get("trends"):
                return run
    return None


def plot_lifecycle(reports: Sequence[ConditionReport], path: Path) -> Path:
    run = _lifecycle_run(reports)
    fig, ax = plt.subplots(figsize=(7, 4))
    ax2 = ax.twinx()
    if run is not None:
        for i, (tag, series) in enumerate(sorted(run["trends"].items())):
            color = f"C{i}"
            ax.plot(series["steps"], series["score"], color=color, label=f"#{tag} score")
            ax2.bar(series["steps"], series["volume"], color=color, alpha=0.2, width=1.0)
            if series["forecasts"]:
                fs, fc = zip(*series["forecasts"])
                ax.step(fs, fc, where="post", color=color, linestyle="--", label=f"#{tag} forecast")
    ax.set_xlabel("step (h)")
    ax.set_ylabel("trend score / forecast confidence")
    ax2.set_ylabel("interactions per step")
    ax.set_title("Trend lifecycle and forecasts")
    if ax.lines:
        ax.legend(fontsize="small")
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)
    return path


def emit_report(reports: Sequence[ConditionReport], out_dir: str | Path, formats: Iterable[str] = FORMATS) -> list[Path]:
    """Write the condition table, the summary JSON and the grid's figures."""
    if not reports:
        raise ValueError("no reports to emit")
    formats = tuple(formats)
    unknown = set(formats) - set(FORMATS)
    if unknown:
        raise ValueError(f"unknown formats {sorted(unknown)}")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    name = reports[0].grid
    files = []
    if "csv" in formats:
        files.append(write_csv(reports, out / f"{name}_conditions.csv"))
    if "json" in formats:
        files.append(write_json(reports, out / f"{name}_summary.json"))
    if "svg" in formats:
        if name == "set1":
            files.append(plot_earnings(reports, out / "set1_earnings.svg"))
            files.append(plot_adoption(reports, out / "set1_adoption.svg"))
        elif name == "set2":
            files.append(plot_lifecycle(reports, out / "set2_lifecycle.svg"))
    return files
