"""``svtwin`` command line: run the experiment grids, rebuild reports, replay runs."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Sequence

import yaml

from svtwin.decisions.clients import API_KEY_ENV, ENDPOINT_ENV
from svtwin.decisions.optimizer import LLM_MODES
from svtwin.experiments.grid import DEFAULT_HORIZONS, FACTORS, ExperimentGrid, run_grid
from svtwin.experiments.report import FORMATS, emit_report, load_reports
from svtwin.sim.config import SimulationConfig, from_dict, merge, to_dict

log = logging.getLogger("svtwin")

# Set 2 stress preset: a budget small enough to saturate, and a forecast every step.
STRESS_BUDGETS = (2.0, 1.0, 0.5)
STRESS_OVERRIDES = {"forecast_interval": 1, "control_interval": 1}


def _seeds(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(s) for s in text.split(",") if s.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad seed list {text!r}") from exc


def _assignment(text: str) -> tuple[list[str], Any]:
    if "=" not in text:
        raise argparse.ArgumentTypeError(f"expected key=value, got {text!r}")
    key, raw = text.split("=", 1)
    return key.split("."), yaml.safe_load(raw)


def _nest(path: list[str], value: Any) -> dict[str, Any]:
    out: Any = value
    for k in reversed(path):
        out = {k: out}
    return out


def load_config(path: str | None, assignments: Sequence[tuple[list[str], Any]] = ()) -> SimulationConfig:
    """Base config from a YAML/JSON file (JSON parses as YAML), then ``--set`` overrides."""
    data: dict[str, Any] = to_dict(SimulationConfig())
    if path:
        loaded = yaml.safe_load(Path(path).read_text()) or {}
        if not isinstance(loaded, dict):
            raise SystemExit(f"config file {path} must hold a mapping")
        data = merge(data, loaded)
    for keys, value in assignments:
        data = merge(data, _nest(keys, value))
    return from_dict(data)


def _grid_parser(sub, name: str, help_text: str) -> None:
    p = sub.add_parser(name, help=help_text)
    p.add_argument("--seeds", type=_seeds, default=(0, 1, 2), help="comma-separated seeds (default 0,1,2)")
    p.add_argument("--horizon", type=int, default=None, help="steps per run (default %d)" % DEFAULT_HORIZONS[name[4:]])
    p.add_argument("--population", type=int, default=None, help="agents per run")
    p.add_argument("--out", default=f"runs/{name[4:]}", help="output directory")
    p.add_argument("--llm-mode", choices=LLM_MODES, default="fixture", help=f"decision service mode; live reads {ENDPOINT_ENV} and {API_KEY_ENV}")
    p.add_argument("--budget", type=float, default=None, help="LLM budget cap in USD (Set 2 budget levels override it)")
    p.add_argument("--config", default=None, help="YAML or JSON config file")
    p.add_argument("--set", dest="assignments", type=_assignment, action="append", default=[], metavar="KEY=VALUE", help="config override, dotted keys for nested fields")
    p.add_argument("--jobs", type=int, default=1, help="worker processes")
    p.add_argument("--formats", default=",".join(FORMATS), help="report formats")
    p.add_argument("--extended", action="store_true", help="double the horizon for long-run validation")
    if name == "run-set2":
        p.add_argument("--stress", action="store_true", help="tight budgets and a forecast at every control step")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="svtwin", description="Short-video platform digital twin experiments")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    _grid_parser(sub, "run-set1", "creator campaign planning grid (S x A x M, 16 conditions)")
    _grid_parser(sub, "run-set2", "trend forecasting and control grid (S x B, 9 conditions)")
    _grid_parser(sub, "run-ablation", "persona x caption ablation (P x C, 4 conditions)")
    rep = sub.add_parser("report", help="re-emit tables and figures from a summary JSON")
    rep.add_argument("summary", help="<grid>_summary.json written by a run command")
    rep.add_argument("--out", default=None, help="output directory (default: the summary's directory)")
    rep.add_argument("--formats", default=",".join(FORMATS))
    rp = sub.add_parser("replay", help="rebuild a run from its event log and check the state hashes")
    rp.add_argument("run_dir", help="a run directory holding config.json and events.jsonl")
    return parser


def _run_grid_command(args: argparse.Namespace) -> int:
    name = args.command[4:]
    assignments = list(args.assignments)
    assignments.append((["decisions", "mode"], args.llm_mode))
    if args.budget is not None:
        assignments.append((["decisions", "budget_cap"], args.budget))
    if args.population is not None:
        assignments.append((["population"], args.population))
    factors = dict(FACTORS[name])
    if getattr(args, "stress", False):
        factors["B"] = STRESS_BUDGETS
        assignments.extend(([k], v) for k, v in STRESS_OVERRIDES.items())
    base = load_config(args.config, assignments)
    horizon = args.horizon if args.horizon is not None else DEFAULT_HORIZONS[name]
    if args.extended:
        horizon *= 2
    grid = ExperimentGrid(name, factors, tuple(args.seeds), horizon)
    out = Path(args.out)
    log.info("%s: %d conditions x %d seeds, horizon %d", name, len(grid.conditions()), len(grid.seeds), horizon)
    reports = run_grid(grid, base, parallelism=args.jobs, out_dir=out / "runs", cache_dir=out / "cache")
    files = emit_report(reports, out, args.formats.split(","))
    failed = [r.key for r in reports if r.failed]
    print(f"{name}: {sum(len(r.runs) for r in reports)} runs over {len(reports)} conditions -> {out}")
    for r in reports:
        vg, gg = r.stats.get("view_gini", (float("nan"),) * 2), r.stats.get("gift_gini", (float("nan"),) * 2)
        print(f"  {r.key:<24} view_gini {vg[0]:.3f}+-{vg[1]:.3f}  gift_gini {gg[0]:.3f}+-{gg[1]:.3f}{'  FAILED' if r.failed else ''}")
    for f in files:
        print(f"  wrote {f}")
    if failed:
        print(f"failed conditions: {', '.join(failed)}", file=sys.stderr)
        return 1
    return 0


def _report_command(args: argparse.Namespace) -> int:
    path = Path(args.summary)
    reports = load_reports(path)
    for f in emit_report(reports, args.out or path.parent, args.formats.split(",")):
        print(f"wrote {f}")
    return 0


def _replay_command(args: argparse.Namespace) -> int:
    from svtwin.events.bus import read_log
    from svtwin.sim.engine import replay_world

    run_dir = Path(args.run_dir)
    config = from_dict(json.loads((run_dir / "config.json").read_text()))
    world = replay_world(config, read_log(run_dir / "events.jsonl"))
    hashes = {"digest": world.bus.log.digest(), **world.state_hashes()}
    expected_path = run_dir / "state_hashes.json"
    expected = json.loads(expected_path.read_text()) if expected_path.exists() else {}
    ok = True
    for k, v in hashes.items():
        status = "ok" if expected.get(k) == v else ("unchecked" if k not in expected else "MISMATCH")
        ok &= status != "MISMATCH"
        print(f"{k:<10} {v}  {status}")
    if world.checkpoint_mismatches:
        ok = False
        print(f"checkpoint mismatches at steps {world.checkpoint_mismatches}")
    return 0 if ok else 1


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    if args.command == "report":
        return _report_command(args)
    if args.command == "replay":
        return _replay_command(args)
    return _run_grid_command(args)


if __name__ == "__main__":
    sys.exit(main())
