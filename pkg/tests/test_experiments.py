from __future__ import annotations

import json
import math
import statistics

import pytest
from hypothesis import given
from hypothesis import strategies as st

from svtwin.experiments import ExperimentGrid, condition_key, condition_overrides, mean_std, run_grid, summarize
from svtwin.experiments.cli import load_config, main
from svtwin.experiments.metrics import top_share
from svtwin.experiments.report import read_csv, write_csv
from svtwin.sim import SimulationConfig

TINY = SimulationConfig().replace(population=40)


@pytest.mark.parametrize("name,runs,conditions", [("set1", 48, 16), ("set2", 27, 9), ("ablation", 12, 4)])
def test_grid_sizes(name, runs, conditions):
    grid = ExperimentGrid(name)
    assert len(grid.conditions()) == conditions and len(grid.runs()) == runs
    assert len({condition_key(c) for c in grid.conditions()}) == conditions


def test_condition_overrides():
    assert condition_overrides("set1", {"S": "S0", "A": 0.5, "M": "full"})["planner_adoption"] == 0.0
    assert condition_overrides("set1", {"S": "S1", "A": 0.5, "M": "full"})["planner_adoption"] == 0.5
    assert condition_overrides("set2", {"S": "S2", "B": 10.0}) == {"governance_strategy": "S2", "decisions": {"budget_cap": 10.0}}
    assert condition_overrides("ablation", {"P": 1, "C": 0}) == {"persona_source": "llm", "caption_source": "template"}
    assert condition_key({"S": "S1", "A": 0.2, "M": "full"}) == "S=S1_A=0.2_M=full"


@given(st.lists(st.floats(-1e6, 1e6, allow_nan=False), min_size=2, max_size=20))
def test_mean_std_matches_statistics(values):
    m, s = mean_std(values)
    assert m == pytest.approx(statistics.fmean(values), abs=1e-6)
    assert s == pytest.approx(statistics.stdev(values), rel=1e-9, abs=1e-6)


def test_mean_std_edges():
    assert mean_std([]) == (0.0, 0.0) and mean_std([3.0]) == (3.0, 0.0)
    assert mean_std([1.0, 2.0, 3.0]) == (2.0, 1.0)


def test_metric_fixtures():
    out = summarize([1, 2, 3, 4], [0, 0, 0, 10], 100, 36, 250.0, [3, 1], 0.5)
    assert out["view_gini"] == pytest.approx(0.25)
    assert out["skip_rate"] == pytest.approx(0.36)
    assert out["mean_watch_time"] == pytest.approx(2.5)
    assert out["hashtag_entropy"] == pytest.approx(0.811278, abs=1e-6)
    assert out["top_decile_gift_share"] == 1.0 and out["empty"] == 0.0
    assert summarize([], [], 0, 0, 0.0, [], 0.0)["empty"] == 1.0
    assert top_share(list(range(1, 21))) == pytest.approx((20 + 19) / 210)


def test_adoption_matches_fraction():
    reports = run_grid(ExperimentGrid("set1", {"S": ("S1",), "A": (0.2, 0.5), "M": ("basic",)}, seeds=(0,), horizon=8), TINY)
    for r in reports:
        creators = r.runs[0]["creators"]
        share = sum(c["strategy"] == "S1" for c in creators) / len(creators)
        assert abs(share - r.condition["A"]) <= 1 / len(creators)


def test_failed_run_marks_condition(monkeypatch):
    import svtwin.experiments.grid as grid_mod

    real = grid_mod.execute_run

    def flaky(grid_name, key, seed, cfg, run_dir):
        if "P=1_C=1" == key and seed == 1:
            raise RuntimeError("boom")
        return real(grid_name, key, seed, cfg, run_dir)

    monkeypatch.setattr(grid_mod, "execute_run", flaky)
    reports = run_grid(ExperimentGrid("ablation", seeds=(0, 1), horizon=8), TINY)
    bad = [r for r in reports if r.failed]
    assert [r.key for r in bad] == ["P=1_C=1"] and len(bad[0].runs) == 1
    assert all(len(r.runs) == 2 for r in reports if not r.failed)


def test_csv_round_trip(tmp_path):
    reports = run_grid(ExperimentGrid("ablation", seeds=(0, 1), horizon=8), TINY)
    rows = read_csv(write_csv(reports, tmp_path / "t.csv"))
    assert len(rows) == 4
    for row, r in zip(rows, reports):
        assert row["key"] == r.key and row["n_runs"] == 2
        for name, (m, s) in r.stats.items():
            assert row[f"{name}_mean"] == m and row[f"{name}_std"] == s


def test_cache_warm_rerun_adds_no_spend(tmp_path):
    base = TINY.replace(decisions={"mode": "fixture"})
    grid = ExperimentGrid("ablation", {"P": (1,), "C": (1,)}, seeds=(0,), horizon=8)
    cold = run_grid(grid, base, cache_dir=tmp_path)[0].runs[0]
    warm = run_grid(grid, base, cache_dir=tmp_path)[0].runs[0]
    assert cold["llm_spend"] > 0 and warm["llm_spend"] == 0.0
    assert warm["view_gini"] == cold["view_gini"]


def test_load_config_overrides(tmp_path):
    path = tmp_path / "c.yaml"
    path.write_text("population: 33\ngate:\n  initial_quota: 250\n")
    cfg = load_config(str(path), [(["decisions", "budget_cap"], 5.0), (["horizon"], 7)])
    assert (cfg.population, cfg.gate.initial_quota, cfg.decisions.budget_cap, cfg.horizon) == (33, 250, 5.0, 7)


def test_cli_end_to_end(tmp_path, capsys):
    out = tmp_path / "abl"
    code = main(["run-ablation", "--seeds", "0", "--horizon", "6", "--population", "40", "--out", str(out)])
    assert code == 0
    runs = sorted(out.glob("runs/*/seed=0"))
    assert len(runs) == 4
    summary = out / "ablation_summary.json"
    assert len(json.loads(summary.read_text())) == 4
    assert main(["report", str(summary), "--out", str(tmp_path / "rep")]) == 0
    assert (tmp_path / "rep" / "ablation_conditions.csv").exists()
    assert main(["replay", str(runs[0])]) == 0
    hashes = runs[0] / "state_hashes.json"
    data = json.loads(hashes.read_text())
    data["registry"] = "0" * 64
    hashes.write_text(json.dumps(data))
    assert main(["replay", str(runs[0])]) == 1
    assert "MISMATCH" in capsys.readouterr().out


def test_cli_set2_figures(tmp_path):
    out = tmp_path / "s2"
    code = main(["run-set2", "--seeds", "0", "--horizon", "8", "--population", "40", "--out", str(out), "--stress", "--formats", "json,svg"])
    assert code == 0
    assert (out / "set2_lifecycle.svg").read_text().startswith("<?xml")
    keys = [r["key"] for r in json.loads((out / "set2_summary.json").read_text())]
    assert keys[0] == "S=S0_B=2" and len(keys) == 9


def test_cli_set1_figures(tmp_path):
    out = tmp_path / "s1"
    assert main(["run-set1", "--seeds", "0", "--horizon", "4", "--population", "30", "--out", str(out), "--jobs", "2"]) == 0
    for name in ("set1_earnings.svg", "set1_adoption.svg", "set1_conditions.csv"):
        assert (out / name).exists()
    rows = read_csv(out / "set1_conditions.csv")
    assert len(rows) == 16 and not any(math.isnan(r["view_gini_mean"]) for r in rows)
