import csv
import io
import json

import numpy as np
import pytest

from robustmean.bench import CSV_FIELDS, load_plan, plan_from_dict, run_benchmark
from robustmean.cli import main
from robustmean.errors import InvalidInput

PLAN = {
    "seed": 7,
    "scenarios": [{
        "id": "tiny", "n": 400, "d": 3, "k": 10, "trials": 3,
        "estimators": ["empirical", "coordinate_mom"],
        "distribution": {"family": "student_t", "dof": 3.0, "mean": 1.0},
        "contamination": {"count": 1, "placement": "cluster_at_distance", "radius": 100.0},
    }],
}


def test_cardinality_and_order():
    result = run_benchmark(plan_from_dict(PLAN))
    rows = list(csv.DictReader(io.StringIO(result.results_csv())))
    assert len(rows) == 6
    assert tuple(rows[0]) == CSV_FIELDS
    assert [(r["trial"], r["estimator"]) for r in rows[:2]] == [("0", "empirical"), ("0", "coordinate_mom")]
    assert all(r["status"] == "ok" for r in rows)
    summary = list(csv.DictReader(io.StringIO(result.summary_csv())))
    assert len(summary) == 2
    errs = sorted(float(r["error"]) for r in rows if r["estimator"] == "empirical")
    assert float(summary[0]["median"]) == errs[1]


def test_rerun_byte_identical(tmp_path):
    plan = plan_from_dict(PLAN)
    a, b = run_benchmark(plan), run_benchmark(plan)
    assert a.results_csv() == b.results_csv()
    assert a.summary_csv() == b.summary_csv()


def test_workers_match_serial():
    plan = plan_from_dict(PLAN)
    assert run_benchmark(plan, workers=2).results_csv() == run_benchmark(plan).results_csv()


def test_insufficient_recorded_as_status():
    raw = json.loads(json.dumps(PLAN))
    raw["scenarios"][0]["k"] = 300
    rows = list(csv.DictReader(io.StringIO(run_benchmark(plan_from_dict(raw)).results_csv())))
    assert {r["status"] for r in rows if r["estimator"] == "coordinate_mom"} == {"insufficient_samples"}
    assert {r["status"] for r in rows if r["estimator"] == "empirical"} == {"ok"}


@pytest.mark.parametrize("mutate", [
    lambda p: p["scenarios"].append(dict(p["scenarios"][0])),
    lambda p: p["scenarios"][0].update(trials=0),
    lambda p: p["scenarios"][0].update(estimators=["magic"]),
    lambda p: p["scenarios"][0].pop("n"),
    lambda p: p.update(scenarios=[]),
])
def test_invalid_plans(mutate):
    raw = json.loads(json.dumps(PLAN))
    mutate(raw)
    with pytest.raises(InvalidInput):
        plan_from_dict(raw)


def test_cli_bench_writes_outputs(tmp_path):
    plan_path = tmp_path / "plan.json"
    plan_path.write_text(json.dumps(PLAN))
    out = tmp_path / "out"
    assert main(["bench", "--plan", str(plan_path), "--output-dir", str(out)]) == 0
    assert {p.name for p in out.iterdir()} >= {"results.csv", "summary.csv", "results.json"}
    payload = json.loads((out / "results.json").read_text())
    assert len(payload["rows"]) == 6
    assert load_plan(plan_path).seed == 7
