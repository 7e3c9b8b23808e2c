"""Benchmark harness: scenarios x trials x estimators, written as CSV and JSON.

Seeds are derived with ``SeedSequence(plan.seed, spawn_key=(scenario, trial, stream))``
(see ``datagen.derive_seed``), so the output depends only on the plan.
Per-trial rows in ``results.csv`` hold no timings and are byte-identical across
reruns; wall times go to ``results.json``.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

import numpy as np

from .baselines import empirical_mean, geometric_median
from .bucketing import bucket_means, coordinate_median_of_means
from .core import EstimatorConfig, resolve_k
from .datagen import (ContaminationSpec, DistributionSpec, contaminate, derive_seed, mean_vector,
                      sample_dataset)
from .descent import estimate_mean
from .errors import DegenerateData, InsufficientSamples, InvalidInput, RobustMeanError

log = logging.getLogger(__name__)

ESTIMATORS = ("spectral", "empirical", "geometric_median", "coordinate_mom")
CSV_FIELDS = ("scenario", "trial", "estimator", "status", "error", "k", "iterations", "chosen_iteration")
SUMMARY_FIELDS = ("scenario", "estimator", "trials", "failures", "median", "q25", "q75", "q90", "mean")

# seed streams within a trial
_DATA, _CONTAM, _BUCKETS, _SPECTRAL = 0, 1, 2, 3


@dataclass(frozen=True)
class Scenario:
    id: str
    distribution: DistributionSpec
    n: int
    delta: float = 0.05
    k: Optional[int] = None
    contamination: ContaminationSpec = field(default_factory=ContaminationSpec)
    trials: int = 1
    estimators: tuple = ESTIMATORS
    config: dict = field(default_factory=dict)

    @property
    def d(self) -> int:
        return self.distribution.d

    def estimator_config(self) -> EstimatorConfig:
        values = {"delta": self.delta, "k_override": self.k, **self.config}
        return EstimatorConfig.from_dict(values)


@dataclass(frozen=True)
class BenchmarkPlan:
    scenarios: tuple
    seed: int = 0

    def __post_init__(self):
        ids = [s.id for s in self.scenarios]
        if len(set(ids)) != len(ids):
            raise InvalidInput("scenario ids must be unique")
        for s in self.scenarios:
            if s.trials < 1:
                raise InvalidInput(f"scenario {s.id}: trials must be >= 1")
            unknown = set(s.estimators) - set(ESTIMATORS)
            if unknown:
                raise InvalidInput(f"scenario {s.id}: unknown estimators {sorted(unknown)}")


def _scenario_from_dict(raw: dict) -> Scenario:
    try:
        d = int(raw["d"])
        dist = raw.get("distribution", {})
        spec = DistributionSpec(
            family=dist.get("family", "gaussian"),
            true_mean=mean_vector(dist.get("mean", 0.0), d),
            scale=float(dist.get("scale", 1.0)),
            tail_parameter=float(dist.get("tail_parameter", dist.get("dof", 0.0))),
        )
        contam = raw.get("contamination") or {}
        contamination = ContaminationSpec(
            count=int(contam.get("count", 0)),
            placement=contam.get("placement", "cluster_at_distance"),
            radius=float(contam.get("radius", 1.0)),
            direction=tuple(contam["direction"]) if contam.get("direction") is not None else None,
            coordinate=int(contam.get("coordinate", 0)),
        )
        return Scenario(
            id=str(raw["id"]),
            distribution=spec,
            n=int(raw["n"]),
            delta=float(raw.get("delta", 0.05)),
            k=None if raw.get("k") is None else int(raw["k"]),
            contamination=contamination,
            trials=int(raw.get("trials", 1)),
            estimators=tuple(raw.get("estimators", ESTIMATORS)),
            config=dict(raw.get("config", {})),
        )
    except KeyError as exc:
        raise InvalidInput(f"scenario missing field {exc}") from None


def plan_from_dict(raw: dict) -> BenchmarkPlan:
    scenarios = raw.get("scenarios")
    if not scenarios:
        raise InvalidInput("plan needs a nonempty 'scenarios' list")
    return BenchmarkPlan(tuple(_scenario_from_dict(s) for s in scenarios), int(raw.get("seed", 0)))


def load_plan(path) -> BenchmarkPlan:
    return plan_from_dict(json.loads(Path(path).read_text()))


def _run_trial(args) -> list[dict]:
    seed, s_idx, scenario, trial = args
    rows = []
    data, truth = sample_dataset(scenario.distribution, scenario.n, derive_seed(seed, s_idx, trial, _DATA))
    contam = scenario.contamination
    if contam.count:
        if contam.center is None:
            contam = ContaminationSpec(contam.count, contam.placement, contam.radius,
                                       tuple(truth.mean), contam.direction, contam.coordinate)
        data, _ = contaminate(data, contam, derive_seed(seed, s_idx, trial, _CONTAM))
    config = scenario.estimator_config()
    for name in scenario.estimators:
        row: dict[str, Any] = {"scenario": scenario.id, "trial": trial, "estimator": name,
                               "status": "ok", "error": "", "k": "", "iterations": "",
                               "chosen_iteration": ""}
        started = time.perf_counter()
        try:
            if name == "empirical":
                est = empirical_mean(data)
            elif name == "spectral":
                report = estimate_mean(data, config, derive_seed(seed, s_idx, trial, _SPECTRAL))
                est = report.estimate
                row.update(k=report.k, iterations=len(report.iterations),
                           chosen_iteration=report.chosen_iteration)
            else:
                k = resolve_k(config, data.n)
                buckets = bucket_means(data, 2 * k, derive_seed(seed, s_idx, trial, _BUCKETS))
                row["k"] = k
                if name == "geometric_median":
                    est = geometric_median(buckets)
                else:
                    est = coordinate_median_of_means(buckets)
            row["error"] = float(np.linalg.norm(est - truth.mean))
        except InsufficientSamples:
            row["status"] = "insufficient_samples"
        except DegenerateData:
            row["status"] = "degenerate_data"
        except RobustMeanError as exc:
            row["status"] = f"error:{type(exc).__name__}"
        row["wall_time"] = time.perf_counter() - started
        rows.append(row)
    return rows


def _summaries(plan: BenchmarkPlan, rows: list[dict]) -> list[dict]:
    out = []
    for scenario in plan.scenarios:
        for name in scenario.estimators:
            cell = [r for r in rows if r["scenario"] == scenario.id and r["estimator"] == name]
            errs = np.array([r["error"] for r in cell if r["status"] == "ok"], dtype=np.float64)
            summary = {"scenario": scenario.id, "estimator": name, "trials": len(cell),
                       "failures": len(cell) - len(errs)}
            if len(errs):
                q25, med, q75, q90 = np.quantile(errs, [0.25, 0.5, 0.75, 0.9])
                summary.update(median=float(med), q25=float(q25), q75=float(q75), q90=float(q90),
                               mean=float(errs.mean()))
            else:
                summary.update(median="", q25="", q75="", q90="", mean="")
            out.append(summary)
    return out


@dataclass
class BenchmarkResult:
    rows: list
    summary: list

    def median_error(self, scenario: str, estimator: str) -> float:
        for s in self.summary:
            if s["scenario"] == scenario and s["estimator"] == estimator:
                return s["median"]
        raise KeyError((scenario, estimator))

    def results_csv(self) -> str:
        return _to_csv(self.rows, CSV_FIELDS)

    def summary_csv(self) -> str:
        return _to_csv(self.summary, SUMMARY_FIELDS)

    def to_json(self) -> dict:
        return {"rows": self.rows, "summary": self.summary}

    def write(self, output_dir) -> None:
        out = Path(output_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "results.csv").write_text(self.results_csv(), newline="")
        (out / "summary.csv").write_text(self.summary_csv(), newline="")
        (out / "results.json").write_text(json.dumps(self.to_json(), indent=2) + "\n")


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _to_csv(rows: list[dict], fields) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(fields)
    for row in rows:
        writer.writerow([_fmt(row.get(f, "")) for f in fields])
    return buf.getvalue()


def run_benchmark(plan: BenchmarkPlan, *, workers: int = 1) -> BenchmarkResult:
    """Run every (scenario, trial, estimator) cell; failures become rows, never exceptions."""
    jobs = [(plan.seed, s_idx, scenario, trial)
            for s_idx, scenario in enumerate(plan.scenarios)
            for trial in range(scenario.trials)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            batches = list(pool.map(_run_trial, jobs))
    else:
        batches = [_run_trial(job) for job in jobs]
    order = {s.id: i for i, s in enumerate(plan.scenarios)}
    rows = [row for batch in batches for row in batch]
    est_order = {name: i for i, name in enumerate(ESTIMATORS)}
    rows.sort(key=lambda r: (order[r["scenario"]], r["trial"], est_order[r["estimator"]]))
    log.info("benchmark finished: %d rows", len(rows))
    return BenchmarkResult(rows, _summaries(plan, rows))
