"""Outer descent loop and the end-to-end spectral mean estimator."""

from __future__ import annotations

import time
from typing import Callable, Optional

import numpy as np

from .bucketing import bucket_means, coordinate_median_of_means
from .core import (BucketMeans, DataSet, EstimateReport, EstimatorConfig, IterationRecord,
                   argmin_first, resolve_k)
from .errors import DegenerateData
from .inner_max import StepEstimate, step_estimate
from .pruning import prune

# (buckets, x_t, config, rng) -> StepEstimate
StepFn = Callable[[BucketMeans, np.ndarray, EstimatorConfig, np.random.Generator], StepEstimate]


def descent(Z: BucketMeans, x0, config: EstimatorConfig, seed=None,
            *, step: Optional[StepFn] = None) -> EstimateReport:
    """Run ``x_{t+1} = x_t + eta * d_t * g_t`` for ``T_des`` iterations and return
    the iterate with the smallest distance estimate.

    ``step`` supplies ``(d_t, g_t)``; the default is the spectral estimator.
    An iterate at which every bucket coincides is recorded with ``d_t = 0`` and
    ends the loop, as does ``d_t < early_stop_tol * (1 + ||x_t||)``.
    """
    step = step or step_estimate
    rng = np.random.default_rng(seed)
    x = np.array(x0, dtype=np.float64)
    T_des = config.descent_iterations(x.shape[0])
    records: list[IterationRecord] = []
    started = time.perf_counter()
    for t in range(T_des):
        try:
            est = step(Z, x, config, rng)
        except DegenerateData:
            records.append(IterationRecord(t, 0.0, np.zeros_like(x), 0.0, False, x.copy(), 0.0, True))
            break
        g = np.asarray(est.gradient, dtype=np.float64)
        records.append(IterationRecord(t, float(est.distance), g, float(est.theta), bool(est.failed),
                                       x.copy(), float(est.scale)))
        if est.distance < config.early_stop_tol * (1.0 + np.linalg.norm(x)):
            break
        x = x + config.eta * est.distance * g
    best = argmin_first(rec.d_t for rec in records)
    return EstimateReport(
        estimate=records[best].x_t.copy(),
        initial_guess=np.array(x0, dtype=np.float64),
        iterations=records,
        chosen_iteration=best,
        wall_times={"descent": time.perf_counter() - started},
        config=config,
        k_pruned=Z.k,
    )


def estimate_mean(data: DataSet, config: EstimatorConfig, seed=None) -> EstimateReport:
    """Spectral estimator: 2k buckets, median-of-means start from the second half,
    prune the first half around it, then descend on the pruned first half.

    ``seed`` defaults to ``config.rng_seed``.
    """
    if not isinstance(data, DataSet):
        data = DataSet(data)
    rng = np.random.default_rng(config.rng_seed if seed is None else seed)
    timings = {}
    t0 = time.perf_counter()
    k = resolve_k(config, data.n)
    buckets = bucket_means(data, 2 * k, rng)
    first, second = buckets.subset(np.arange(k)), buckets.subset(np.arange(k, 2 * k))
    timings["bucketing"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    x0 = coordinate_median_of_means(second)
    timings["initial_guess"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    pruned, removed = prune(first, x0, config.prune_fraction)
    timings["prune"] = time.perf_counter() - t0

    report = descent(pruned, x0, config, rng)
    report.wall_times = {**timings, **report.wall_times}
    report.k = k
    report.removed = [int(i) for i in removed]
    return report
