"""Reference estimators: empirical mean and geometric median of bucket means."""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from .core import BucketMeans, DataSet


def empirical_mean(data: DataSet) -> np.ndarray:
    """Column averages with compensated (fsum) accumulation."""
    X = data.samples if isinstance(data, DataSet) else np.atleast_2d(np.asarray(data, dtype=np.float64))
    n = X.shape[0]
    return np.array([math.fsum(col) / n for col in X.T])


class WeiszfeldResult(NamedTuple):
    point: np.ndarray
    objective: float
    iterations: int
    converged: bool


def sum_of_distances(points: np.ndarray, y: np.ndarray) -> float:
    return float(np.linalg.norm(points - y, axis=1).sum())


def weiszfeld(means, tolerance: float = 1e-10, max_iter: int = 1000) -> WeiszfeldResult:
    """Weiszfeld iteration from the coordinate-wise median, with the Vardi-Zhang
    correction so an iterate sitting on a data point can still leave it.

    Stops when the relative decrease of the objective falls below ``tolerance``;
    the best iterate seen is returned.
    """
    Z = means.means if isinstance(means, BucketMeans) else np.atleast_2d(np.asarray(means, dtype=np.float64))
    y = np.median(Z, axis=0)
    if Z.shape[0] == 1:
        return WeiszfeldResult(Z[0].copy(), 0.0, 0, True)
    best_y, best_obj = y, sum_of_distances(Z, y)
    eps = 1e-12 * max(float(np.abs(Z - y).max()), 1.0)
    for it in range(1, max_iter + 1):
        dist = np.linalg.norm(Z - y, axis=1)
        far = dist > eps
        if not np.any(far):
            return WeiszfeldResult(best_y, best_obj, it, True)
        inv = 1.0 / dist[far]
        target = (inv @ Z[far]) / inv.sum()
        ties = Z.shape[0] - int(far.sum())
        if ties:
            pull = np.linalg.norm(inv @ (Z[far] - y))
            # stay put when the coincident points outweigh the pull of the rest
            mix = min(1.0, ties / pull) if pull > 0 else 1.0
            y = (1.0 - mix) * target + mix * y
        else:
            y = target
        obj = sum_of_distances(Z, y)
        improved = best_obj - obj
        if obj < best_obj:
            best_y, best_obj = y, obj
        if improved <= tolerance * (1.0 + best_obj):
            return WeiszfeldResult(best_y, best_obj, it, True)
    return WeiszfeldResult(best_y, best_obj, max_iter, False)


def geometric_median(means, tolerance: float = 1e-10, max_iter: int = 1000) -> np.ndarray:
    return weiszfeld(means, tolerance, max_iter).point
