"""Grouping samples into buckets and the coordinate-wise median-of-means."""

from __future__ import annotations

import numpy as np

from .core import BucketMeans, DataSet
from .errors import InvalidInput


def bucket_means(data: DataSet, group_count: int, seed=None, *, shuffle: bool = True) -> BucketMeans:
    """Average ``group_count`` disjoint groups of ``n // group_count`` rows.

    Rows are randomly permuted first (unless ``shuffle`` is false); the
    ``n % group_count`` surplus rows are dropped.
    """
    n = data.n
    if group_count < 1 or group_count > n:
        raise InvalidInput(f"group_count must lie in [1, n={n}], got {group_count}")
    size = n // group_count
    if shuffle:
        order = np.random.default_rng(seed).permutation(n)
    else:
        order = np.arange(n)
    groups = order[: group_count * size].reshape(group_count, size)
    means = data.samples[groups].mean(axis=1)
    return BucketMeans(means, source_rows=groups)


def coordinate_median_of_means(means: BucketMeans) -> np.ndarray:
    """Per-coordinate median of the bucket means (midpoint rule for even counts)."""
    return np.median(means.means, axis=0)
