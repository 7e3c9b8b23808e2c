"""One-off pruning of far bucket means and the per-iteration center/scale transform."""

from __future__ import annotations

import math

import numpy as np

from .core import BucketMeans
from .errors import DegenerateData, InvalidInput


def prune(means: BucketMeans, x0, prune_fraction: float = 0.1) -> tuple[BucketMeans, np.ndarray]:
    """Drop the ``ceil(prune_fraction * k)`` rows furthest from ``x0``.

    On distance ties the higher original index is removed first. Returns the
    kept rows in their original order and the sorted removed indices.
    """
    if not means.is_raw:
        raise InvalidInput("prune expects raw (unscaled) bucket means")
    if not 0 <= prune_fraction < 0.5:
        raise InvalidInput("prune_fraction must lie in [0, 1/2)")
    x0 = np.asarray(x0, dtype=np.float64)
    k = means.k
    n_remove = math.ceil(prune_fraction * k)
    if n_remove == 0:
        return means, np.zeros(0, dtype=np.intp)
    dist = _row_norms(means.means - x0)
    idx = np.arange(k)
    # lexsort: last key is primary -> descending distance, then descending index
    order = np.lexsort((-idx, -dist))
    removed = np.sort(order[:n_remove])
    keep = np.setdiff1d(idx, removed)
    return means.subset(keep), removed


def _row_norms(M: np.ndarray) -> np.ndarray:
    # rescale by the largest entry so tiny or huge rows neither underflow nor overflow
    peak = np.abs(M).max(axis=1)
    safe = np.where(peak > 0, peak, 1.0)
    return peak * np.linalg.norm(M / safe[:, None], axis=1)


def center_and_scale(means: BucketMeans, x) -> BucketMeans:
    """Map each row to ``(Z_i - x) / B`` with ``B = max_i ||Z_i - x||``."""
    if not means.is_raw:
        raise InvalidInput("center_and_scale expects raw bucket means")
    x = np.asarray(x, dtype=np.float64)
    shifted = means.means - x
    norms = _row_norms(shifted)
    B = float(norms.max())
    if B == 0.0:
        raise DegenerateData("all bucket means coincide with the centering point")
    scaled = shifted / B
    # guard against rounding pushing the extreme row a hair above 1
    top = np.linalg.norm(scaled, axis=1)
    over = top > 1.0
    if np.any(over):
        scaled[over] /= top[over, None]
    return BucketMeans(scaled, center=x, scale=B, source_rows=means.source_rows)
