"""Power iteration for the top right singular vector of a row-weighted matrix."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import BucketMeans
from .errors import InvalidInput, ZeroMatrix


@dataclass(frozen=True)
class WeightedMatrixView:
    """Rows ``Z_i`` implicitly scaled by ``sqrt(weights[i])``."""

    rows: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        rows = np.asarray(self.rows, dtype=np.float64)
        w = np.asarray(self.weights, dtype=np.float64)
        if rows.ndim != 2 or w.shape != (rows.shape[0],):
            raise InvalidInput("weights must have one entry per row")
        if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-9:
            raise InvalidInput("weights must be a probability vector")
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "weights", w)


def rayleigh_value(rows: np.ndarray, weights: np.ndarray, w: np.ndarray) -> float:
    """``sum_i weights[i] * <rows[i], w>**2``, i.e. ``||A w||^2``."""
    proj = rows @ w
    return float(weights @ (proj * proj))


def _power(rows: np.ndarray, weights: np.ndarray, iterations: int, rng: np.random.Generator):
    dot = np.dot
    # A = diag(sqrt(w)) Z, formed once so each step is two matrix-vector products
    A = rows * np.sqrt(weights)[:, None]
    v = rng.standard_normal(rows.shape[1])
    v *= 1.0 / math.sqrt(dot(v, v))
    buf = np.empty(rows.shape[0])
    for _ in range(iterations):
        dot(A, v, out=buf)
        v = dot(buf, A)
        norm = math.sqrt(dot(v, v))
        if norm == 0.0:
            # start landed in the null space; redraw
            v = rng.standard_normal(rows.shape[1])
            norm = math.sqrt(dot(v, v))
        v *= 1.0 / norm
    return v, rayleigh_value(rows, weights, v)


def power_top_singular(view: WeightedMatrixView, iterations: Optional[int] = None, seed=None,
                       *, power_iter_constant: float = 8.0) -> tuple[np.ndarray, float]:
    """Approximate top right singular vector of ``diag(sqrt(w)) Z`` and ``||A w||^2``.

    Iterates ``v <- Z^T (w * (Z v))`` from a normalized Gaussian start; the
    Gram matrix is never formed. ``iterations`` defaults to
    ``ceil(power_iter_constant * ln(d + 2))``.
    """
    rows, weights = view.rows, view.weights
    active = (weights > 0) & np.any(rows != 0, axis=1)
    if not np.any(active):
        raise ZeroMatrix("every weighted row is zero")
    if iterations is None:
        iterations = max(1, int(np.ceil(power_iter_constant * np.log(rows.shape[1] + 2))))
    if iterations < 1:
        raise InvalidInput("iterations must be positive")
    return _power(rows, weights, int(iterations), np.random.default_rng(seed))


@dataclass(frozen=True)
class SpanProjection:
    """Row coordinates in an orthonormal basis of the row span.

    ``basis`` is ``d x r`` with orthonormal columns, or ``None`` for the identity.
    """

    means: BucketMeans
    basis: Optional[np.ndarray]

    def lift(self, v) -> np.ndarray:
        v = np.asarray(v, dtype=np.float64)
        return v.copy() if self.basis is None else self.basis @ v


def _row_span_basis(rows: np.ndarray, rel_tol: float) -> np.ndarray:
    # modified Gram-Schmidt, each candidate orthogonalized twice
    tol = rel_tol * np.linalg.norm(rows, axis=1).max()
    basis: list[np.ndarray] = []
    for row in rows:
        v = row.copy()
        for _ in range(2):
            for q in basis:
                v -= (q @ v) * q
        norm = np.linalg.norm(v)
        if norm > tol:
            basis.append(v / norm)
    if not basis:
        return np.zeros((rows.shape[1], 0))
    return np.column_stack(basis)


def project_to_span(means: BucketMeans, rank_tol: float = 1e-10) -> SpanProjection:
    """Express rows in the coordinates of their span when ``d > k'``; otherwise pass through."""
    if means.d <= means.k:
        return SpanProjection(means, None)
    basis = _row_span_basis(means.means, rank_tol)
    if basis.shape[1] == 0:
        # all-zero rows; keep one coordinate so downstream shapes stay valid
        basis = np.zeros((means.d, 1))
        basis[0, 0] = 1.0
    coords = means.means @ basis
    if means.scale is not None:
        # rounding can nudge a unit row just past 1
        norms = np.linalg.norm(coords, axis=1)
        over = norms > 1.0
        if np.any(over):
            coords[over] /= norms[over, None]
    projected = BucketMeans(coords, center=None, scale=means.scale, source_rows=means.source_rows)
    return SpanProjection(projected, basis)
