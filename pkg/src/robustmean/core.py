"""Shared domain types, estimator configuration and the sub-gaussian radius."""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np

from .errors import InsufficientSamples, InvalidInput

# Slack allowed on row norms of a scaled bucket matrix.
NORM_SLACK = 1e-9


def _as_finite_matrix(values, name: str) -> np.ndarray:
    arr = np.array(values, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2:
        raise InvalidInput(f"{name} must be a 2-d array, got shape {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise InvalidInput(f"{name} must have at least one row and one column")
    if not np.all(np.isfinite(arr)):
        raise InvalidInput(f"{name} contains NaN or Inf")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class DataSet:
    """An ``n x d`` matrix of finite samples."""

    samples: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "samples", _as_finite_matrix(self.samples, "samples"))

    @property
    def n(self) -> int:
        return self.samples.shape[0]

    @property
    def d(self) -> int:
        return self.samples.shape[1]


@dataclass(frozen=True)
class BucketMeans:
    """Bucket (group) averages, optionally centered at ``center`` and divided by ``scale``.

    ``source_rows`` records which input rows were averaged into each bucket
    (one row of indices per bucket) when the means came from ``bucket_means``.
    """

    means: np.ndarray
    center: Optional[np.ndarray] = None
    scale: Optional[float] = None
    source_rows: Optional[np.ndarray] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "means", _as_finite_matrix(self.means, "means"))
        if self.center is not None:
            c = np.array(self.center, dtype=np.float64).reshape(-1)
            if c.shape[0] != self.means.shape[1]:
                raise InvalidInput("center length does not match dimension")
            c.setflags(write=False)
            object.__setattr__(self, "center", c)
        if self.scale is not None:
            if not self.scale > 0:
                raise InvalidInput("scale must be positive")
            norms = np.linalg.norm(self.means, axis=1)
            if norms.max() > 1.0 + NORM_SLACK:
                raise InvalidInput(f"scaled rows must have norm <= 1, got {norms.max()!r}")

    @property
    def k(self) -> int:
        return self.means.shape[0]

    @property
    def d(self) -> int:
        return self.means.shape[1]

    @property
    def is_raw(self) -> bool:
        return self.scale is None

    def subset(self, rows) -> "BucketMeans":
        rows = np.asarray(rows, dtype=np.intp)
        src = None if self.source_rows is None else self.source_rows[rows]
        return BucketMeans(self.means[rows], self.center, self.scale, src)


@dataclass(frozen=True)
class EstimatorConfig:
    """Every constant used by the spectral estimator.

    The iteration counts are ``T_des = ceil(descent_iter_constant * log2(d + 1))``,
    ``T = min(ceil(inner_iter_constant * ln(k' + 2) / theta**2), inner_iter_max)``,
    ``ceil(power_iter_constant * ln(d + 2))`` power steps and
    ``ceil(round_trial_constant * ln(max(T_des / delta, e)))`` rounding trials.
    """

    delta: float = 0.05
    k_override: Optional[int] = None
    bucket_constant: float = 3600.0
    eta: float = 1.0 / 8000.0
    prune_fraction: float = 0.1
    smooth_cap_numerator: float = 4.0
    mwu_progress_factor: float = 0.1
    descent_iter_constant: float = 4.0
    inner_iter_constant: float = 40.0
    inner_iter_max: int = 5000
    round_trial_constant: float = 10.0
    power_iter_constant: float = 8.0
    margin_search_steps: int = 20
    margin_refine_probes: int = 5
    margin_fraction: float = 0.1
    round_accept_fraction: float = 0.6
    certificate_fraction: float = 0.45
    grad_sign_fraction: float = 0.5
    early_stop_tol: float = 1e-12
    rng_seed: int = 0

    def __post_init__(self):
        if not (0.0 < self.delta <= 1.0):
            raise InvalidInput(f"delta must lie in (0, 1], got {self.delta!r}")
        if self.k_override is not None and (int(self.k_override) != self.k_override or self.k_override < 1):
            raise InvalidInput("k_override must be a positive integer")
        if not (0.0 <= self.prune_fraction < 0.5):
            raise InvalidInput("prune_fraction must lie in [0, 1/2)")
        positive = (
            "bucket_constant", "eta", "smooth_cap_numerator", "mwu_progress_factor",
            "descent_iter_constant", "inner_iter_constant", "inner_iter_max",
            "round_trial_constant", "power_iter_constant", "margin_fraction",
            "round_accept_fraction", "certificate_fraction", "grad_sign_fraction",
        )
        for name in positive:
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
                raise InvalidInput(f"{name} must be a positive finite number, got {value!r}")
        if self.margin_search_steps < 0 or self.margin_refine_probes < 0:
            raise InvalidInput("margin search step counts must be nonnegative")
        if not (0 <= int(self.rng_seed) < 2**64):
            raise InvalidInput("rng_seed must be a 64-bit unsigned integer")

    def replace(self, **changes) -> "EstimatorConfig":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict[str, Any]:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, values: dict[str, Any]) -> "EstimatorConfig":
        known = {f.name: f for f in dataclasses.fields(cls)}
        unknown = set(values) - set(known)
        if unknown:
            raise InvalidInput(f"unknown config fields: {sorted(unknown)}")
        return cls(**values)

    def descent_iterations(self, d: int) -> int:
        return max(1, math.ceil(self.descent_iter_constant * math.log2(d + 1)))

    def inner_iterations(self, k_prime: int, theta: float) -> int:
        t = math.ceil(self.inner_iter_constant * math.log(k_prime + 2) / theta**2)
        return int(max(1, min(t, self.inner_iter_max)))

    def power_iterations(self, d: int) -> int:
        return max(1, math.ceil(self.power_iter_constant * math.log(d + 2)))

    def round_trials(self, d: int) -> int:
        arg = max(self.descent_iterations(d) / self.delta, math.e)
        return max(1, math.ceil(self.round_trial_constant * math.log(arg)))

    def smooth_cap(self, k_prime: int) -> float:
        return min(1.0, self.smooth_cap_numerator / k_prime)


@dataclass(frozen=True)
class SubgaussianRadius:
    trace_term: float
    operator_term: float
    r_delta: float


def compute_r_delta(sigma_trace: float, sigma_opnorm: float, n: int, delta: float) -> SubgaussianRadius:
    """Return ``sqrt(Tr/n) + sqrt(||Sigma|| ln(1/delta) / n)`` and its two terms."""
    if not (0.0 < delta <= 1.0):
        raise InvalidInput(f"delta must lie in (0, 1], got {delta!r}")
    if n < 1:
        raise InvalidInput("n must be positive")
    if sigma_trace < 0 or sigma_opnorm < 0:
        raise InvalidInput("covariance summaries must be nonnegative")
    if sigma_opnorm > sigma_trace * (1 + 1e-12):
        raise InvalidInput("operator norm cannot exceed the trace of a PSD matrix")
    trace_term = math.sqrt(sigma_trace / n)
    operator_term = math.sqrt(sigma_opnorm * math.log(1.0 / delta) / n)
    return SubgaussianRadius(trace_term, operator_term, trace_term + operator_term)


def resolve_k(config: EstimatorConfig, n: int) -> int:
    """Number of buckets per half; the pipeline uses ``2k`` groups in total."""
    if config.k_override is not None:
        k = int(config.k_override)
    else:
        k = max(1, math.ceil(config.bucket_constant * math.log(1.0 / config.delta)))
    if 2 * k > n:
        raise InsufficientSamples(f"need 2k = {2 * k} samples but only n = {n} available")
    return k


@dataclass
class IterationRecord:
    t: int
    d_t: float
    g_t: np.ndarray
    margin_theta: float
    approx_bregman_failed: bool
    x_t: np.ndarray
    scale: float = 0.0
    degenerate: bool = False

    def to_dict(self) -> dict[str, Any]:
        return {
            "t": self.t,
            "d_t": float(self.d_t),
            "g_t": [float(v) for v in self.g_t],
            "margin_theta": float(self.margin_theta),
            "approx_bregman_failed": bool(self.approx_bregman_failed),
            "x_t": [float(v) for v in self.x_t],
            "scale": float(self.scale),
            "degenerate": bool(self.degenerate),
        }


@dataclass
class EstimateReport:
    estimate: np.ndarray
    initial_guess: np.ndarray
    iterations: list[IterationRecord]
    chosen_iteration: int
    wall_times: dict[str, float] = field(default_factory=dict)
    config: Optional[EstimatorConfig] = None
    k: Optional[int] = None
    k_pruned: Optional[int] = None
    removed: list[int] = field(default_factory=list)

    def to_dict(self) -> dict[str, Any]:
        return {
            "estimate": [float(v) for v in self.estimate],
            "initial_guess": [float(v) for v in self.initial_guess],
            "config": self.config.to_dict() if self.config is not None else {},
            "iterations": [rec.to_dict() for rec in self.iterations],
            "chosen_iteration": int(self.chosen_iteration),
            "timing": {key: float(v) for key, v in self.wall_times.items()},
            "k": self.k,
            "k_pruned": self.k_pruned,
            "removed": [int(i) for i in self.removed],
        }


def argmin_first(values) -> int:
    """Index of the first minimum."""
    values = list(values)
    best = 0
    for i, v in enumerate(values):
        if v < values[best]:
            best = i
    return best
