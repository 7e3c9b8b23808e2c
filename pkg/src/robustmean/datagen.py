"""Synthetic heavy-tailed and contaminated datasets with known ground truth.

All families are sampled coordinate-wise independently, so the covariance is
``variance * I`` and both its trace and operator norm are known in closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .core import DataSet
from .errors import InvalidInput

FAMILIES = ("gaussian", "student_t", "pareto_symmetrized", "lognormal_centered")
PLACEMENTS = ("cluster_at_distance", "coordinate_spike")


@dataclass(frozen=True)
class DistributionSpec:
    family: str
    true_mean: tuple
    scale: float = 1.0
    tail_parameter: float = 0.0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise InvalidInput(f"unknown family {self.family!r}; choose from {FAMILIES}")
        object.__setattr__(self, "true_mean", tuple(float(v) for v in self.true_mean))
        if len(self.true_mean) < 1:
            raise InvalidInput("true_mean must have at least one coordinate")
        if not (self.scale >= 0 and math.isfinite(self.scale)):
            raise InvalidInput("scale must be a finite nonnegative number")
        if self.family in ("student_t", "pareto_symmetrized") and not self.tail_parameter > 2:
            raise InvalidInput(f"{self.family} needs tail_parameter > 2 for a finite covariance")

    @property
    def d(self) -> int:
        return len(self.true_mean)

    def coordinate_variance(self) -> float:
        """Variance of a single coordinate."""
        s2 = self.scale**2
        if self.family == "gaussian":
            return s2
        if self.family == "student_t":
            nu = self.tail_parameter
            return s2 * nu / (nu - 2)
        if self.family == "pareto_symmetrized":
            a = self.tail_parameter
            return s2 * a / (a - 2)
        # lognormal with unit log-scale, shifted by exp(1/2) to mean zero
        return s2 * (math.e - 1.0) * math.e


@dataclass(frozen=True)
class GroundTruth:
    mean: np.ndarray
    sigma_trace: float
    sigma_opnorm: float

    def to_dict(self) -> dict:
        return {
            "mean": [float(v) for v in self.mean],
            "sigma_trace": self.sigma_trace,
            "sigma_opnorm": self.sigma_opnorm,
        }


@dataclass(frozen=True)
class ContaminationSpec:
    """Replace ``count`` rows by adversarial points.

    ``cluster_at_distance`` puts every replaced row at ``center + radius * direction``
    (direction defaults to the normalized all-ones vector). ``coordinate_spike``
    puts them at ``center + radius * e_coordinate``. ``center`` defaults to the origin.
    """

    count: int = 0
    placement: str = "cluster_at_distance"
    radius: float = 1.0
    center: Optional[tuple] = None
    direction: Optional[tuple] = None
    coordinate: int = 0

    def __post_init__(self):
        if self.count < 0 or int(self.count) != self.count:
            raise InvalidInput("contamination count must be a nonnegative integer")
        if self.placement not in PLACEMENTS:
            raise InvalidInput(f"unknown placement {self.placement!r}; choose from {PLACEMENTS}")
        if not (self.radius > 0 and math.isfinite(self.radius)):
            raise InvalidInput("contamination radius must be positive")


def _standard_draws(family: str, tail: float, rng: np.random.Generator, shape) -> np.ndarray:
    if family == "gaussian":
        return rng.standard_normal(shape)
    if family == "student_t":
        return rng.standard_t(tail, size=shape)
    if family == "pareto_symmetrized":
        # classic Pareto with x_m = 1, random sign
        magnitude = 1.0 + rng.pareto(tail, size=shape)
        sign = np.where(rng.random(shape) < 0.5, -1.0, 1.0)
        return sign * magnitude
    return np.exp(rng.standard_normal(shape)) - math.exp(0.5)


def sample_dataset(spec: DistributionSpec, n: int, seed) -> tuple[DataSet, GroundTruth]:
    """Draw ``n`` i.i.d. rows; deterministic given ``seed``."""
    if n < 1:
        raise InvalidInput("n must be positive")
    rng = np.random.default_rng(seed)
    mean = np.asarray(spec.true_mean, dtype=np.float64)
    noise = _standard_draws(spec.family, spec.tail_parameter, rng, (n, spec.d))
    samples = mean + spec.scale * noise
    var = spec.coordinate_variance()
    truth = GroundTruth(mean=mean, sigma_trace=spec.d * var, sigma_opnorm=var)
    return DataSet(samples), truth


def contaminate(data: DataSet, spec: ContaminationSpec, seed) -> tuple[DataSet, np.ndarray]:
    """Replace ``spec.count`` randomly chosen rows; returns the new data and the sorted row indices."""
    if spec.count > data.n:
        raise InvalidInput(f"cannot contaminate {spec.count} of {data.n} rows")
    if spec.count == 0:
        return data, np.zeros(0, dtype=np.intp)
    rng = np.random.default_rng(seed)
    d = data.d
    rows = np.sort(rng.choice(data.n, size=spec.count, replace=False))
    center = np.zeros(d) if spec.center is None else np.asarray(spec.center, dtype=np.float64)
    if center.shape != (d,):
        raise InvalidInput("contamination center has the wrong dimension")
    if spec.placement == "cluster_at_distance":
        if spec.direction is None:
            u = np.ones(d) / math.sqrt(d)
        else:
            u = np.asarray(spec.direction, dtype=np.float64)
            if u.shape != (d,) or not np.linalg.norm(u) > 0:
                raise InvalidInput("contamination direction must be a nonzero vector of length d")
            u = u / np.linalg.norm(u)
        point = center + spec.radius * u
    else:
        if not 0 <= spec.coordinate < d:
            raise InvalidInput("spike coordinate out of range")
        point = center.copy()
        point[spec.coordinate] += spec.radius
    samples = np.array(data.samples)
    samples[rows] = point
    return DataSet(samples), rows


def derive_seed(global_seed: int, *keys: int) -> np.random.SeedSequence:
    """Per-trial seed: ``SeedSequence(global_seed, spawn_key=keys)``.

    Distinct key tuples give statistically independent streams and the mapping
    is stable across runs and platforms.
    """
    return np.random.SeedSequence(int(global_seed), spawn_key=tuple(int(k) for k in keys))


def mean_vector(value, d: int) -> tuple:
    """Broadcast a scalar or sequence to a length-``d`` mean."""
    if isinstance(value, (int, float)):
        return (float(value),) * d
    vals: Sequence[float] = tuple(float(v) for v in value)
    if len(vals) != d:
        raise InvalidInput(f"mean has length {len(vals)}, expected {d}")
    return vals
