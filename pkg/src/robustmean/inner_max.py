"""Approximate inner maximization: MWU with KL projections, Gaussian rounding,
margin search, and the distance / gradient estimators built on them.

Margins here are two-sided: a bucket satisfies direction ``w`` at margin
``m`` when ``|<Z'_i, w>| >= m``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .core import BucketMeans, EstimatorConfig
from .errors import InvalidInput, NoMargin, ZeroMatrix
from .pruning import center_and_scale
from .simplex_projection import _project, kl_divergence
from .spectral import SpanProjection, _power, project_to_span

DEFAULT_CONFIG = EstimatorConfig()


@dataclass(frozen=True)
class MarginCertificate:
    """A unit direction and how many rows clear ``margin_fraction * margin_theta`` on it."""

    direction: np.ndarray
    margin_theta: float
    satisfied_count: int
    total: int
    margin_fraction: float = 0.1

    @classmethod
    def from_direction(cls, rows: np.ndarray, direction, theta: float,
                       margin_fraction: float = 0.1) -> "MarginCertificate":
        direction = np.asarray(direction, dtype=np.float64)
        count = count_satisfied(rows, direction, theta * margin_fraction)
        return cls(direction, float(theta), count, rows.shape[0], margin_fraction)

    @property
    def threshold(self) -> float:
        return self.margin_theta * self.margin_fraction

    def recount(self, rows: np.ndarray) -> int:
        return count_satisfied(rows, self.direction, self.threshold)

    def to_dict(self) -> dict:
        return {
            "direction": [float(v) for v in self.direction],
            "margin_theta": self.margin_theta,
            "threshold": self.threshold,
            "satisfied_count": int(self.satisfied_count),
            "total": int(self.total),
        }


def count_satisfied(rows: np.ndarray, direction: np.ndarray, threshold: float) -> int:
    return int(np.count_nonzero(np.abs(rows @ direction) >= threshold))


@dataclass
class MWUTrace:
    """Everything produced by the MWU phase of ApproxBregman.

    ``weights[t]`` is the distribution used at iteration ``t`` (before its update),
    ``losses[t]`` the squared margins ``sigma_t**2``.
    """

    directions: np.ndarray
    weights: np.ndarray
    losses: np.ndarray
    values: np.ndarray
    progress: np.ndarray
    cap: float = 1.0

    @property
    def T(self) -> int:
        return self.directions.shape[0]


def _scaled_rows(Z) -> np.ndarray:
    rows = Z.means if isinstance(Z, BucketMeans) else np.asarray(Z, dtype=np.float64)
    if rows.ndim != 2 or rows.shape[0] < 1:
        raise InvalidInput("expected a nonempty k' x d matrix")
    return rows


def run_mwu(Z, theta: float, T: int, seed=None, config: EstimatorConfig = DEFAULT_CONFIG) -> MWUTrace:
    """MWU iterations of ApproxBregman: power step, squared margins, reweight, project.

    Weights are only updated when ``||A_t w_t||^2 >= mwu_progress_factor * theta**2``.
    """
    rows = _scaled_rows(Z)
    if not 0 < theta <= 1:
        raise InvalidInput("theta must lie in (0, 1]")
    if T < 1:
        raise InvalidInput("T must be positive")
    if not np.any(rows):
        raise ZeroMatrix("every row is zero")
    rng = np.random.default_rng(seed)
    k, d = rows.shape
    cap = config.smooth_cap(k)
    power_iters = config.power_iterations(d)
    threshold = config.mwu_progress_factor * theta * theta

    directions = np.empty((T, d))
    weights = np.empty((T, k))
    losses = np.empty((T, k))
    values = np.empty(T)
    progress = np.zeros(T, dtype=bool)
    tau = np.full(k, 1.0 / k)
    for t in range(T):
        w, value = _power(rows, tau, power_iters, rng)
        sigma2 = np.minimum((rows @ w) ** 2, 1.0)
        directions[t] = w
        weights[t] = tau
        losses[t] = sigma2
        values[t] = value
        if value >= threshold:
            progress[t] = True
            tau = tau * (1.0 - 0.5 * sigma2)
            tau /= tau.sum()
            tau = _project(tau, cap)
    return MWUTrace(directions, weights, losses, values, progress, cap)


def round_vectors(Z, directions, theta: float, max_trials: int, seed=None, *,
                  accept_fraction: float = 0.6, margin_fraction: float = 0.1) -> Optional[MarginCertificate]:
    """Gaussian rounding of ``directions`` into one unit vector.

    Each trial draws ``g ~ N(0, I_T)`` and tests ``w = normalize(sum_t g_t w_t)``;
    the first ``w`` with at least ``accept_fraction * k'`` rows at
    ``|<Z'_i, w>| >= margin_fraction * theta`` is returned. ``None`` means FAIL.
    """
    rows = _scaled_rows(Z)
    W = np.atleast_2d(np.asarray(directions, dtype=np.float64))
    if W.shape[0] < 1 or W.shape[1] != rows.shape[1]:
        raise InvalidInput("directions must be a nonempty list of length-d vectors")
    if max_trials < 1:
        raise InvalidInput("max_trials must be positive")
    rng = np.random.default_rng(seed)
    k = rows.shape[0]
    threshold = margin_fraction * theta
    needed = accept_fraction * k
    for _ in range(max_trials):
        combo = rng.standard_normal(W.shape[0]) @ W
        norm = np.linalg.norm(combo)
        if norm == 0.0:
            continue
        w = combo / norm
        count = count_satisfied(rows, w, threshold)
        if count >= needed:
            return MarginCertificate(w, float(theta), count, k, margin_fraction)
    return None


def approx_bregman(Z, theta: float, T: int, seed=None, config: EstimatorConfig = DEFAULT_CONFIG,
                   *, max_round_trials: Optional[int] = None) -> Optional[MarginCertificate]:
    """ApproxBregman: ``T`` MWU rounds followed by rounding. Returns ``None`` on FAIL."""
    rng = np.random.default_rng(seed)
    trace = run_mwu(Z, theta, T, rng, config)
    rows = _scaled_rows(Z)
    if max_round_trials is None:
        max_round_trials = config.round_trials(rows.shape[1])
    return round_vectors(rows, trace.directions, theta, max_round_trials, rng,
                         accept_fraction=config.round_accept_fraction,
                         margin_fraction=config.margin_fraction)


def margin_grid(steps: int) -> list[float]:
    return [2.0 ** -j for j in range(steps + 1)]


def search_margin(Z, config: EstimatorConfig = DEFAULT_CONFIG, seed=None,
                  *, max_round_trials: Optional[int] = None) -> tuple[float, MarginCertificate]:
    """Largest margin on the descending grid ``2**-j`` at which ApproxBregman succeeds.

    After the first success at ``2**-j`` (``j > 0``), up to ``margin_refine_probes``
    bisection probes between it and the failed ``2**-(j-1)`` tighten the value.
    Raises ``NoMargin`` when the whole grid fails.
    """
    rows = _scaled_rows(Z)
    rng = np.random.default_rng(seed)
    k = rows.shape[0]

    def attempt(theta):
        T = config.inner_iterations(k, theta)
        return approx_bregman(rows, theta, T, rng, config, max_round_trials=max_round_trials)

    for j, theta in enumerate(margin_grid(config.margin_search_steps)):
        cert = attempt(theta)
        if cert is None:
            continue
        if j > 0:
            lo, hi = theta, 2.0 * theta
            for _ in range(config.margin_refine_probes):
                mid = 0.5 * (lo + hi)
                probe = attempt(mid)
                if probe is None:
                    hi = mid
                else:
                    lo, cert = mid, probe
            theta = lo
        return theta, cert
    raise NoMargin(f"no margin in the grid down to 2**-{config.margin_search_steps}")


@dataclass
class StepEstimate:
    """Distance and gradient estimate at one iterate."""

    distance: float
    gradient: np.ndarray
    theta: float
    scale: float
    failed: bool = False
    certificate: Optional[MarginCertificate] = field(default=None, repr=False)


def _prepare(Z: BucketMeans, x) -> tuple[BucketMeans, SpanProjection]:
    if not isinstance(Z, BucketMeans):
        Z = BucketMeans(Z)
    scaled = center_and_scale(Z, x)
    return scaled, project_to_span(scaled)


def _oriented(rows: np.ndarray, cert: MarginCertificate, theta: float, fraction: float,
              margin_fraction: float) -> np.ndarray:
    w = cert.direction
    positive = np.count_nonzero(rows @ w >= margin_fraction * theta)
    return w if positive >= fraction * rows.shape[0] else -w


def step_estimate(Z: BucketMeans, x, config: EstimatorConfig = DEFAULT_CONFIG, seed=None) -> StepEstimate:
    """DistEst and GradEst from a single margin search at ``x``."""
    scaled, span = _prepare(Z, x)
    rows = span.means.means
    B = float(scaled.scale)
    d = scaled.d
    try:
        theta, cert = search_margin(rows, config, seed, max_round_trials=config.round_trials(d))
    except NoMargin:
        theta_min = 2.0 ** -config.margin_search_steps
        fallback = np.zeros(d)
        fallback[0] = 1.0
        return StepEstimate(B * theta_min / 10.0, fallback, theta_min, B, failed=True)
    g = span.lift(_oriented(rows, cert, theta, config.grad_sign_fraction, config.margin_fraction))
    g /= np.linalg.norm(g)
    return StepEstimate(B * theta / 10.0, g, theta, B, failed=False, certificate=cert)


def dist_est(Z: BucketMeans, x, config: EstimatorConfig = DEFAULT_CONFIG, seed=None) -> float:
    """``B * theta / 10`` for the largest certified margin ``theta`` of the scaled data."""
    return step_estimate(Z, x, config, seed).distance


def grad_est(Z: BucketMeans, x, config: EstimatorConfig = DEFAULT_CONFIG, seed=None) -> np.ndarray:
    """Certified direction, flipped so that at least half the rows lie on its positive side.

    Falls back to ``e_1`` when no margin is found.
    """
    return step_estimate(Z, x, config, seed).gradient


def planted_instance(k: int, d: int, theta: float, seed=None, *, planted_fraction: float = 0.8):
    """Rows of norm at most 1: ``planted_fraction * k`` with ``|<Z_i, w*>| >= theta``,
    the rest orthogonal to ``w*``. Returns ``(rows, w_star, planted_mask)``."""
    rng = np.random.default_rng(seed)
    w_star = rng.standard_normal(d)
    w_star /= np.linalg.norm(w_star)
    n_planted = int(round(planted_fraction * k))
    rows = np.empty((k, d))
    for i in range(k):
        noise = rng.standard_normal(d)
        noise -= (noise @ w_star) * w_star
        noise /= np.linalg.norm(noise)
        if i < n_planted:
            along = rng.uniform(theta, 1.0) * rng.choice((-1.0, 1.0))
            perp = rng.uniform(0.0, math.sqrt(max(0.0, 1.0 - along * along)))
            rows[i] = along * w_star + perp * noise
        else:
            rows[i] = rng.uniform(0.0, 1.0) * noise
    order = rng.permutation(k)
    mask = np.zeros(k, dtype=bool)
    mask[:n_planted] = True
    return rows[order], w_star, mask[order]


def regret_gap(trace: MWUTrace, p: Sequence[float]) -> float:
    """``1.5 * sum <p, loss> + 2 KL(p || tau_1) - sum <tau_t, loss>`` over updating rounds.

    Nonnegative whenever the MWU-with-projection regret bound holds.
    """
    p = np.asarray(p, dtype=np.float64)
    sel = trace.progress
    learner = float(np.sum(trace.weights[sel] * trace.losses[sel]))
    comparator = float(np.sum(trace.losses[sel] @ p))
    return 1.5 * comparator + 2.0 * kl_divergence(p, trace.weights[0]) - learner
