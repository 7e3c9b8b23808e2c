"""Bicriteria solver for the furthest hyperplane problem.

Unprojected MWU over the ``k`` margin constraints, followed by the same
Gaussian rounding used by ApproxBregman.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import NORM_SLACK
from .errors import InvalidInput, ZeroMatrix
from .inner_max import MarginCertificate, round_vectors
from .spectral import _power


@dataclass
class FHPTrace:
    directions: np.ndarray
    weights: np.ndarray
    losses: np.ndarray


def fhp_iterations(k: int, r: float, constant: float = 10.0) -> int:
    return max(1, math.ceil(constant * math.log(max(k, 2)) / r**2))


def fhp_mwu(Z, T: int, eta_mwu: float = 1.0 / 3.0, seed=None, *, power_iters: Optional[int] = None) -> FHPTrace:
    """``T`` rounds of top-singular-vector steps with weights ``tau * (1 - eta * sigma**2)``."""
    rows = np.atleast_2d(np.asarray(Z, dtype=np.float64))
    k, d = rows.shape
    if not 0 < eta_mwu < 1:
        raise InvalidInput("eta_mwu must lie in (0, 1)")
    if np.linalg.norm(rows, axis=1).max() > 1.0 + NORM_SLACK:
        raise InvalidInput("FHP rows must have norm at most 1")
    if not np.any(rows):
        raise ZeroMatrix("every row is zero")
    rng = np.random.default_rng(seed)
    if power_iters is None:
        power_iters = max(1, math.ceil(8.0 * math.log(d + 2)))
    directions = np.empty((T, d))
    weights = np.empty((T, k))
    losses = np.empty((T, k))
    tau = np.full(k, 1.0 / k)
    for t in range(T):
        w, _ = _power(rows, tau, power_iters, rng)
        sigma2 = np.minimum((rows @ w) ** 2, 1.0)
        directions[t], weights[t], losses[t] = w, tau, sigma2
        tau = tau * (1.0 - eta_mwu * sigma2)
        tau /= tau.sum()
    return FHPTrace(directions, weights, losses)


def fhp_solve(Z, r: float, eta_mwu: float = 1.0 / 3.0, T: Optional[int] = None,
              max_round_trials: int = 200, seed=None, *, alpha: float = 0.1,
              iter_constant: float = 10.0) -> Optional[MarginCertificate]:
    """Find ``w`` with ``|<Z_i, w>| >= alpha * r`` for at least ``(1 - 3 alpha) k`` rows.

    Returns ``None`` (FAIL) when rounding exhausts ``max_round_trials``.
    ``T`` defaults to ``ceil(iter_constant * ln k / r**2)``.
    """
    rows = np.atleast_2d(np.asarray(Z, dtype=np.float64))
    if not r > 0:
        raise InvalidInput("margin r must be positive")
    k = rows.shape[0]
    if T is None:
        T = fhp_iterations(k, r, iter_constant)
    rng = np.random.default_rng(seed)
    trace = fhp_mwu(rows, T, eta_mwu, rng)
    # certificate margin_theta is r, threshold alpha * r
    return round_vectors(rows, trace.directions, r, max_round_trials, rng,
                         accept_fraction=1.0 - 3.0 * alpha, margin_fraction=alpha)


def fhp_regret_slack(trace: FHPTrace, eta_mwu: float) -> np.ndarray:
    """Per-expert ``ln k / eta - (sum <tau_t, loss_t> - (1 + eta) sum loss_t[i])``; nonnegative when the bound holds."""
    learner = float(np.sum(trace.weights * trace.losses))
    per_expert = trace.losses.sum(axis=0)
    k = trace.weights.shape[1]
    return math.log(k) / eta_mwu - (learner - (1.0 + eta_mwu) * per_expert)
