"""KL projection onto capped ("smooth") distributions and the MWU reweighting step."""

from __future__ import annotations

import numpy as np

from .errors import InfeasibleCap, InvalidInput


def kl_divergence(p, q) -> float:
    """``sum_i p_i log(p_i / q_i)`` with ``0 log 0 = 0``; ``inf`` if ``q`` misses support of ``p``."""
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    mask = p > 0
    if np.any(q[mask] <= 0):
        return float("inf")
    return float(np.sum(p[mask] * np.log(p[mask] / q[mask])))


def is_smooth(q, cap: float, atol: float = 1e-9) -> bool:
    q = np.asarray(q)
    return bool(np.all(q >= 0) and abs(q.sum() - 1.0) <= atol and q.max() <= cap + 1e-12)


def kl_project(p, cap: float) -> np.ndarray:
    """``argmin_q KL(p || q)`` over distributions with every entry at most ``cap``.

    The minimizer has the form ``q_i = min(p_i / lam, cap)``. Sorting ``p``
    in decreasing order, the saturated entries form a prefix; we scan prefix
    lengths until the implied ``lam`` is consistent. O(k' log k').
    """
    p = np.asarray(p, dtype=np.float64)
    k = p.shape[0]
    if np.any(p < 0) or abs(p.sum() - 1.0) > 1e-9:
        raise InvalidInput("p must be a probability vector")
    if cap * k < 1.0 - 1e-12:
        raise InfeasibleCap(f"cap {cap} too small for {k} entries")
    return _project(p, cap)


def _project(p: np.ndarray, cap: float) -> np.ndarray:
    k = p.shape[0]
    if p.max() <= cap:
        return p.copy()

    support = int(np.count_nonzero(p))
    if support * cap < 1.0:
        # every supported entry saturates; spread the remainder over the zeros
        q = np.where(p > 0, cap, (1.0 - support * cap) / (k - support))
        return q

    order = np.argsort(-p, kind="stable")
    sorted_p = p[order]
    # tail[m] = sum of sorted_p[m:]
    tail = np.concatenate((np.cumsum(sorted_p[::-1])[::-1], [0.0]))
    # smallest saturated-prefix length m whose implied lam keeps entry m below the cap
    ms = np.arange(1, support)
    rest = 1.0 - ms * cap
    ok = (rest > 0) & (sorted_p[ms] * rest <= cap * tail[ms])
    m = int(ms[np.argmax(ok)]) if np.any(ok) else support - 1
    lam = tail[m] / (1.0 - m * cap)
    q_sorted = np.minimum(sorted_p / lam, cap)
    q_sorted[:m] = cap
    q = np.empty(k)
    q[order] = q_sorted
    return q


def mwu_reweight(tau, sigma, progress: bool, cap: float) -> np.ndarray:
    """One ApproxBregman weight update.

    With ``progress`` set, multiply by ``1 - sigma**2 / 2``, renormalize and
    project onto the capped set; otherwise return ``tau`` unchanged.
    """
    tau = np.asarray(tau, dtype=np.float64)
    sigma = np.asarray(sigma, dtype=np.float64)
    if sigma.shape != tau.shape:
        raise InvalidInput("sigma and tau must have the same length")
    if np.any(sigma < 0) or np.any(sigma > 1):
        raise InvalidInput("sigma entries must lie in [0, 1]")
    if not progress:
        return tau.copy()
    updated = tau * (1.0 - 0.5 * sigma * sigma)
    updated /= updated.sum()
    if cap * updated.shape[0] < 1.0 - 1e-12:
        raise InfeasibleCap(f"cap {cap} too small for {updated.shape[0]} entries")
    return _project(updated, cap)
