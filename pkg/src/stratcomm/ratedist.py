"""Rate-distortion function under Hamming distortion via Blahut-Arimoto."""

from __future__ import annotations

import numpy as np

from .core import Distribution, as_fraction, entropy

SLOPE_MAX = 64.0
MAX_ITER = 5 * 10**4


class ConvergenceError(RuntimeError):
    pass


def _ba_fixed_slope(p: np.ndarray, dist: np.ndarray, beta: float, tol: float):
    """Blahut-Arimoto at slope ``beta`` (bits per unit distortion).

    Returns ``(D, R, gap)``; ``gap`` bounds the rate error and exceeds ``tol``
    only when the iteration cap was hit (slow convergence near a slope where
    an output symbol leaves the support).
    """
    m = dist.shape[1]
    qy = np.full(m, 1.0 / m)
    a = np.exp2(-beta * dist)
    for _ in range(MAX_ITER):
        z = a @ qy
        c = (p / z) @ a
        qy = qy * c
        support = qy > 0
        logc = np.log2(c[support])
        upper = float(np.max(logc))
        lower = float(np.dot(qy[support], logc))
        if upper - lower < tol:
            break
    qy /= qy.sum()
    z = a @ qy
    cond = a * qy[None, :] / z[:, None]
    d = float(np.sum(p[:, None] * cond * dist))
    r = -beta * d - float(np.dot(p, np.log2(z)))
    return d, max(r, 0.0), upper - lower


def rd_blahut_arimoto(p: Distribution, d, tol: float = 1e-9) -> float:
    """R(d) in bits for Hamming distortion, bisecting on the slope."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    d = as_fraction(d)
    if not 0 <= d <= 1:
        raise ValueError(f"distortion must lie in [0, 1], got {d}")
    probs = np.array([float(x) for x in p.probs])
    keep = probs > 0
    probs = probs[keep]
    if d == 0:
        return entropy(probs)
    if d >= 1 - max(p.probs):
        return 0.0
    q = p.q
    dist = 1.0 - np.eye(q)
    dist = dist[keep]
    target = float(d)
    inner = tol / 10
    lo, hi = 0.0, SLOPE_MAX
    d_hi, r_hi, g_hi = _ba_fixed_slope(probs, dist, hi, inner)
    if d_hi > target:
        raise ConvergenceError(f"slope range [0, {SLOPE_MAX}] cannot reach distortion {d}")
    best = (hi, d_hi, r_hi, g_hi)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        dm, rm, gm = _ba_fixed_slope(probs, dist, mid, inner)
        best = (mid, dm, rm, gm)
        # the supporting-line error is about R''/2 * (dm - target)**2 and R'' <= 1.5/d
        if (dm - target) ** 2 < inner * target:
            break
        if dm > target:
            lo = mid
        else:
            hi = mid
    beta, dm, rm, gap = best
    if gap > tol:
        raise ConvergenceError(f"Blahut-Arimoto did not converge at slope {beta} (gap {gap:.3g})")
    # move along the supporting line of slope -beta to the requested distortion
    return max(rm - beta * (target - dm), 0.0)
