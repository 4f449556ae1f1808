"""Minimum distance index and diagonality diagnostics."""

from __future__ import annotations

import itertools

import numpy as np
from scipy.optimize import linear_sum_assignment

EXHAUSTIVE_MAX_P = 8


def _best_assignment(score: np.ndarray) -> np.ndarray:
    """Row index assigned to each column maximizing the summed score."""
    p = score.shape[0]
    if p <= EXHAUSTIVE_MAX_P:
        cols = np.arange(p)
        best = max(itertools.permutations(range(p)), key=lambda perm: score[list(perm), cols].sum())
        return np.array(best)
    rows, cols = linear_sum_assignment(score, maximize=True)
    return rows[np.argsort(cols)]


def mdi(gain) -> float:
    """Minimum distance index of a gain matrix ``G = W_hat A``.

    Distance of ``G`` from the set of generalized permutation matrices,
    normalized to ``[0, 1]``. With the optimal per-row scale the infimum
    over ``J`` reduces to ``p - max_sigma sum_i g2[sigma(i), i]`` where
    ``g2`` holds the row-normalized squared entries of ``G``.
    """
    g = np.asarray(gain, dtype=float)
    if g.ndim != 2 or g.shape[0] != g.shape[1]:
        raise ValueError(f"gain matrix must be square, got shape {g.shape}")
    p = g.shape[0]
    if p < 2:
        raise ValueError("MDI needs p >= 2")
    if not np.all(np.isfinite(g)):
        raise ValueError("gain matrix has non-finite entries")
    sq = g * g
    norms = sq.sum(axis=1)
    if np.any(norms == 0):
        raise ValueError(f"gain matrix row {int(np.flatnonzero(norms == 0)[0])} is all zero")
    perm = _best_assignment(sq / norms[:, None])
    # residual summed from the unassigned entries directly, avoiding p - (p - eps) cancellation
    cols = np.arange(p)
    masked = sq[perm].copy()
    masked[cols, cols] = 0.0
    residual = float(np.sum(masked.sum(axis=1) / norms[perm]))
    return float(np.sqrt(residual / (p - 1)))


def offdiag_fraction(m) -> float:
    """``||off(M)||_F / ||M||_F``; 0 for the zero matrix."""
    m = np.asarray(m, dtype=float)
    total = np.linalg.norm(m)
    if total == 0:
        return 0.0
    off = m - np.diag(np.diag(m))
    return float(np.linalg.norm(off) / total)
