"""Log-ratio transforms for compositional data and moving-block variance maps.

Pivot coordinates of a composition ``x = (x_1, ..., x_m)`` are::

    z_j = sqrt((m - j) / (m - j + 1)) * log(x_j / gmean(x_{j+1}, ..., x_m)),   j = 1..m-1

For ``m = 3`` and ``x = (e, 1, 1)`` this gives ``z = (sqrt(2/3), 0)``; the
clr vector is ``(2/3, -1/3, -1/3)`` and ``clr @ V`` reproduces ``z``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DataError
from .geometry import as_coords


def _check_positive(comp) -> np.ndarray:
    x = np.asarray(comp, dtype=float)
    if x.ndim == 1:
        x = x[None, :]
    if x.ndim != 2 or x.shape[1] < 2:
        raise DataError(f"composition must be an (n, m) array with m >= 2, got shape {x.shape}")
    bad = ~(x > 0) | ~np.isfinite(x)
    if np.any(bad):
        r, c = np.argwhere(bad)[0]
        raise DataError(f"non-positive or non-finite part at row {r}, column {c}: {x[r, c]!r}")
    return x


def clr(comp) -> np.ndarray:
    """Centered log-ratio transform; every row sums to zero."""
    lx = np.log(_check_positive(comp))
    return lx - lx.mean(axis=1, keepdims=True)


def pivot_contrast(m: int) -> np.ndarray:
    """Orthonormal ``(m, m-1)`` contrast matrix of pivot coordinates."""
    if m < 2:
        raise ValueError("need at least two parts")
    v = np.zeros((m, m - 1))
    for j in range(m - 1):
        rest = m - j - 1
        scale = np.sqrt(rest / (rest + 1.0))
        v[j, j] = scale
        v[j + 1:, j] = -scale / rest
    return v


def ilr_pivot(comp):
    """Pivot-coordinate ilr transform.

    Returns
    -------
    z : ndarray, shape (n, m-1)
    V : ndarray, shape (m, m-1)
        Contrast matrix with ``z = clr(comp) @ V`` and ``clr(comp) = z @ V.T``.
    """
    x = _check_positive(comp)
    m = x.shape[1]
    lx = np.log(x)
    z = np.empty((x.shape[0], m - 1))
    for j in range(m - 1):
        rest = m - j - 1
        z[:, j] = np.sqrt(rest / (rest + 1.0)) * (lx[:, j] - lx[:, j + 1:].mean(axis=1))
    return z, pivot_contrast(m)


def combined_loadings(model, V) -> np.ndarray:
    """Loadings ``W V'`` mapping clr coordinates to latent components."""
    W = model.W if hasattr(model, "W") else np.asarray(model, dtype=float)
    V = np.asarray(V, dtype=float)
    if W.shape[1] != V.shape[1]:
        raise DataError(f"unmixing matrix has {W.shape[1]} columns, contrast matrix {V.shape[1]}")
    return W @ V.T


@dataclass
class VarianceMap:
    """Gridded moving-block variances; ``variance`` is NaN where count < 2."""

    cell_x: np.ndarray
    cell_y: np.ndarray
    count: np.ndarray
    variance: np.ndarray

    def rows(self):
        """Flat ``(cell_x, cell_y, count, variance-or-None)`` tuples, x fastest."""
        for j, cy in enumerate(self.cell_y):
            for i, cx in enumerate(self.cell_x):
                v = self.variance[j, i]
                yield float(cx), float(cy), int(self.count[j, i]), None if np.isnan(v) else float(v)


def _grid(lo: float, hi: float, res: float) -> np.ndarray:
    steps = int(np.floor((hi - lo) / res + 1e-9))
    return lo + res * np.arange(steps + 1)


def moving_block_variance(scores, coords, grid_res: float = 1.0, block_size: float = 3.0) -> VarianceMap:
    """Sample variance of ``scores`` inside a square block centered on each grid cell.

    The grid starts at the minimum x and y of ``coords`` and steps by
    ``grid_res`` up to the maximum (inclusive). A location belongs to the
    block of a cell when ``center - block_size/2 <= coord < center + block_size/2``
    in both axes.
    """
    if not (grid_res > 0 and block_size > 0):
        raise ValueError("grid_res and block_size must be positive")
    coords = as_coords(coords)
    s = np.asarray(scores, dtype=float).ravel()
    if s.shape[0] != coords.shape[0]:
        raise DataError(f"{s.shape[0]} scores for {coords.shape[0]} locations")
    gx = _grid(coords[:, 0].min(), coords[:, 0].max(), grid_res)
    gy = _grid(coords[:, 1].min(), coords[:, 1].max(), grid_res)
    half = block_size / 2.0
    inx = (coords[None, :, 0] >= gx[:, None] - half) & (coords[None, :, 0] < gx[:, None] + half)
    iny = (coords[None, :, 1] >= gy[:, None] - half) & (coords[None, :, 1] < gy[:, None] + half)
    count = np.zeros((gy.size, gx.size), dtype=int)
    var = np.full((gy.size, gx.size), np.nan)
    for j in range(gy.size):
        rows = inx & iny[j]
        count[j] = rows.sum(axis=1)
        for i in np.flatnonzero(count[j] >= 2):
            vals = s[rows[i]]
            # shifting by a member keeps constant blocks exactly at zero
            var[j, i] = np.var(vals - vals[0], ddof=1)
    return VarianceMap(gx, gy, count, var)
