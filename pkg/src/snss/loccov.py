"""Sample local covariance matrices and whitening."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import sparse
from scipy.spatial import cKDTree

from .data import SpatialData
from .errors import EmptyBlockError, NotPositiveDefiniteError
from .geometry import KernelSpec

PD_RTOL = 1e-10
_DENSE_CHUNK = 1024


def sample_mean(data: SpatialData) -> np.ndarray:
    return data.values.mean(axis=0)


def _pair_weights(coords: np.ndarray, kernel: KernelSpec) -> sparse.csr_matrix:
    """Sparse ``(m, m)`` matrix of kernel weights over ordered location pairs."""
    m = coords.shape[0]
    if math.isfinite(kernel.support):
        tree = cKDTree(coords)
        pairs = tree.sparse_distance_matrix(tree, kernel.support, output_type="ndarray")
        w = kernel.weight(pairs["v"])
        keep = w != 0
        i, j, w = pairs["i"][keep], pairs["j"][keep], w[keep]
        order = np.lexsort((j, i))
        return sparse.csr_matrix((w[order], (i[order], j[order])), shape=(m, m))
    rows = []
    for lo in range(0, m, _DENSE_CHUNK):
        d = np.sqrt(((coords[lo:lo + _DENSE_CHUNK, None, :] - coords[None, :, :]) ** 2).sum(axis=2))
        rows.append(sparse.csr_matrix(kernel.weight(d)))
    return sparse.vstack(rows, format="csr")


def local_cov(data: SpatialData, block, kernel: KernelSpec, center=None) -> np.ndarray:
    """Kernel-weighted local covariance of the observations in ``block``.

    Observations are centered with the global mean over all ``n`` locations
    (or ``center`` if given) and the double sum over ordered pairs is
    normalized by the block size, not by the number of contributing pairs.

    Parameters
    ----------
    data : SpatialData
    block : array of int or None
        Location indices of the sub-domain; ``None`` means all locations.
    kernel : KernelSpec
    center : array, optional
        Centering vector; defaults to ``sample_mean(data)``.

    Returns
    -------
    ndarray, shape (p, p)
        Exactly symmetric matrix.
    """
    idx = np.arange(data.n) if block is None else np.asarray(block, dtype=np.intp)
    if idx.size == 0:
        raise EmptyBlockError("local covariance of an empty block")
    mu = sample_mean(data) if center is None else np.asarray(center, dtype=float)
    xc = data.values[idx] - mu
    weights = _pair_weights(data.coords[idx], kernel)
    m = xc.T @ (weights @ xc) / idx.size
    return 0.5 * (m + m.T)


def block_cov(data: SpatialData, block=None, center=None) -> np.ndarray:
    """Plain average covariance of a block (zero-lag local covariance)."""
    idx = np.arange(data.n) if block is None else np.asarray(block, dtype=np.intp)
    if idx.size == 0:
        raise EmptyBlockError("covariance of an empty block")
    mu = sample_mean(data) if center is None else np.asarray(center, dtype=float)
    xc = data.values[idx] - mu
    m = xc.T @ xc / idx.size
    return 0.5 * (m + m.T)


@dataclass
class Whitener:
    root: np.ndarray
    source: np.ndarray


def whiten(m0) -> Whitener:
    """Symmetric inverse square root of an SPD matrix."""
    m0 = np.asarray(m0, dtype=float)
    m0 = 0.5 * (m0 + m0.T)
    evals, evecs = np.linalg.eigh(m0)
    top = evals[-1]
    if not top > 0 or evals[0] <= PD_RTOL * top:
        raise NotPositiveDefiniteError(
            f"matrix is not positive definite (smallest eigenvalue {evals[0]:.6g}, largest {top:.6g})",
            eigenvalue=float(evals[0]),
        )
    root = (evecs / np.sqrt(evals)) @ evecs.T
    return Whitener(root=0.5 * (root + root.T), source=m0)
