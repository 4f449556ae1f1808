"""Exact simultaneous diagonalization and Givens-rotation joint diagonalization."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .loccov import whiten


@dataclass
class SimDiagResult:
    W: np.ndarray
    D: np.ndarray


@dataclass
class JointDiagResult:
    U: np.ndarray
    criterion: float
    sweeps: int
    converged: bool
    history: list = field(default_factory=list)
    diagonals: np.ndarray | None = None


def fix_signs(rows: np.ndarray) -> np.ndarray:
    """Flip rows so that each row's largest-magnitude entry is positive."""
    rows = np.array(rows, dtype=float)
    pick = np.argmax(np.abs(rows), axis=1)
    signs = np.sign(rows[np.arange(rows.shape[0]), pick])
    signs[signs == 0] = 1.0
    return rows * signs[:, None]


def simultaneous_diag(m1, m2) -> SimDiagResult:
    """Find ``W`` with ``W m1 W' = I`` and ``W m2 W' = diag(D)``, D decreasing.

    Raises
    ------
    NotPositiveDefiniteError
        If ``m1`` is not SPD.
    """
    root = whiten(m1).root
    m2 = np.asarray(m2, dtype=float)
    c = root @ (0.5 * (m2 + m2.T)) @ root
    evals, evecs = np.linalg.eigh(0.5 * (c + c.T))
    order = np.argsort(-evals, kind="stable")
    vt = fix_signs(evecs[:, order].T)
    return SimDiagResult(W=vt @ root, D=evals[order])


def diag_criterion(mats: np.ndarray) -> float:
    """Sum over matrices of squared diagonal entries."""
    d = np.diagonal(mats, axis1=1, axis2=2)
    return float(np.sum(d * d))


def givens_joint_diag(matrices, tol: float = 1e-10, max_sweeps: int = 100) -> JointDiagResult:
    """Orthogonal approximate joint diagonalization by Jacobi/Givens sweeps.

    Starting from the identity, each sweep visits the index pairs ``i < j``
    in lexicographic order and applies the closed-form rotation that
    maximizes the summed squared diagonal over all matrices for that pair.
    Iteration stops after a sweep in which no rotation has ``|sin| >= tol``.

    Rows of the returned ``U`` are sorted by decreasing summed diagonal of
    ``U M_k U'`` and sign-fixed (largest-magnitude entry positive).

    Parameters
    ----------
    matrices : sequence of (p, p) symmetric arrays
    tol : float
        Rotation threshold on ``|sin(theta)|``.
    max_sweeps : int

    Returns
    -------
    JointDiagResult
        ``history`` holds the criterion before the first sweep and after
        every sweep; ``converged`` is False if ``max_sweeps`` ran out.
    """
    a = np.array(matrices, dtype=float)
    if a.ndim == 2:
        a = a[None]
    if a.ndim != 3 or a.shape[0] < 1 or a.shape[1] != a.shape[2]:
        raise ValueError("expected a non-empty stack of square matrices")
    if not tol > 0:
        raise ValueError("tol must be positive")
    p = a.shape[1]
    a = 0.5 * (a + a.transpose(0, 2, 1))
    v = np.eye(p)
    history = [diag_criterion(a)]
    converged = False
    sweeps = 0
    while sweeps < max_sweeps:
        sweeps += 1
        rotated = False
        for i in range(p - 1):
            for j in range(i + 1, p):
                g1 = a[:, i, i] - a[:, j, j]
                g2 = a[:, i, j] + a[:, j, i]
                ton = g1 @ g1 - g2 @ g2
                toff = 2.0 * (g1 @ g2)
                # top eigenvector of the 2x2 Gram matrix; |theta| <= pi/4
                theta = 0.25 * math.atan2(toff, ton)
                c, s = math.cos(theta), math.sin(theta)
                if abs(s) < tol:
                    continue
                rotated = True
                ci, cj = a[:, :, i].copy(), a[:, :, j]
                a[:, :, i] = c * ci + s * cj
                a[:, :, j] = c * cj - s * ci
                ri, rj = a[:, i, :].copy(), a[:, j, :]
                a[:, i, :] = c * ri + s * rj
                a[:, j, :] = c * rj - s * ri
                vi, vj = v[:, i].copy(), v[:, j]
                v[:, i] = c * vi + s * vj
                v[:, j] = c * vj - s * vi
        history.append(diag_criterion(a))
        if not rotated:
            converged = True
            break
    u = v.T
    diags = np.diagonal(a, axis1=1, axis2=2)
    order = np.argsort(-diags.sum(axis=0), kind="stable")
    u = fix_signs(u[order])
    return JointDiagResult(
        U=u,
        criterion=history[-1],
        sweeps=sweeps,
        converged=converged,
        history=history,
        diagonals=diags[:, order],
    )
