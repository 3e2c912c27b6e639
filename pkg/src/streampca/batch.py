"""Batch PCA through the Gram-matrix route.

For n samples in d dimensions with n << d, the d x d covariance
eigenproblem is equivalent to the n x n Gram eigenproblem: if
X^T X u = mu u then X u is an (unnormalized) covariance eigenvector with
eigenvalue mu / (n - 1). This module computes the full spectrum that way,
using a self-contained cyclic Jacobi solver, and serves as the reference
every streaming estimate is measured against.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import (
    ConvergenceError,
    DimensionMismatchError,
    InsufficientDataError,
    RankZeroError,
    SampleStore,
)


@dataclass
class EigenSpace:
    """Ordered orthonormal basis with optional eigenvalues.

    ``components`` is a (p, dim) array whose rows are unit vectors.
    ``eigenvalues``, when present, are non-negative and non-increasing.
    ``centered`` records whether the producing computation subtracted the
    sample mean.
    """

    dim: int
    components: np.ndarray
    eigenvalues: np.ndarray | None = None
    centered: bool = False

    def __post_init__(self):
        self.components = np.atleast_2d(np.asarray(self.components, dtype=np.float64))
        if self.components.shape[1] != self.dim:
            raise DimensionMismatchError(
                f"components have {self.components.shape[1]} entries, dim is {self.dim}"
            )
        norms = np.linalg.norm(self.components, axis=1)
        if self.components.shape[0] and np.max(np.abs(norms - 1.0)) > 1e-8:
            raise ValueError("components must be unit-norm within 1e-8")
        if self.eigenvalues is not None:
            self.eigenvalues = np.asarray(self.eigenvalues, dtype=np.float64)
            if self.eigenvalues.shape[0] != self.components.shape[0]:
                raise DimensionMismatchError("one eigenvalue per component required")
            if self.eigenvalues.size:
                if np.min(self.eigenvalues) < -1e-10:
                    raise ValueError("eigenvalues must be non-negative")
            if self.eigenvalues.size > 1:
                if np.max(np.diff(self.eigenvalues)) > 1e-10:
                    raise ValueError("eigenvalues must be non-increasing")

    def __len__(self) -> int:
        return self.components.shape[0]


def gram(store: SampleStore, centered: bool = False) -> np.ndarray:
    """n x n matrix of pairwise sample inner products.

    With ``centered`` the sample mean is subtracted first. The result is
    exactly symmetric: each pair is computed once and mirrored.
    """
    if store.count < 2:
        raise InsufficientDataError(f"need at least 2 samples, have {store.count}")
    x = store.matrix()
    if centered:
        x = x - x.mean(axis=1, keepdims=True)
    g = x.T @ x
    upper = np.triu(g)
    return upper + np.triu(g, 1).T


def sym_eig(m, tol: float = 0.0, max_sweeps: int = 100):
    """Full eigendecomposition of a symmetric matrix by cyclic Jacobi.

    Returns (eigenvalues, eigenvectors) with eigenvalues sorted descending
    and eigenvectors as the corresponding columns of an orthonormal matrix.
    Sweeps of plane rotations run until the off-diagonal Frobenius norm
    falls to max(tol, 1e-12 * ||m||_F), which keeps the reconstruction
    residual ||m - Q diag(w) Q^T||_max at or below max(tol, 1e-9 * ||m||_max)
    for any order up to a few thousand.

    Raises ConvergenceError after ``max_sweeps`` sweeps, reporting the
    final off-diagonal norm.
    """
    a = np.asarray(m, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatchError(f"expected a square matrix, got shape {a.shape}")
    scale = float(np.max(np.abs(a))) if a.size else 0.0
    if float(np.max(np.abs(a - a.T))) > 1e-9 * max(1.0, scale):
        raise ValueError("matrix is not symmetric within 1e-9")
    n = a.shape[0]
    a = (a + a.T) / 2.0
    q = np.eye(n)
    if n == 1:
        return a.diagonal().copy(), q

    def off_norm(mat):
        off = mat.copy()
        np.fill_diagonal(off, 0.0)
        return float(np.linalg.norm(off))

    target = max(tol, 1e-12 * math.sqrt(float((a**2).sum())))
    for _ in range(max_sweeps):
        if off_norm(a) <= target:
            break
        for p in range(n - 1):
            for r in range(p + 1, n):
                apr = float(a[p, r])
                if apr == 0.0:
                    continue
                h = float(a[r, r] - a[p, p])
                if abs(h) + 100.0 * abs(apr) == abs(h):
                    # pivot negligible next to the diagonal gap
                    t = apr / h
                else:
                    theta = h / (2.0 * apr)
                    t = math.copysign(1.0, theta) / (abs(theta) + math.hypot(theta, 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                col_p = a[:, p].copy()
                col_r = a[:, r].copy()
                a[:, p] = c * col_p - s * col_r
                a[:, r] = s * col_p + c * col_r
                row_p = a[p, :].copy()
                row_r = a[r, :].copy()
                a[p, :] = c * row_p - s * row_r
                a[r, :] = s * row_p + c * row_r
                a[p, r] = 0.0
                a[r, p] = 0.0
                q_p = q[:, p].copy()
                q[:, p] = c * q_p - s * q[:, r]
                q[:, r] = s * q_p + c * q[:, r]
    else:
        final = off_norm(a)
        if final > target:
            raise ConvergenceError(
                f"Jacobi sweeps did not converge after {max_sweeps} sweeps "
                f"(off-diagonal norm {final:.3e}, target {target:.3e})",
                final,
            )
    eigenvalues = a.diagonal().copy()
    order = np.argsort(eigenvalues)[::-1]
    return eigenvalues[order], q[:, order]


def dual_pca(store: SampleStore, centered: bool = False, rank_tol: float = 1e-10) -> EigenSpace:
    """Full PCA basis of the stored samples via the Gram eigenproblem.

    Gram eigenpairs (mu, u) with mu > rank_tol * mu_max map to primal
    components X u (normalized) with eigenvalue mu / (n - 1), ordered by
    descending eigenvalue. Raises RankZeroError when nothing survives the
    tolerance.
    """
    g = gram(store, centered=centered)
    mu, u = sym_eig(g)
    if mu[0] <= 0.0:
        raise RankZeroError("all Gram eigenvalues are at or below zero")
    keep = mu > rank_tol * mu[0]
    if not np.any(keep):
        raise RankZeroError("all Gram eigenvalues fall below the rank tolerance")
    mu = mu[keep]
    u = u[:, keep]
    x = store.matrix()
    if centered:
        x = x - x.mean(axis=1, keepdims=True)
    primal = x @ u
    primal /= np.linalg.norm(primal, axis=0, keepdims=True)
    return EigenSpace(
        dim=store.dim,
        components=primal.T,
        eigenvalues=mu / (store.count - 1),
        centered=centered,
    )


def project(space: EigenSpace, x) -> np.ndarray:
    """Scores of a sample against the basis: w_i = <v_i, x>."""
    vec = np.asarray(x, dtype=np.float64)
    if vec.ndim != 1 or vec.shape[0] != space.dim:
        raise DimensionMismatchError(
            f"sample has shape {vec.shape}, space dim is {space.dim}"
        )
    return space.components @ vec


def reconstruct(space: EigenSpace, w) -> np.ndarray:
    """Sample rebuilt from scores: sum_i w_i v_i."""
    scores = np.asarray(w, dtype=np.float64)
    if scores.ndim != 1 or scores.shape[0] != len(space):
        raise DimensionMismatchError(
            f"got {scores.shape} scores for {len(space)} components"
        )
    return space.components.T @ scores
