"""Dense numerical kernels shared by every other module.

Pairwise squared distances, symmetric eigendecomposition with a fixed sign
convention, affine least squares with an unpenalized bias, and rigid
Procrustes scoring.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import pdist, squareform

__all__ = [
    "SymSpectrum",
    "AffineFit",
    "pairwise_sq_dists",
    "sym_eig",
    "lstsq_affine",
    "procrustes_rigid",
]


@dataclass(frozen=True)
class SymSpectrum:
    """Top-k eigenpairs of a symmetric matrix, eigenvalues descending.

    ``vectors[:, n]`` is the unit eigenvector for ``values[n]``, with the
    largest-magnitude entry of each vector made positive (ties broken by
    lowest index) so repeated runs are reproducible.
    """

    values: np.ndarray   # (k,)
    vectors: np.ndarray  # (N, k)


@dataclass(frozen=True)
class AffineFit:
    """Coefficients of the model Q ~ U @ L + b. The ridge penalizes only L."""

    L: np.ndarray  # (d, m)
    b: np.ndarray  # (m,)
    ridge: float


def pairwise_sq_dists(X: np.ndarray) -> np.ndarray:
    """All pairwise squared Euclidean distances of the rows of X.

    Each unordered pair is computed once (difference-of-coordinates form, no
    Gram-matrix cancellation), so the result is exactly symmetric with a zero
    diagonal.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[0] < 1:
        raise ValueError("X must be a nonempty 2-D array")
    if not np.all(np.isfinite(X)):
        raise ValueError("X contains non-finite entries")
    if X.shape[0] == 1:
        return np.zeros((1, 1))
    return squareform(pdist(X, "sqeuclidean"))


def sym_eig(S: np.ndarray, k: int) -> SymSpectrum:
    """Top-k eigenpairs of a symmetric matrix by algebraic value, descending.

    Rejects input whose asymmetry exceeds 1e-12 (relative to the largest
    entry); smaller asymmetry is symmetrized away before the solve. Residuals
    |S v - lambda v| are validated against 1e-8 * (1 + |lambda|).
    """
    S = np.asarray(S, dtype=float)
    n = S.shape[0]
    if S.ndim != 2 or S.shape[1] != n:
        raise ValueError("S must be square")
    if not 1 <= k <= n:
        raise ValueError(f"k must be in [1, {n}], got {k}")
    scale = max(1.0, float(np.abs(S).max()))
    asym = float(np.abs(S - S.T).max())
    if asym > 1e-12 * scale:
        raise ValueError(f"input is not symmetric: max |S - S^T| = {asym:.3e}")
    Ssym = 0.5 * (S + S.T)

    values, vectors = np.linalg.eigh(Ssym)
    values = values[::-1][:k].copy()
    vectors = vectors[:, ::-1][:, :k].copy()

    # sign convention: largest-|entry| positive, first index wins ties
    lead = np.argmax(np.abs(vectors), axis=0)
    flip = vectors[lead, np.arange(k)] < 0
    vectors[:, flip] *= -1.0

    resid = Ssym @ vectors - vectors * values[None, :]
    bound = 1e-8 * (1.0 + np.abs(values))
    worst = np.abs(resid).max(axis=0) / bound
    if worst.max() > 1.0:
        bad = int(np.argmax(worst))
        raise np.linalg.LinAlgError(
            f"eigenpair {bad} residual {np.abs(resid[:, bad]).max():.3e} "
            f"exceeds {bound[bad]:.3e}"
        )
    return SymSpectrum(values=values, vectors=vectors)


def lstsq_affine(U: np.ndarray, Q: np.ndarray, ridge: float) -> AffineFit:
    """Minimize |Q - (U L + 1 b^T)|_F^2 + ridge |L|_F^2.

    Solved in centered variables so the bias column is never penalized; with
    ridge = 0 the minimum-norm L is returned (SVD least squares), which
    resolves rank deficiency.
    """
    U = np.atleast_2d(np.asarray(U, dtype=float))
    Q = np.atleast_2d(np.asarray(Q, dtype=float))
    if U.shape[0] != Q.shape[0]:
        raise ValueError("U and Q must have the same row count")
    if ridge < 0:
        raise ValueError("ridge must be nonnegative")
    n, d = U.shape
    m = Q.shape[1]
    if d == 0:
        return AffineFit(L=np.zeros((0, m)), b=Q.mean(axis=0), ridge=float(ridge))

    u_mean = U.mean(axis=0)
    q_mean = Q.mean(axis=0)
    Uc = U - u_mean
    Qc = Q - q_mean
    if ridge == 0.0:
        L, *_ = np.linalg.lstsq(Uc, Qc, rcond=None)
    else:
        G = Uc.T @ Uc + ridge * np.eye(d)
        L = np.linalg.solve(G, Uc.T @ Qc)
    b = q_mean - u_mean @ L
    return AffineFit(L=L, b=b, ridge=float(ridge))


def procrustes_rigid(A: np.ndarray, B: np.ndarray) -> float:
    """Per-scalar RMS residual after rigidly aligning B to A.

    The alignment is the optimal orthogonal map (rotation or reflection) plus
    translation, from the SVD of the centered cross-covariance.
    """
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    if A.shape != B.shape:
        raise ValueError("A and B must have equal shapes")
    n, m = A.shape
    if n < m:
        raise ValueError("need at least as many rows as columns")
    Ac = A - A.mean(axis=0)
    Bc = B - B.mean(axis=0)
    Uu, _, Vt = np.linalg.svd(Bc.T @ Ac)
    R = Uu @ Vt
    resid = Ac - Bc @ R
    return float(np.linalg.norm(resid) / np.sqrt(n * m))
