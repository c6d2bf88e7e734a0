"""UMAP-lite: a small, deterministic approximation of UMAP.

Smoothed-kNN fuzzy graph (per-point bandwidths calibrated to a log2(k)
target), spectral initialization from the graph's symmetric normalized
adjacency, and stochastic cross-entropy layout optimization with negative
sampling on the low-dimensional kernel 1 / (1 + a r^(2b)).

Differences from reference UMAP, by design:
  * every edge is visited exactly once per epoch in a seeded shuffled order
    and the membership weight scales the attractive gradient (reference UMAP
    instead samples edges proportionally to weight, lock-free);
  * the whole update loop is single-threaded, so runs are bit-reproducible
    for a fixed seed.
Outputs are labeled "umap" but this module should be read as UMAP-lite;
fidelity to the reference method is qualitative only.
"""

from __future__ import annotations

import weakref
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import numba
from scipy.optimize import curve_fit

from .embedding import Embedding
from .linalg import pairwise_sq_dists

__all__ = [
    "FuzzyGraph",
    "curve_params",
    "build_fuzzy_graph",
    "optimize_layout",
]

SMOOTH_TOL = 1e-5      # required calibration residual on generic data
MIN_DIST = 0.1
SPREAD = 1.0
GRAD_CLIP = 4.0


@lru_cache(maxsize=None)
def curve_params(min_dist: float = MIN_DIST, spread: float = SPREAD) -> tuple[float, float]:
    """Least-squares (a, b) for 1/(1 + a r^(2b)) against the fuzzy target.

    The target is 1 for r <= min_dist and exp(-(r - min_dist)/spread)
    beyond; at the defaults the fit lands near (1.577, 0.895). Recomputed
    here rather than hard-coded so the numbers always track the target.
    """
    xv = np.linspace(0.0, 3.0 * spread, 300)
    yv = np.where(xv < min_dist, 1.0, np.exp(-(xv - min_dist) / spread))
    (a, b), _ = curve_fit(lambda x, a, b: 1.0 / (1.0 + a * x ** (2.0 * b)), xv, yv)
    return float(a), float(b)


@dataclass(frozen=True, eq=False)
class FuzzyGraph:
    """Symmetrized fuzzy kNN graph.

    Edges are stored once per unordered pair (head < tail) with t-conorm
    weights w = a + b - a*b in (0, 1]. rho is the distance to each point's
    nearest neighbor, sigma the calibrated bandwidth.
    """

    head: np.ndarray     # (m,) int64
    tail: np.ndarray     # (m,) int64
    weight: np.ndarray   # (m,) float
    rho: np.ndarray      # (n,)
    sigma: np.ndarray    # (n,)
    k: int
    n_points: int

    def membership_matrix(self) -> np.ndarray:
        W = np.zeros((self.n_points, self.n_points))
        W[self.head, self.tail] = self.weight
        W[self.tail, self.head] = self.weight
        return W


def _smooth_knn(nbr_dists: np.ndarray, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Per-point (rho, sigma): rho shifts distances, sigma is bisected so
    sum_j exp(-max(0, d_j - rho)/sigma) hits log2(k). 64 iterations, run
    vectorized over all points at once."""
    n = nbr_dists.shape[0]
    target = np.log2(k)
    rho = nbr_dists[:, 0].copy()
    shifted = np.maximum(nbr_dists - rho[:, None], 0.0)
    lo = np.zeros(n)
    hi = np.full(n, np.inf)
    mid = np.ones(n)
    for _ in range(64):
        val = np.exp(-shifted / mid[:, None]).sum(axis=1)
        too_big = val > target
        hi = np.where(too_big, mid, hi)
        lo = np.where(too_big, lo, mid)
        mid = np.where(np.isinf(hi), mid * 2.0, 0.5 * (lo + hi))
    # degenerate all-tied neighborhoods cannot reach the target; keep sigma
    # away from zero so memberships stay defined (they saturate at 1)
    mean_d = nbr_dists.mean()
    sigma = np.maximum(mid, 1e-3 * mean_d)
    return rho, sigma


def build_fuzzy_graph(X: np.ndarray, k: int = 15) -> FuzzyGraph:
    """Fuzzy graph over the k nearest Euclidean neighbors of each point."""
    X = np.asarray(X, dtype=float)
    n = X.shape[0]
    if not 2 <= k < n:
        raise ValueError(f"k must satisfy 2 <= k < {n}")
    D2 = pairwise_sq_dists(X)
    order = np.argsort(D2, axis=1, kind="stable")
    nbr = order[:, 1 : k + 1]
    rows = np.arange(n)[:, None]
    nd = np.sqrt(D2[rows, nbr])
    if np.any(nd[:, 0] == 0.0):
        raise ValueError("duplicate points; deduplicate before building the graph")

    rho, sigma = _smooth_knn(nd, k)
    directed = np.zeros((n, n))
    memb = np.exp(-np.maximum(nd - rho[:, None], 0.0) / sigma[:, None])
    directed[rows, nbr] = memb
    # probabilistic t-conorm a + b - a*b, in the complement form that stays
    # exactly 1 when either direction is saturated (and exactly 0 when both
    # directions are absent)
    W = 1.0 - (1.0 - directed) * (1.0 - directed.T)

    hi_idx = np.nonzero(np.triu(W, 1))
    return FuzzyGraph(
        head=hi_idx[0].astype(np.int64),
        tail=hi_idx[1].astype(np.int64),
        weight=W[hi_idx],
        rho=rho,
        sigma=sigma,
        k=k,
        n_points=n,
    )


# per-graph cache of the full adjacency spectrum (weakly keyed by graph
# identity), so per-d scans pay for one dense eigendecomposition, not fifteen
_SPECTRAL_CACHE: "weakref.WeakKeyDictionary[FuzzyGraph, tuple[np.ndarray, np.ndarray]]" = (
    weakref.WeakKeyDictionary()
)


def _spectral_init(g: FuzzyGraph, d: int) -> np.ndarray:
    if g not in _SPECTRAL_CACHE:
        W = g.membership_matrix()
        deg = W.sum(axis=1)
        inv_sqrt = 1.0 / np.sqrt(np.maximum(deg, 1e-12))
        A = W * np.outer(inv_sqrt, inv_sqrt)
        vals, vecs = np.linalg.eigh(A)
        _SPECTRAL_CACHE[g] = (vals[::-1].copy(), vecs[:, ::-1].copy())
    vals, vecs = _SPECTRAL_CACHE[g]
    if d > vecs.shape[1] - 1:
        raise ValueError(f"d = {d} exceeds available nontrivial modes ({vecs.shape[1] - 1})")
    Y = vecs[:, 1 : d + 1].copy()
    lead = np.argmax(np.abs(Y), axis=0)
    flip = Y[lead, np.arange(d)] < 0
    Y[:, flip] *= -1.0
    return Y * (10.0 / np.abs(Y).max())


@numba.njit(cache=True)
def _run_layout(Y, head, tail, weight, epochs, neg_rate, a, b, seed):  # pragma: no cover
    np.random.seed(seed)
    n = Y.shape[0]
    d = Y.shape[1]
    m = head.shape[0]
    order = np.arange(m)
    for epoch in range(epochs):
        lr = 1.0 - epoch / epochs
        np.random.shuffle(order)
        for t in range(m):
            e = order[t]
            i = head[e]
            j = tail[e]
            w = weight[e]
            r2 = 0.0
            for c in range(d):
                diff = Y[i, c] - Y[j, c]
                r2 += diff * diff
            if r2 > 0.0:
                g = (-2.0 * a * b * r2 ** (b - 1.0)) / (1.0 + a * r2 ** b) * w
                for c in range(d):
                    gd = g * (Y[i, c] - Y[j, c])
                    if gd > GRAD_CLIP:
                        gd = GRAD_CLIP
                    elif gd < -GRAD_CLIP:
                        gd = -GRAD_CLIP
                    Y[i, c] += lr * gd
                    Y[j, c] -= lr * gd
            for s in range(neg_rate):
                other = np.random.randint(0, n)
                if other == i:
                    continue
                r2n = 0.0
                for c in range(d):
                    diff = Y[i, c] - Y[other, c]
                    r2n += diff * diff
                if r2n > 0.0:
                    gn = 2.0 * b / ((0.001 + r2n) * (1.0 + a * r2n ** b))
                    for c in range(d):
                        gd = gn * (Y[i, c] - Y[other, c])
                        if gd > GRAD_CLIP:
                            gd = GRAD_CLIP
                        elif gd < -GRAD_CLIP:
                            gd = -GRAD_CLIP
                        Y[i, c] += lr * gd


def optimize_layout(
    g: FuzzyGraph,
    d: int,
    epochs: int = 200,
    seed: int = 7,
    neg_rate: int = 5,
) -> Embedding:
    """Optimize an N x d layout of the fuzzy graph.

    Starts from the top nontrivial eigenvectors of the symmetric normalized
    adjacency scaled to spread 10, then runs per-edge attraction and
    negative-sample repulsion with per-component gradient clipping at 4 and
    a step size decaying linearly from 1 to 0. Bit-reproducible for a fixed
    seed.
    """
    if d < 1:
        raise ValueError("d must be >= 1")
    if epochs < 1:
        raise ValueError("epochs must be >= 1")
    a, b = curve_params()
    Y = _spectral_init(g, d)
    _run_layout(Y, g.head, g.tail, g.weight, epochs, neg_rate, a, b, seed)
    if not np.all(np.isfinite(Y)):
        raise FloatingPointError("layout diverged to non-finite coordinates")
    return Embedding(
        U=Y,
        method="umap",
        d=d,
        meta={"variant": "umap-lite", "k": g.k, "epochs": epochs, "seed": seed,
              "neg_rate": neg_rate, "a": a, "b": b},
    )
