"""Isomap: kNN graph, all-pairs graph geodesics, classical MDS.

The graph step connects each point to its k nearest Euclidean neighbors
(ties broken by index) and symmetrizes by union. Geodesics are exact
binary-heap Dijkstra from every source (scipy's csgraph backend); a
disconnected graph raises instead of silently returning infinities.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components, dijkstra

from .embedding import Embedding
from .linalg import pairwise_sq_dists

__all__ = [
    "NeighborGraph",
    "GeodesicMatrix",
    "DisconnectedGraphError",
    "knn_graph",
    "geodesics",
    "classical_mds",
]


class DisconnectedGraphError(RuntimeError):
    """Raised when geodesics are requested on a graph with > 1 component."""

    def __init__(self, components: int):
        self.components = int(components)
        super().__init__(f"neighbor graph has {components} connected components")


@dataclass(frozen=True)
class NeighborGraph:
    """Union-symmetrized kNN graph with Euclidean edge weights.

    edges maps node -> list of (neighbor, weight); every edge appears in both
    endpoint lists with the same weight.
    """

    edges: dict[int, list[tuple[int, float]]]
    k: int
    symmetrized: bool = True

    @property
    def n_nodes(self) -> int:
        return len(self.edges)

    def to_sparse(self) -> csr_matrix:
        rows, cols, vals = [], [], []
        for i, nbrs in self.edges.items():
            for j, w in nbrs:
                rows.append(i)
                cols.append(j)
                vals.append(w)
        n = self.n_nodes
        return csr_matrix((vals, (rows, cols)), shape=(n, n))


@dataclass(frozen=True)
class GeodesicMatrix:
    """Symmetric matrix of shortest-path lengths; all entries finite."""

    G: np.ndarray


def knn_graph(X: np.ndarray, k: int = 10) -> NeighborGraph:
    """Connect each row of X to its k nearest neighbors, then symmetrize.

    Neighbor ties at equal distance are resolved toward the lower index.
    Duplicate points are rejected (they would create zero-weight edges).
    """
    X = np.asarray(X, dtype=float)
    n = X.shape[0]
    if not 1 <= k < n:
        raise ValueError(f"k must satisfy 1 <= k < {n}")
    D2 = pairwise_sq_dists(X)
    order = np.argsort(D2, axis=1, kind="stable")  # stable: index breaks ties
    nbr = order[:, 1 : k + 1]
    if np.any(D2[np.arange(n)[:, None], nbr] == 0.0):
        raise ValueError("duplicate points produce zero-length edges; deduplicate first")

    adj: dict[int, dict[int, float]] = {i: {} for i in range(n)}
    for i in range(n):
        for j in nbr[i]:
            w = float(np.sqrt(D2[i, j]))
            adj[i][int(j)] = w
            adj[int(j)][i] = w
    edges = {i: sorted(nb.items()) for i, nb in adj.items()}
    return NeighborGraph(edges=edges, k=k)


def geodesics(g: NeighborGraph) -> GeodesicMatrix:
    """Exact single-source Dijkstra from every node of the weighted graph."""
    sp = g.to_sparse()
    n_comp, _ = connected_components(sp, directed=False)
    if n_comp != 1:
        raise DisconnectedGraphError(n_comp)
    G = dijkstra(sp, directed=False)
    return GeodesicMatrix(G=G)


def _mds_spectrum(G: np.ndarray, d: int):
    """Top-d eigenpairs of the double-centered Gram matrix -J G^2 J / 2."""
    n = G.shape[0]
    sq = G * G
    row = sq.mean(axis=1)
    B = -0.5 * (sq - row[:, None] - row[None, :] + sq.mean())
    B = 0.5 * (B + B.T)
    vals, vecs = sla.eigh(B, subset_by_index=[n - d, n - 1])
    return vals[::-1].copy(), vecs[:, ::-1].copy()


def classical_mds(G: GeodesicMatrix, d: int) -> Embedding:
    """Classical (Torgerson) MDS of a geodesic distance matrix.

    Coordinates are eigenvectors of the double-centered squared-distance
    matrix scaled by sqrt(max(eigenvalue, 0)); requested dimensions whose
    eigenvalue is not positive come out as zero columns, with the count
    recorded in meta["clamped"] rather than raised.
    """
    Gm = np.asarray(G.G, dtype=float)
    n = Gm.shape[0]
    if not 1 <= d <= n - 1:
        raise ValueError(f"d must be in [1, {n - 1}]")
    vals, vecs = _mds_spectrum(Gm, d)
    clamped = int(np.sum(vals <= 0.0))
    lam = np.clip(vals, 0.0, None)
    # deterministic sign: largest-|entry| positive per column
    lead = np.argmax(np.abs(vecs), axis=0)
    flip = vecs[lead, np.arange(d)] < 0
    vecs[:, flip] *= -1.0
    U = vecs * np.sqrt(lam)[None, :]
    return Embedding(U=U, method="isomap", d=d, meta={"clamped": clamped})
