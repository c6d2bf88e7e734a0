"""Oracle affine readout, reconstruction metrics, and the dimension scan.

The readout fits Q ~ U L + b by least squares and reports the squared
Frobenius error, the mean squared error over all N*m target scalars, and the
relative Frobenius error |Q - Qhat|_F / |Q - mean(Q)|_F (so 1.0 is the
bias-only baseline). It is a supervised probe of representational span, not
an unsupervised method.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import dmap as dmap_mod
from . import isomap as isomap_mod
from . import umaplite
from .dmap import DiffusionBasis, truncate
from .embedding import Embedding
from .linalg import AffineFit, lstsq_affine
from .synth import Dataset

__all__ = [
    "ReadoutFit",
    "ScanRow",
    "ScanTable",
    "ScanParams",
    "auto_ridge",
    "fit_oracle",
    "predict",
    "reconstruct_ambient",
    "run_scan",
    "SCAN_DIMS",
]

# the common dimension scan used by the benchmark
SCAN_DIMS: tuple[int, ...] = (1, 2, 3, 4, 5, 6, 7, 8, 16, 32, 64, 128, 256, 512, 1024)

METHOD_ORDER = ("dmap", "isomap", "umap")


@dataclass(frozen=True)
class ReadoutFit:
    fit: AffineFit
    frob_sq: float
    mse: float
    rel_frob: float


@dataclass(frozen=True)
class ScanRow:
    method: str
    d: int
    frob_sq: float
    mse: float
    rel_frob: float
    wall_ms: float
    status: str = "ok"

    @property
    def ok(self) -> bool:
        return self.status == "ok"


@dataclass(frozen=True)
class ScanTable:
    rows: tuple[ScanRow, ...]

    def for_method(self, method: str) -> list[ScanRow]:
        return [r for r in self.rows if r.method == method]

    def row(self, method: str, d: int) -> ScanRow:
        for r in self.rows:
            if r.method == method and r.d == d:
                return r
        raise KeyError((method, d))


@dataclass(frozen=True)
class ScanParams:
    """Hyperparameters for one scan run; every field has a declared default."""

    beta_rule: str = "median:50"
    alpha: float = 1.0
    isomap_k: int = 10
    umap_k: int = 15
    umap_epochs: int = 200
    umap_seed: int = 7
    ridge: float | None = None  # None = auto_ridge rule
    threads: int = 1


def auto_ridge(U: np.ndarray) -> float:
    """Default readout ridge: 1e-10 * trace(U^T U) / d (0 for an empty U)."""
    d = U.shape[1]
    if d == 0:
        return 0.0
    return 1e-10 * float(np.einsum("ij,ij->", U, U)) / d


def fit_oracle(emb: Embedding, Q: np.ndarray, ridge: float | None = None) -> ReadoutFit:
    """Affine least-squares readout of the target chart from an embedding."""
    Q = np.asarray(Q, dtype=float)
    U = emb.U
    if U.shape[0] != Q.shape[0]:
        raise ValueError("embedding and target row counts differ")
    lam = auto_ridge(U) if ridge is None else float(ridge)
    fit = lstsq_affine(U, Q, lam)
    resid = Q - predict(fit, U)
    frob_sq = float(np.einsum("ij,ij->", resid, resid))
    denom = float(np.linalg.norm(Q - Q.mean(axis=0)))
    rel = np.sqrt(frob_sq) / denom if denom > 0 else (0.0 if frob_sq == 0 else np.inf)
    return ReadoutFit(fit=fit, frob_sq=frob_sq, mse=frob_sq / Q.size, rel_frob=float(rel))


def predict(fit: AffineFit, U: np.ndarray) -> np.ndarray:
    return U @ fit.L + fit.b


def reconstruct_ambient(
    basis: DiffusionBasis, X: np.ndarray, d: int, ridge: float | None = None
) -> tuple[AffineFit, float]:
    """Readout with the ambient cloud as the target: X ~ psi[:, 1:d+1] L + b.

    Demonstrates that ambient coordinates admit a spectral expansion in the
    diffusion basis; with all N-1 nontrivial modes the fit interpolates.
    """
    out = fit_oracle(truncate(basis, d), np.asarray(X, dtype=float), ridge)
    return out.fit, out.rel_frob


def _scan_methods(methods: Iterable[str]) -> list[str]:
    wanted = set(methods)
    unknown = wanted.difference(METHOD_ORDER)
    if unknown:
        raise ValueError(f"unknown methods: {sorted(unknown)}")
    return [m for m in METHOD_ORDER if m in wanted]


def run_scan(
    ds: Dataset,
    dims: Sequence[int] = SCAN_DIMS,
    methods: Iterable[str] = METHOD_ORDER,
    params: ScanParams = ScanParams(),
) -> ScanTable:
    """Fit every requested (method, d) cell and score it against the chart.

    dmap fits one basis at k = max(dims) + 1 and truncates per d; isomap and
    umap recompute their embedding for each d (isomap reuses the geodesic
    matrix, umap the fuzzy graph, neither of which depends on d). A failure
    in one method marks only that method's rows as failed; remaining rows
    still run.
    """
    dims = sorted(set(int(d) for d in dims))
    if not dims or dims[0] < 1:
        raise ValueError("dims must be positive")
    Q = ds.chart.Q
    n = Q.shape[0]
    rows: list[ScanRow] = []

    def failed(method: str, d: int, exc: Exception) -> ScanRow:
        tag = f"failed:{type(exc).__name__}: {exc}"
        return ScanRow(method, d, float("nan"), float("nan"), float("nan"), float("nan"), tag)

    def scored(method: str, d: int, make_embedding) -> ScanRow:
        t0 = time.perf_counter()
        try:
            emb = make_embedding()
            out = fit_oracle(emb, Q, params.ridge)
        except Exception as exc:  # noqa: BLE001 - row isolation is the contract
            return failed(method, d, exc)
        ms = (time.perf_counter() - t0) * 1e3
        return ScanRow(method, d, out.frob_sq, out.mse, out.rel_frob, ms, "ok")

    def run_rows(method: str, job_for_d) -> list[ScanRow]:
        # rows are pure and independent; results assemble in dims order
        # regardless of completion order, so output is thread-count invariant
        if params.threads > 1:
            with ThreadPoolExecutor(max_workers=params.threads) as pool:
                return list(pool.map(lambda d: scored(method, d, job_for_d(d)), dims))
        return [scored(method, d, job_for_d(d)) for d in dims]

    for method in _scan_methods(methods):
        if method == "dmap":
            if max(dims) > n - 2:
                rows.extend(failed(method, d, ValueError(f"max dim {max(dims)} > N-2")) for d in dims)
                continue
            try:
                cfg = dmap_mod.KernelConfig(
                    beta_rule=dmap_mod.BetaRule.parse(params.beta_rule), alpha=params.alpha
                )
                basis = dmap_mod.fit_diffusion(ds.X, cfg, k=max(dims) + 1)
            except Exception as exc:  # noqa: BLE001
                rows.extend(failed(method, d, exc) for d in dims)
                continue
            rows.extend(run_rows(method, lambda d: (lambda: dmap_mod.truncate(basis, d))))
        elif method == "isomap":
            try:
                graph = isomap_mod.knn_graph(ds.X, params.isomap_k)
                geo = isomap_mod.geodesics(graph)
            except Exception as exc:  # noqa: BLE001
                rows.extend(failed(method, d, exc) for d in dims)
                continue
            rows.extend(run_rows(method, lambda d: (lambda: isomap_mod.classical_mds(geo, d))))
        else:  # umap
            try:
                fuzzy = umaplite.build_fuzzy_graph(ds.X, params.umap_k)
                if min(dims) <= fuzzy.n_points - 1:
                    # warm the shared spectral-init cache before any parallel rows
                    umaplite._spectral_init(fuzzy, min(max(dims), fuzzy.n_points - 1))
            except Exception as exc:  # noqa: BLE001
                rows.extend(failed(method, d, exc) for d in dims)
                continue
            rows.extend(
                run_rows(
                    method,
                    lambda d: (
                        lambda: umaplite.optimize_layout(
                            fuzzy, d, epochs=params.umap_epochs, seed=params.umap_seed
                        )
                    ),
                )
            )
    return ScanTable(rows=tuple(rows))
