"""Diffusion-map pipeline.

Gaussian kernel P = exp(-beta D^2), optional density normalization
P_a = P / (q_i q_j)^alpha with q = P 1 (the Coifman-Lafon drift correction),
Markov normalization through the symmetric conjugate
S = diag(d)^(-1/2) P_a diag(d)^(-1/2) with d = P_a 1, and diffusion
coordinates psi = diag(d)^(-1/2) v rescaled to unit norm under the
stationary weights pi = d / sum(d). S shares its eigenvalues with the
row-stochastic operator P+ = diag(d)^(-1) P_a, so a symmetric solver
suffices.

Defaults (alpha = 1, beta = 50 / median off-diagonal D^2) are chosen so the
kernel resolves the rolled sheet: the kernel length stays below the spiral's
inter-layer gap while each kernel ball still holds ~20 samples at the
benchmark's N = 2000. Both are configurable.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
import numpy as np
from scipy.spatial.distance import cdist

from .embedding import Embedding
from .linalg import pairwise_sq_dists, sym_eig

__all__ = [
    "BetaRule",
    "KernelConfig",
    "DiffusionBasis",
    "gaussian_kernel",
    "resolve_beta",
    "alpha_normalize",
    "fit_diffusion",
    "laplacian_spectrum",
    "truncate",
    "nystrom_extend",
    "markov_operator",
]

# eigenvalues this close to 0 or 1 are round-off and get clipped
LAMBDA_CLIP = 1e-9

DEFAULT_MEDIAN_SCALE = 50.0
DEFAULT_ALPHA = 1.0


@dataclass(frozen=True)
class BetaRule:
    """Either an explicit kernel scale or c / median(off-diagonal D^2)."""

    kind: str  # "explicit" | "median"
    value: float

    def __post_init__(self) -> None:
        if self.kind not in ("explicit", "median"):
            raise ValueError(f"unknown beta rule kind {self.kind!r}")
        if not self.value > 0:
            raise ValueError("beta rule value must be positive")

    @classmethod
    def explicit(cls, beta: float) -> "BetaRule":
        return cls("explicit", float(beta))

    @classmethod
    def median_scaled(cls, c: float = DEFAULT_MEDIAN_SCALE) -> "BetaRule":
        return cls("median", float(c))

    @classmethod
    def parse(cls, text: str) -> "BetaRule":
        """Accepts "median:<c>", "explicit:<beta>", or a bare float."""
        if ":" in text:
            kind, _, val = text.partition(":")
            kind = {"median": "median", "explicit": "explicit"}.get(kind.strip())
            if kind is None:
                raise ValueError(f"unknown beta rule {text!r}")
            return cls(kind, float(val))
        return cls("explicit", float(text))

    def __str__(self) -> str:
        return f"{self.kind}:{self.value:g}"


@dataclass(frozen=True)
class KernelConfig:
    beta_rule: BetaRule = field(default_factory=BetaRule.median_scaled)
    alpha: float = DEFAULT_ALPHA
    beta: float | None = None  # filled in once resolved against a dataset

    def __post_init__(self) -> None:
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError("alpha must lie in [0, 1]")
        if self.beta is not None and not self.beta > 0:
            raise ValueError("resolved beta must be positive")


@dataclass(frozen=True)
class DiffusionBasis:
    """Eigenvalues, diffusion coordinates and the data needed to extend them.

    lambdas[0] = 1 and psi[:, 0] is the constant stationary mode. degrees are
    the row sums of the alpha-normalized kernel; kernel_row_sums the row sums
    of the raw kernel (needed to reproduce the alpha normalization for
    Nystrom queries).
    """

    lambdas: np.ndarray          # (k,) descending in [0, 1]
    psi: np.ndarray              # (N, k), pi-weighted orthonormal columns
    degrees: np.ndarray          # (N,)
    kernel_row_sums: np.ndarray  # (N,)
    config: KernelConfig
    train_X: np.ndarray          # (N, D)

    @property
    def n_modes(self) -> int:
        return int(self.lambdas.shape[0])


def gaussian_kernel(D2: np.ndarray, beta: float) -> np.ndarray:
    """Entrywise exp(-beta * D2); unit diagonal, entries in (0, 1]."""
    if not beta > 0:
        raise ValueError("beta must be positive")
    return np.exp(-beta * np.asarray(D2, dtype=float))


def resolve_beta(D2: np.ndarray, rule: BetaRule) -> float:
    """Turn a BetaRule into a concrete scale for this distance matrix."""
    if rule.kind == "explicit":
        return rule.value
    n = D2.shape[0]
    if n < 2:
        raise ValueError("median-scaled beta needs at least 2 points")
    off = D2[np.triu_indices(n, 1)]
    med = float(np.median(off))
    if med <= 0:
        raise ValueError("median off-diagonal distance is zero (duplicate-only data)")
    return rule.value / med


def alpha_normalize(P: np.ndarray, alpha: float) -> np.ndarray:
    """Divide by (q_i q_j)^alpha, q = P 1. alpha = 0 returns P unchanged."""
    if not 0.0 <= alpha <= 1.0:
        raise ValueError("alpha must lie in [0, 1]")
    if alpha == 0.0:
        return P
    q = P.sum(axis=1)
    qa = np.power(q, alpha)
    return P / np.outer(qa, qa)


def _kernel_parts(X: np.ndarray, config: KernelConfig):
    """(Pa, degrees, kernel_row_sums, resolved_config) for a point cloud.

    Exact duplicate points are rejected since they would make diffusion
    coordinates ill-defined.
    """
    X = np.asarray(X, dtype=float)
    D2 = pairwise_sq_dists(X)
    n = D2.shape[0]
    if n >= 2:
        iu = np.triu_indices(n, 1)
        dup = np.flatnonzero(D2[iu] == 0.0)
        if dup.size:
            i, j = iu[0][dup[0]], iu[1][dup[0]]
            raise ValueError(f"duplicate points (rows {i} and {j}); merge or jitter upstream")
    beta = config.beta if config.beta is not None else resolve_beta(D2, config.beta_rule)
    P = gaussian_kernel(D2, beta)
    q = P.sum(axis=1)
    Pa = alpha_normalize(P, config.alpha)
    deg = Pa.sum(axis=1)
    return Pa, deg, q, replace(config, beta=float(beta))


def markov_operator(X: np.ndarray, config: KernelConfig):
    """Row-stochastic random-walk operator plus its normalization data.

    Returns (P_plus, degrees, kernel_row_sums, resolved_config).
    """
    Pa, deg, q, resolved = _kernel_parts(X, config)
    return Pa / deg[:, None], deg, q, resolved


def fit_diffusion(X: np.ndarray, config: KernelConfig = KernelConfig(), k: int = 16) -> DiffusionBasis:
    """Diffusion basis from the top-k spectrum of the symmetric conjugate."""
    X = np.asarray(X, dtype=float)
    n = X.shape[0]
    if not 1 <= k <= n:
        raise ValueError(f"k must be in [1, {n}]")
    Pa, deg, q, resolved = _kernel_parts(X, config)
    inv_sqrt = 1.0 / np.sqrt(deg)
    S = Pa * np.outer(inv_sqrt, inv_sqrt)

    eig = sym_eig(S, k)
    lam = eig.values.copy()
    out_of_range = (lam < -LAMBDA_CLIP) | (lam > 1.0 + LAMBDA_CLIP)
    if out_of_range.any():
        worst = lam[out_of_range][0]
        raise np.linalg.LinAlgError(
            f"kernel eigenvalue {worst!r} outside [0,1] beyond the {LAMBDA_CLIP} round-off window"
        )
    lam = np.clip(lam, 0.0, 1.0)
    if abs(lam[0] - 1.0) > LAMBDA_CLIP:
        raise np.linalg.LinAlgError(f"stationary eigenvalue {lam[0]!r} is not 1 within {LAMBDA_CLIP}")
    lam[0] = 1.0  # exactly 1 for a stochastic operator; remove round-off

    psi = eig.vectors * inv_sqrt[:, None]
    pi = deg / deg.sum()
    norms = np.sqrt((pi[:, None] * psi * psi).sum(axis=0))
    psi = psi / norms[None, :]
    return DiffusionBasis(
        lambdas=lam,
        psi=psi,
        degrees=deg,
        kernel_row_sums=q,
        config=resolved,
        train_X=X.copy(),
    )


def laplacian_spectrum(basis: DiffusionBasis) -> np.ndarray:
    """Random-walk Laplacian eigenvalues mu_n = 1 - lambda_n, ascending."""
    return 1.0 - basis.lambdas


def truncate(basis: DiffusionBasis, d: int) -> Embedding:
    """First d nontrivial diffusion coordinates (constant mode excluded).

    Truncations are nested: truncate(b, d1) is exactly the first d1 columns
    of truncate(b, d2) for d1 <= d2.
    """
    if not 0 <= d <= basis.n_modes - 1:
        raise ValueError(f"d must be in [0, {basis.n_modes - 1}], got {d}")
    cfg = basis.config
    return Embedding(
        U=basis.psi[:, 1 : d + 1].copy(),
        method="dmap",
        d=d,
        meta={"beta": cfg.beta, "alpha": cfg.alpha, "beta_rule": str(cfg.beta_rule), "k": basis.n_modes},
    )


def nystrom_extend(basis: DiffusionBasis, X_new: np.ndarray, n_modes: int | None = None) -> np.ndarray:
    """Interpolate the first n_modes diffusion coordinates to new points.

    Builds the cross kernel with the stored beta, reproduces the alpha
    normalization (training-side factors from the stored kernel row sums,
    query-side from fresh cross-kernel row sums), row-normalizes, and divides
    each propagated column by its eigenvalue. Modes with lambda <= 1e-12 are
    refused because the division blows up.
    """
    k = basis.n_modes if n_modes is None else int(n_modes)
    if not 1 <= k <= basis.n_modes:
        raise ValueError(f"n_modes must be in [1, {basis.n_modes}]")
    tiny = np.flatnonzero(basis.lambdas[:k] <= 1e-12)
    if tiny.size:
        raise ValueError(
            f"cannot extend mode {int(tiny[0])}: lambda = {basis.lambdas[int(tiny[0])]!r} <= 1e-12"
        )
    X_new = np.atleast_2d(np.asarray(X_new, dtype=float))
    D2c = cdist(X_new, basis.train_X, "sqeuclidean")
    K = gaussian_kernel(D2c, basis.config.beta)
    alpha = basis.config.alpha
    if alpha > 0.0:
        q_new = K.sum(axis=1)
        K = K / np.outer(np.power(q_new, alpha), np.power(basis.kernel_row_sums, alpha))
    P_cross = K / K.sum(axis=1)[:, None]
    return (P_cross @ basis.psi[:, :k]) / basis.lambdas[None, :k]
