"""Spectral diagnostics: effective ranks, Weyl-slope sweeps, readout spectra
and the mode-pair chart-selection heuristic.

The effective rank of the Gaussian kernel interpolates between 1 (flat-kernel
limit, rank-one matrix) and N (localized limit, identity); on a d-dimensional
manifold the mode count grows like beta^(d/2), so the log-log slope of the
entropy rank against beta estimates d/2.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .dmap import DiffusionBasis, gaussian_kernel
from .readout import ReadoutFit, fit_oracle
from .embedding import Embedding

__all__ = [
    "RankRow",
    "RankReport",
    "ReadoutSpectrum",
    "PairChartReport",
    "effective_ranks",
    "rank_scan",
    "readout_spectrum",
    "pair_charts",
    "novelty_score",
]

# Weyl regression window: entropy ranks in [WINDOW_LO, WINDOW_HI_FRAC * N],
# excluding both degenerate kernel limits from the fit
WINDOW_LO = 3.0
WINDOW_HI_FRAC = 0.3
MIN_WINDOW_POINTS = 3


@dataclass(frozen=True)
class RankRow:
    beta: float
    threshold_rank: int
    stable_rank: float
    entropy_rank: float


@dataclass(frozen=True)
class RankReport:
    rows: tuple[RankRow, ...]
    weyl_slope: float | None
    weyl_window: tuple[float, float] | None  # (beta_lo, beta_hi)
    fit_r2: float | None


@dataclass(frozen=True)
class ReadoutSpectrum:
    """Rows (n, 1 - lambda_n, |L_n,s|, |L_n,h|), n indexing nontrivial modes."""

    mode: np.ndarray             # (d,) int
    one_minus_lambda: np.ndarray  # (d,) nondecreasing
    coeff_mag_s: np.ndarray      # (d,)
    coeff_mag_h: np.ndarray      # (d,)


@dataclass(frozen=True)
class PairChartReport:
    base_mode: int
    partners: np.ndarray          # (p,) int
    novelty: np.ndarray           # (p,) in [0, 1]
    pair_rel_frob: np.ndarray     # (p,)
    base_coords: np.ndarray       # (N,) scatter x for every panel
    partner_coords: np.ndarray    # (N, p) scatter y per partner

    def best_partner(self) -> int:
        return int(self.partners[int(np.argmin(self.pair_rel_frob))])


def effective_ranks(P: np.ndarray, tau: float = 1e-3) -> tuple[int, float, float]:
    """(threshold, stable, entropy) effective ranks of a symmetric PSD matrix.

    threshold: #{lam_i >= tau * lam_max}; stable: sum(lam^2) / lam_max^2;
    entropy: exp(-sum p ln p) with p = lam / sum(lam), zero eigenvalues
    contributing zero. Eigenvalues below -1e-9 * lam_max are rejected as
    non-PSD; small negatives inside that window are clipped.
    """
    if not 0.0 < tau < 1.0:
        raise ValueError("tau must lie in (0, 1)")
    lam = np.linalg.eigvalsh(0.5 * (P + P.T))
    lam_max = float(lam[-1])
    if lam_max <= 0:
        raise ValueError("matrix has no positive eigenvalue")
    if lam[0] < -1e-9 * lam_max:
        raise ValueError(f"matrix is not PSD: min eigenvalue {lam[0]:.3e}")
    lam = np.clip(lam, 0.0, None)

    threshold = int(np.sum(lam >= tau * lam_max))
    stable = float(np.sum(lam * lam) / (lam_max * lam_max))
    p = lam / lam.sum()
    nz = p[p > 0]
    entropy = float(np.exp(-np.sum(nz * np.log(nz))))
    return threshold, stable, entropy


def _widest_window(ok: np.ndarray) -> tuple[int, int]:
    """Largest contiguous run of True; returns (start, stop) half-open."""
    best = (0, 0)
    i = 0
    n = len(ok)
    while i < n:
        if ok[i]:
            j = i
            while j < n and ok[j]:
                j += 1
            if j - i > best[1] - best[0]:
                best = (i, j)
            i = j
        else:
            i += 1
    return best


def rank_scan(D2: np.ndarray, betas: Sequence[float], tau: float = 1e-3) -> RankReport:
    """Effective ranks of exp(-beta D^2) over a beta grid, plus Weyl slope.

    The slope is an ordinary least-squares fit of ln(entropy_rank) against
    ln(beta) over the widest contiguous grid window where
    3 <= entropy_rank <= 0.3 N; if fewer than 3 grid points qualify the slope
    is reported as absent rather than extrapolated.
    """
    betas = np.asarray(list(betas), dtype=float)
    if betas.size < 3 or np.any(np.diff(betas) <= 0) or np.any(betas <= 0):
        raise ValueError("betas must be >= 3 strictly increasing positive values")
    n = D2.shape[0]
    rows = []
    for beta in betas:
        thr, stab, ent = effective_ranks(gaussian_kernel(D2, beta), tau)
        rows.append(RankRow(float(beta), thr, stab, ent))

    ent = np.array([r.entropy_rank for r in rows])
    ok = (ent >= WINDOW_LO) & (ent <= WINDOW_HI_FRAC * n)
    lo, hi = _widest_window(ok)
    if hi - lo < MIN_WINDOW_POINTS:
        return RankReport(rows=tuple(rows), weyl_slope=None, weyl_window=None, fit_r2=None)
    x = np.log(betas[lo:hi])
    y = np.log(ent[lo:hi])
    slope, intercept = np.polyfit(x, y, 1)
    pred = slope * x + intercept
    ss_res = float(np.sum((y - pred) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 0.0
    return RankReport(
        rows=tuple(rows),
        weyl_slope=float(slope),
        weyl_window=(float(betas[lo]), float(betas[hi - 1])),
        fit_r2=float(r2),
    )


def readout_spectrum(fit: ReadoutFit, basis: DiffusionBasis) -> ReadoutSpectrum:
    """Pair each fitted mode's coefficient magnitudes with 1 - lambda.

    The fit must come from a truncation of ``basis``: d coefficients map onto
    modes 1..d of the basis (mode indices reported after dropping the
    stationary mode, so row n corresponds to basis eigenvalue lambda_{n+1}).
    """
    L = fit.fit.L
    d = L.shape[0]
    if L.shape[1] != 2:
        raise ValueError("readout spectrum expects a 2-column chart target")
    if d > basis.n_modes - 1:
        raise ValueError(f"fit has {d} modes but basis holds only {basis.n_modes - 1} nontrivial")
    mu = 1.0 - basis.lambdas[1 : d + 1]
    return ReadoutSpectrum(
        mode=np.arange(d),
        one_minus_lambda=mu,
        coeff_mag_s=np.abs(L[:, 0]),
        coeff_mag_h=np.abs(L[:, 1]),
    )


def novelty_score(base: np.ndarray, partner: np.ndarray, window: int = 20) -> float:
    """Residual-variance ratio of partner after local-linear regression on base.

    For each point, a line is fit over the ``window`` nearest neighbors in
    base value and the partner value is predicted at the point; the score is
    Var(residual) / Var(partner), clipped to [0, 1]. A partner that is any
    smooth function of base scores near 0 (exactly 0 when affine in base); a
    partner varying independently of base scores near 1.
    """
    base = np.asarray(base, dtype=float)
    partner = np.asarray(partner, dtype=float)
    n = base.shape[0]
    if partner.shape[0] != n:
        raise ValueError("base and partner must have equal length")
    var = float(partner.var())
    if var == 0.0:
        return 0.0
    window = min(window, n)
    order = np.argsort(base, kind="stable")
    bs = base[order]
    ps = partner[order]
    resid = np.empty(n)
    half = window // 2
    for pos in range(n):
        lo = max(0, pos - half)
        hi = min(n, lo + window)
        lo = max(0, hi - window)
        xb = bs[lo:hi]
        yb = ps[lo:hi]
        xm = xb.mean()
        xc = xb - xm
        denom = float(xc @ xc)
        if denom < 1e-300:
            pred = yb.mean()
        else:
            slope = float(xc @ yb) / denom
            pred = yb.mean() + slope * (bs[pos] - xm)
        resid[pos] = ps[pos] - pred
    return float(np.clip(resid.var() / var, 0.0, 1.0))


def pair_charts(
    basis: DiffusionBasis,
    base: int,
    partners: Sequence[int],
    Q: np.ndarray,
    window: int = 20,
) -> PairChartReport:
    """Score 2-D charts formed by pairing one diffusion mode with others.

    Mode indices count from the first nontrivial eigenvector (the stationary
    mode is dropped). For each partner j the report carries a novelty score
    (does j vary independently of the base mode?) and the relative Frobenius
    error of the 2-column oracle readout of Q from (base, j).
    """
    n_avail = basis.n_modes - 1
    partners = [int(j) for j in partners]
    for idx in [base, *partners]:
        if not 0 <= idx < n_avail:
            raise ValueError(f"mode index {idx} outside fitted range [0, {n_avail})")
    psi_base = basis.psi[:, base + 1]
    nov = []
    rel = []
    cols = []
    for j in partners:
        psi_j = basis.psi[:, j + 1]
        nov.append(novelty_score(psi_base, psi_j, window))
        emb = Embedding(
            U=np.column_stack([psi_base, psi_j]), method="dmap", d=2,
            meta={"pair": (base, j)},
        )
        rel.append(fit_oracle(emb, Q).rel_frob)
        cols.append(psi_j)
    return PairChartReport(
        base_mode=int(base),
        partners=np.array(partners, dtype=int),
        novelty=np.array(nov),
        pair_rel_frob=np.array(rel),
        base_coords=psi_base.copy(),
        partner_coords=np.column_stack(cols) if cols else np.zeros((basis.psi.shape[0], 0)),
    )
