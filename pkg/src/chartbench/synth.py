"""Ground-truth Swiss-roll generator.

Points are sampled uniformly on a [0, W] x [0, H] sheet and embedded
isometrically in R^3 by bending the s axis along an arc-length parametrized
Archimedean spiral r(theta) = a + b*theta. Because the parametrization is by
arc length, intrinsic sheet distances are preserved exactly (up to the
numerical tolerance of the arc-length inversion).

Randomness comes from numpy's PCG64 via ``np.random.default_rng(seed)``; the
sheet is drawn as ``rng.random((n, 2)) * [w, h]``, which makes regeneration
bit-identical for equal (n, w, h, seed).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

__all__ = [
    "SheetChart",
    "SpiralParams",
    "Dataset",
    "sample_sheet",
    "roll",
    "spiral_arc_length",
    "invert_arc_length",
    "verify_isometry",
]

# relative tolerance of the arc-length inversion, scaled by the sheet width
ARCLEN_RTOL = 1e-10


@dataclass(frozen=True)
class SpiralParams:
    """Archimedean spiral r(theta) = a + b*theta; both a and b must be > 0
    so the spiral is injective and the roll never self-intersects."""

    a: float = 1.0
    b: float = 0.5

    def __post_init__(self) -> None:
        if not (self.a > 0 and self.b > 0):
            raise ValueError("spiral parameters a, b must be strictly positive")


@dataclass(frozen=True)
class SheetChart:
    """Intrinsic coordinates Q[:, 0] = s in [0, W], Q[:, 1] = h in [0, H]."""

    Q: np.ndarray
    W: float
    H: float
    seed: int

    def __post_init__(self) -> None:
        Q = self.Q
        if Q.ndim != 2 or Q.shape[1] != 2:
            raise ValueError("Q must be N x 2")
        if not (self.W > 0 and self.H > 0):
            raise ValueError("W and H must be positive")
        s, h = Q[:, 0], Q[:, 1]
        if s.size and not ((s >= 0).all() and (s <= self.W).all()
                           and (h >= 0).all() and (h <= self.H).all()):
            raise ValueError("chart coordinates outside [0,W] x [0,H]")


@dataclass(frozen=True)
class Dataset:
    """Ambient cloud X (N x 3) plus the chart and spiral that produced it."""

    X: np.ndarray
    chart: SheetChart
    spiral: SpiralParams

    def __post_init__(self) -> None:
        if self.X.shape != (self.chart.Q.shape[0], 3):
            raise ValueError("X must be N x 3 with N matching the chart")


def sample_sheet(n: int, w: float, h: float, seed: int) -> SheetChart:
    """n i.i.d. uniform points on [0, w] x [0, h] from PCG64(seed)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if not (w > 0 and h > 0):
        raise ValueError("w and h must be positive")
    rng = np.random.default_rng(seed)
    Q = rng.random((n, 2)) * np.array([w, h])
    return SheetChart(Q=Q, W=float(w), H=float(h), seed=int(seed))


def spiral_arc_length(theta, spiral: SpiralParams):
    """Closed-form arc length of r = a + b*t from t = 0 to t = theta.

    With r = a + b*t, ds = sqrt(r^2 + b^2) dt; the antiderivative is
    (r sqrt(r^2+b^2) + b^2 asinh(r/b)) / (2b).
    """
    a, b = spiral.a, spiral.b
    r = a + b * np.asarray(theta, dtype=float)

    def F(rv):
        return (rv * np.sqrt(rv * rv + b * b) + b * b * np.arcsinh(rv / b)) / (2 * b)

    return F(r) - F(a)


def invert_arc_length(s, spiral: SpiralParams, w_scale: float | None = None):
    """Solve spiral_arc_length(theta) = s for each s >= 0.

    Newton iterations safeguarded by a bisection bracket; converges to
    |arclen(theta) - s| <= ARCLEN_RTOL * max(w_scale, 1). Arc length is
    strictly increasing so the solve cannot fail.
    """
    s = np.asarray(s, dtype=float)
    if np.any(s < 0):
        raise ValueError("arc length must be nonnegative")
    tol = ARCLEN_RTOL * max(1.0, w_scale if w_scale is not None else float(s.max(initial=0.0)))
    a, b = spiral.a, spiral.b

    hi = np.ones_like(s)
    for _ in range(200):
        mask = spiral_arc_length(hi, spiral) < s
        if not mask.any():
            break
        hi[mask] *= 2.0
    lo = np.zeros_like(s)
    # crude initial guess from the large-theta quadratic behaviour
    theta = np.minimum(hi, np.sqrt(2.0 * s / b + (a / b) ** 2) - a / b)

    for _ in range(200):
        f = spiral_arc_length(theta, spiral) - s
        done = np.abs(f) <= tol
        if done.all():
            break
        hi = np.where(f > 0, theta, hi)
        lo = np.where(f < 0, theta, lo)
        deriv = np.sqrt((a + b * theta) ** 2 + b * b)
        step = theta - f / deriv
        inside = (step > lo) & (step < hi)
        theta = np.where(done, theta, np.where(inside, step, 0.5 * (lo + hi)))
    return theta


def _roll_map(spiral: SpiralParams, w_scale: float) -> Callable[[np.ndarray], np.ndarray]:
    def embed(Q: np.ndarray) -> np.ndarray:
        Q = np.atleast_2d(np.asarray(Q, dtype=float))
        theta = invert_arc_length(Q[:, 0], spiral, w_scale=w_scale)
        r = spiral.a + spiral.b * theta
        return np.column_stack([r * np.cos(theta), r * np.sin(theta), Q[:, 1]])

    return embed


def roll(chart: SheetChart, spiral: SpiralParams = SpiralParams()) -> Dataset:
    """Embed the sheet isometrically: s runs along the spiral arc, h along z."""
    X = _roll_map(spiral, chart.W)(chart.Q)
    return Dataset(X=X, chart=chart, spiral=spiral)


def verify_isometry(
    ds: Dataset,
    step: float,
    embed: Callable[[np.ndarray], np.ndarray] | None = None,
    max_probes: int = 200,
) -> float:
    """Numerically check that the embedding map is an isometry of the sheet.

    Probes central differences of the map at up to ``max_probes`` chart rows
    (chosen deterministically, shrunk away from the sheet boundary by
    ``step``) and returns the worst of | |dX/ds| - 1 |, | |dX/dh| - 1 | and
    |<dX/ds, dX/dh>|. By default the probed map is the dataset's own spiral
    roll; pass ``embed`` to check any other map (e.g. for datasets built with
    a custom embedding).
    """
    if step <= 0:
        raise ValueError("step must be positive")
    if embed is None:
        embed = _roll_map(ds.spiral, ds.chart.W)
    Q = ds.chart.Q
    n = Q.shape[0]
    take = np.linspace(0, n - 1, num=min(n, max_probes), dtype=int)
    P = Q[take].copy()
    P[:, 0] = np.clip(P[:, 0], step, ds.chart.W - step)
    P[:, 1] = np.clip(P[:, 1], step, ds.chart.H - step)

    def central_diff(col):
        hi = P.copy()
        lo = P.copy()
        hi[:, col] += step
        lo[:, col] -= step
        # divide by the achieved spacing, which is exact in floating point,
        # so affine maps probe exactly
        spacing = hi[:, col] - lo[:, col]
        return (embed(hi) - embed(lo)) / spacing[:, None]

    ds_vec = central_diff(0)
    dh_vec = central_diff(1)
    dev_s = np.abs(np.linalg.norm(ds_vec, axis=1) - 1.0)
    dev_h = np.abs(np.linalg.norm(dh_vec, axis=1) - 1.0)
    dev_x = np.abs(np.sum(ds_vec * dh_vec, axis=1))
    return float(max(dev_s.max(), dev_h.max(), dev_x.max()))
