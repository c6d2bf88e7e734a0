"""Common container for low-dimensional representations."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

__all__ = ["Embedding"]


@dataclass(frozen=True)
class Embedding:
    """An N x d coordinate matrix tagged with the method that produced it."""

    U: np.ndarray
    method: str  # "dmap" | "isomap" | "umap"
    d: int
    meta: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.U.ndim != 2 or self.U.shape[1] != self.d:
            raise ValueError("U must be N x d")
        if not np.all(np.isfinite(self.U)):
            raise ValueError("embedding contains non-finite entries")
