"""Uniform multi-level weight quantizer standing in for the GST memristor state set."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class QuantizerSpec:
    n_levels: int = 16
    range_lo: float = 0.0
    range_hi: float = 1.0

    def __post_init__(self):
        if self.n_levels < 2:
            raise ValueError(f"n_levels must be >= 2, got {self.n_levels}")
        if not self.range_lo < self.range_hi:
            raise ValueError(f"empty range [{self.range_lo}, {self.range_hi}]")

    @property
    def step(self) -> float:
        return (self.range_hi - self.range_lo) / (self.n_levels - 1)

    def levels(self) -> np.ndarray:
        k = np.arange(self.n_levels)
        return self.range_lo + k * (self.range_hi - self.range_lo) / (self.n_levels - 1)

    def to_dict(self) -> dict:
        return {"n_levels": self.n_levels, "range_lo": self.range_lo, "range_hi": self.range_hi}


def _level_index(w, q: QuantizerSpec):
    # floor(t + 0.5) sends exact midpoints to the upper level
    t = (np.clip(w, q.range_lo, q.range_hi) - q.range_lo) / (q.range_hi - q.range_lo) * (q.n_levels - 1)
    return np.clip(np.floor(t + 0.5), 0, q.n_levels - 1)


def quantize(w: float, q: QuantizerSpec = QuantizerSpec()) -> float:
    """Nearest level to ``w``, clamping out-of-range values to the end levels."""
    if not math.isfinite(w):
        raise ValueError(f"cannot quantize non-finite value {w!r}")
    k = int(_level_index(w, q))
    return q.range_lo + k * (q.range_hi - q.range_lo) / (q.n_levels - 1)


def quantize_matrix(W, q: QuantizerSpec = QuantizerSpec()) -> np.ndarray:
    W = np.asarray(W, dtype=float)
    if not np.all(np.isfinite(W)):
        raise ValueError("cannot quantize matrix with non-finite entries")
    k = _level_index(W, q)
    return q.range_lo + k * (q.range_hi - q.range_lo) / (q.n_levels - 1)


def is_level(w, q: QuantizerSpec = QuantizerSpec()) -> np.ndarray:
    """True where ``w`` is exactly one of the level values."""
    w = np.asarray(w, dtype=float)
    return np.isin(w, q.levels())
