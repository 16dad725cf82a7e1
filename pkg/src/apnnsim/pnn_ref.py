"""Conventional PNN with the exponential pattern kernel, used as the baseline."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from .apnn import Prediction, wta
from .data import Dataset
from .quantizer import QuantizerSpec, quantize_matrix

SIGMA_GRID = (0.01, 0.02, 0.05, 0.1, 0.2, 0.5, 1.0)


def pattern_output(x, w, sigma: float) -> float:
    """Pattern-layer kernel ``exp((x.w - 1)/sigma^2) / sqrt(2 pi sigma^2)``."""
    if sigma <= 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    x = np.asarray(x, dtype=float)
    w = np.asarray(w, dtype=float)
    if x.shape != w.shape:
        raise ValueError(f"length mismatch: {x.shape} vs {w.shape}")
    return math.exp((float(x @ w) - 1.0) / sigma**2) / math.sqrt(2 * math.pi * sigma**2)


@dataclass(frozen=True, eq=False)
class PnnModel:
    class_weights: tuple[np.ndarray, ...]
    sigma: float
    quantized: bool = False

    def __post_init__(self):
        if self.sigma <= 0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")

    @property
    def n_features(self) -> int:
        return self.class_weights[0].shape[0]


def build_pnn(train: Dataset, sigma: float, quantizer: QuantizerSpec | None = None) -> PnnModel:
    X, y = train.X, train.y
    W = quantize_matrix(X, quantizer) if quantizer is not None else X
    return PnnModel(tuple(W[y == c].T.copy() for c in range(train.n_classes)), sigma, quantizer is not None)


def _log_class_scores(x, weights, sigma: float) -> np.ndarray:
    # log of the per-class mean pattern output; argmax-safe where exp underflows
    log_pref = -0.5 * math.log(2 * math.pi * sigma**2)
    out = []
    for W in weights:
        a = (x @ W - 1.0) / sigma**2
        out.append(logsumexp(a) - math.log(W.shape[1]) + log_pref)
    return np.array(out)


def pnn_classify(m: PnnModel, x) -> Prediction:
    """Average the kernel over each class's stored columns and take the argmax.

    The decision is taken on log scores; the reported scores are their
    exponentials and may under- or overflow for very small sigma.
    """
    x = np.asarray(x, dtype=float)
    if x.shape != (m.n_features,):
        raise ValueError(f"input has shape {x.shape}, model expects ({m.n_features},)")
    log_s = _log_class_scores(x, m.class_weights, m.sigma)
    with np.errstate(over="ignore", under="ignore"):
        scores = tuple(float(v) for v in np.exp(log_s))
    return Prediction(wta(log_s), scores, any(s > 0 for s in scores))


def loo_accuracy(inputs, columns, labels, n_classes: int, sigma: float) -> float:
    """LOO accuracy of the PNN on its own training set, own column excluded."""
    inputs = np.asarray(inputs, dtype=float)
    columns = np.asarray(columns, dtype=float)
    labels = np.asarray(labels)
    A = (inputs @ columns.T - 1.0) / sigma**2
    np.fill_diagonal(A, -np.inf)
    n = len(labels)
    logs = np.full((n, n_classes), -np.inf)
    for c in range(n_classes):
        members = labels == c
        sizes = members.sum() - members
        with np.errstate(divide="ignore"):
            logs[:, c] = logsumexp(A[:, members], axis=1) - np.log(sizes)
    logs[np.isnan(logs)] = -np.inf
    return float(np.mean(np.argmax(logs, axis=1) == labels))


def select_sigma(train: Dataset, grid=SIGMA_GRID, quantizer: QuantizerSpec | None = None) -> float:
    """Grid sigma with the best LOO accuracy on ``train``; ties go to the smaller sigma.

    ``train`` must already be unit-normalized. Held-out samples are queried
    unquantized against (optionally quantized) stored columns.
    """
    grid = sorted(grid)
    if not grid:
        raise ValueError("empty sigma grid")
    X = train.X
    W = quantize_matrix(X, quantizer) if quantizer is not None else X
    accs = [loo_accuracy(X, W, train.y, train.n_classes, s) for s in grid]
    return grid[int(np.argmax(accs))]
