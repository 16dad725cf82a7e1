"""Threshold-logic approximation of the PNN pattern layer.

The exponential kernel is replaced by a binary test ``|x.w / sigma - 1| < theta``.
Each class crossbar reports the fraction of its stored columns that fire and
a winner-takes-all picks the class. Thresholds are chosen on the training
split by leave-one-out (LOO) accuracy, either one global value or one per class.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import Dataset
from .quantizer import QuantizerSpec, quantize_matrix

DEFAULT_GRID_SIZE = 4096
MAX_SWEEPS = 10


def theta_grid(size: int = DEFAULT_GRID_SIZE) -> np.ndarray:
    """Candidate thresholds ``k/size`` for ``k = 1..size``."""
    if size < 1:
        raise ValueError(f"grid size must be >= 1, got {size}")
    return np.arange(1, size + 1) / size


@dataclass(frozen=True)
class Prediction:
    label: int
    scores: tuple[float, ...]
    activated: bool


def wta(scores) -> int:
    """Index of the largest score; ties go to the lowest index."""
    scores = np.asarray(scores, dtype=float)
    if scores.size == 0:
        raise ValueError("wta needs at least one score")
    return int(np.argmax(scores))


def activation(x, w, sigma: float = 1.0, theta: float = 0.1) -> int:
    """1 if ``|x.w/sigma - 1| < theta`` else 0."""
    if not 0.0 < theta <= 1.0:
        raise ValueError(f"theta must lie in (0, 1], got {theta}")
    if sigma <= 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    x = np.asarray(x, dtype=float)
    w = np.asarray(w, dtype=float)
    if x.shape != w.shape:
        raise ValueError(f"length mismatch: {x.shape} vs {w.shape}")
    return int(abs(float(x @ w) / sigma - 1.0) < theta)


def firing_bits(x, crossbar, theta: float, sigma: float = 1.0) -> np.ndarray:
    """Activation of every column of one crossbar (F x N matrix) at once."""
    x = np.asarray(x, dtype=float)
    crossbar = np.asarray(crossbar, dtype=float)
    if crossbar.ndim != 2 or crossbar.shape[0] != x.shape[0]:
        raise ValueError(f"length mismatch: input {x.shape}, crossbar {crossbar.shape}")
    return (np.abs((x @ crossbar) / sigma - 1.0) < theta).astype(int)


def class_score(x, crossbar, theta_c: float, sigma: float = 1.0) -> float:
    crossbar = np.asarray(crossbar, dtype=float)
    if crossbar.ndim != 2 or crossbar.shape[1] == 0:
        raise ValueError("empty crossbar")
    if not 0.0 < theta_c <= 1.0:
        raise ValueError(f"theta must lie in (0, 1], got {theta_c}")
    bits = firing_bits(x, crossbar, theta_c, sigma)
    return int(bits.sum()) / crossbar.shape[1]


@dataclass(frozen=True)
class ThresholdPolicy:
    """Either one global ``theta`` or a per-class tuple ``thetas``."""

    theta: float | None = None
    thetas: tuple[float, ...] | None = None

    def __post_init__(self):
        if (self.theta is None) == (self.thetas is None):
            raise ValueError("give exactly one of theta or thetas")
        for t in self.values():
            if not 0.0 < t <= 1.0:
                raise ValueError(f"threshold {t} outside (0, 1]")

    @classmethod
    def fixed(cls, theta: float) -> ThresholdPolicy:
        return cls(theta=float(theta))

    @classmethod
    def per_class(cls, thetas) -> ThresholdPolicy:
        return cls(thetas=tuple(float(t) for t in thetas))

    @property
    def kind(self) -> str:
        return "fixed" if self.theta is not None else "per_class"

    def values(self) -> tuple[float, ...]:
        return (self.theta,) if self.theta is not None else self.thetas

    def for_class(self, c: int) -> float:
        return self.theta if self.theta is not None else self.thetas[c]

    def as_array(self, n_classes: int) -> np.ndarray:
        if self.thetas is not None:
            if len(self.thetas) != n_classes:
                raise ValueError(f"policy has {len(self.thetas)} thresholds for {n_classes} classes")
            return np.array(self.thetas)
        return np.full(n_classes, self.theta)

    def to_dict(self) -> dict:
        if self.theta is not None:
            return {"kind": "fixed", "theta": self.theta}
        return {"kind": "per_class", "thetas": list(self.thetas)}


@dataclass(frozen=True, eq=False)
class ApnnModel:
    # one F x N_c matrix per class; columns are stored training samples
    crossbars: tuple[np.ndarray, ...]
    policy: ThresholdPolicy
    sigma: float = 1.0
    quantizer: QuantizerSpec | None = QuantizerSpec()

    def __post_init__(self):
        if not self.crossbars:
            raise ValueError("model needs at least one crossbar")
        for c, xb in enumerate(self.crossbars):
            if xb.ndim != 2 or xb.shape[1] < 1:
                raise ValueError(f"crossbar {c} has no columns")
        self.policy.as_array(len(self.crossbars))

    @property
    def n_classes(self) -> int:
        return len(self.crossbars)

    @property
    def n_features(self) -> int:
        return self.crossbars[0].shape[0]


def build_crossbars(train: Dataset, quantizer: QuantizerSpec | None) -> tuple[np.ndarray, ...]:
    """Stack each class's (normalized) training samples as crossbar columns."""
    X, y = train.X, train.y
    W = quantize_matrix(X, quantizer) if quantizer is not None else X
    return tuple(W[y == c].T.copy() for c in range(train.n_classes))


def apnn_classify(m: ApnnModel, x) -> Prediction:
    x = np.asarray(x, dtype=float)
    if x.shape != (m.n_features,):
        raise ValueError(f"input has shape {x.shape}, model expects ({m.n_features},)")
    scores = tuple(class_score(x, xb, m.policy.for_class(c), m.sigma) for c, xb in enumerate(m.crossbars))
    return Prediction(wta(scores), scores, any(s > 0 for s in scores))


@dataclass(frozen=True, eq=False)
class TrainingSet:
    """Normalized training inputs, the columns stored for them, and labels.

    ``columns[i]`` is what sample ``i`` looks like once written to a crossbar
    (quantized or not); ``inputs[i]`` is how it arrives as a query.
    """

    inputs: np.ndarray
    columns: np.ndarray
    labels: np.ndarray
    n_classes: int

    @classmethod
    def from_dataset(cls, train: Dataset, quantizer: QuantizerSpec | None) -> TrainingSet:
        X = train.X
        W = quantize_matrix(X, quantizer) if quantizer is not None else X
        return cls(X, W, train.y, train.n_classes)


def loo_accuracy(ts: TrainingSet, thetas, sigma: float = 1.0) -> float:
    """Leave-one-out accuracy on the training set, sample by sample.

    Held-out sample ``i`` is scored against every stored column except its own.
    A class left with no columns scores 0. This is the slow reference used to
    check the vectorized search in ``LooTable``.
    """
    thetas = np.asarray(thetas, dtype=float)
    n = len(ts.labels)
    correct = 0
    for i in range(n):
        scores = []
        for c in range(ts.n_classes):
            idx = [j for j in np.flatnonzero(ts.labels == c) if j != i]
            if not idx:
                scores.append(0.0)
                continue
            fired = sum(activation(ts.inputs[i], ts.columns[j], sigma, thetas[c]) for j in idx)
            scores.append(fired / len(idx))
        correct += wta(scores) == ts.labels[i]
    return correct / n


class LooTable:
    """LOO class scores for every sample, class and grid threshold.

    ``frac[c, i, t]`` is the share of class ``c`` columns (sample ``i``'s own
    column excluded) that fire for input ``i`` at threshold ``grid[t]``.
    """

    def __init__(self, ts: TrainingSet, grid, sigma: float = 1.0):
        self.grid = np.asarray(grid, dtype=float)
        self.labels = ts.labels
        self.n_classes = ts.n_classes
        n = len(ts.labels)
        dev = np.abs(ts.inputs @ ts.columns.T / sigma - 1.0)
        np.fill_diagonal(dev, np.inf)
        frac = np.zeros((ts.n_classes, n, len(self.grid)))
        for c in range(ts.n_classes):
            members = ts.labels == c
            d = np.sort(dev[:, members], axis=1)
            # count of columns with dev strictly below each threshold
            counts = np.stack([np.searchsorted(row, self.grid, side="left") for row in d])
            denom = members.sum() - (ts.labels == c)
            with np.errstate(invalid="ignore", divide="ignore"):
                frac[c] = np.where(denom[:, None] > 0, counts / np.maximum(denom, 1)[:, None], 0.0)
        self.frac = frac

    def _correct(self, scores: np.ndarray) -> np.ndarray:
        # scores: (C, n, T) -> number of correct LOO predictions per threshold
        pred = np.argmax(scores, axis=0)
        return (pred == self.labels[:, None]).sum(axis=0)

    def correct_fixed(self) -> np.ndarray:
        """Correct-count for each grid value applied to all classes."""
        return self._correct(self.frac)

    def correct_for(self, t_idx) -> int:
        n = len(self.labels)
        scores = self.frac[np.arange(self.n_classes), :, np.asarray(t_idx)]
        return int((np.argmax(scores, axis=0) == self.labels).sum()) if n else 0

    def correct_varying(self, c: int, t_idx) -> np.ndarray:
        """Correct-count for each grid value of class ``c``, others held at ``t_idx``."""
        t_idx = np.asarray(t_idx)
        base = self.frac[np.arange(self.n_classes), :, t_idx]  # (C, n)
        scores = np.repeat(base[:, :, None], len(self.grid), axis=2)
        scores[c] = self.frac[c]
        return self._correct(scores)


@dataclass(frozen=True)
class ThresholdFit:
    policy: ThresholdPolicy
    loo_accuracy: float
    # LOO accuracy of the best single threshold, the adaptive starting point
    fixed_loo_accuracy: float
    sweeps: int = 0


def train_fixed_threshold(ts: TrainingSet, grid=None, sigma: float = 1.0) -> ThresholdFit:
    """Grid value with the best LOO accuracy; ties go to the smaller threshold."""
    grid = theta_grid() if grid is None else np.asarray(grid, dtype=float)
    table = LooTable(ts, grid, sigma)
    correct = table.correct_fixed()
    best = int(np.argmax(correct))
    acc = correct[best] / len(ts.labels)
    return ThresholdFit(ThresholdPolicy.fixed(grid[best]), acc, acc)


def train_adaptive_thresholds(ts: TrainingSet, grid=None, sigma: float = 1.0,
                              max_sweeps: int = MAX_SWEEPS) -> ThresholdFit:
    """Per-class thresholds by coordinate descent on LOO accuracy.

    Starts from the best global threshold. Classes are visited in ascending
    order; a class adopts the smallest grid value reaching the best LOO
    accuracy, but only when that strictly beats the current accuracy.
    Stops after a sweep without change or ``max_sweeps`` sweeps.
    """
    grid = theta_grid() if grid is None else np.asarray(grid, dtype=float)
    table = LooTable(ts, grid, sigma)
    start = int(np.argmax(table.correct_fixed()))
    t_idx = np.full(ts.n_classes, start)
    initial = table.correct_for(t_idx)
    current = initial
    sweeps = 0
    for sweeps in range(1, max_sweeps + 1):
        changed = False
        for c in range(ts.n_classes):
            correct = table.correct_varying(c, t_idx)
            best = int(np.argmax(correct))
            if correct[best] > current:
                t_idx[c] = best
                current = int(correct[best])
                changed = True
        if not changed:
            break
    assert current >= initial, "adaptive thresholds lost LOO accuracy"
    n = len(ts.labels)
    return ThresholdFit(ThresholdPolicy.per_class(grid[t_idx]), current / n, initial / n, sweeps)


def fit_apnn(train: Dataset, *, quantizer: QuantizerSpec | None, adaptive: bool,
             grid=None, sigma: float = 1.0) -> tuple[ApnnModel, ThresholdFit]:
    """Build crossbars from a normalized training split and train thresholds."""
    ts = TrainingSet.from_dataset(train, quantizer)
    fit = (train_adaptive_thresholds if adaptive else train_fixed_threshold)(ts, grid, sigma)
    model = ApnnModel(build_crossbars(train, quantizer), fit.policy, sigma, quantizer)
    return model, fit
