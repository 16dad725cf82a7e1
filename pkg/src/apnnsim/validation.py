"""k-fold evaluation of the PNN baseline and the threshold-logic variants."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .apnn import ApnnModel, ThresholdPolicy, apnn_classify, build_crossbars, fit_apnn, theta_grid
from .crossbar import ElectricalConfig, analog_forward
from .data import Dataset, kfold, normalize_dataset
from .pnn_ref import SIGMA_GRID, build_pnn, pnn_classify, select_sigma
from .quantizer import QuantizerSpec

METHODS = ("pnn", "pnn-q", "apnn-fixed", "apnn-fixed-q", "apnn-adaptive-q")


@dataclass
class FoldModel:
    fold: int
    train_idx: list[int]
    test_idx: list[int]
    model: object
    hyper: dict
    loo_train_accuracy: float | None = None
    fixed_loo_train_accuracy: float | None = None


@dataclass
class FoldResult:
    fold: int
    n_train: int
    n_test: int
    accuracy: float
    hyper: dict
    confusion: list[list[int]]
    loo_train_accuracy: float | None = None
    fixed_loo_train_accuracy: float | None = None

    def to_dict(self) -> dict:
        return {
            "fold": self.fold,
            "n_train": self.n_train,
            "n_test": self.n_test,
            "accuracy": self.accuracy,
            "hyperparameters": self.hyper,
            "loo_train_accuracy": self.loo_train_accuracy,
            "fixed_loo_train_accuracy": self.fixed_loo_train_accuracy,
            "confusion": self.confusion,
        }


@dataclass
class CVReport:
    method: str
    k: int
    seed: int
    folds: list[FoldResult] = field(default_factory=list)

    @property
    def fold_accuracies(self) -> list[float]:
        return [f.accuracy for f in self.folds]

    @property
    def mean_accuracy(self) -> float:
        return float(np.mean(self.fold_accuracies))

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "k": self.k,
            "seed": self.seed,
            "fold_accuracy": self.fold_accuracies,
            "mean_accuracy": self.mean_accuracy,
            "folds": [f.to_dict() for f in self.folds],
        }


def _check_method(method: str):
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; expected one of {', '.join(METHODS)}")


def fit_folds(d: Dataset, method: str, k: int = 5, seed: int = 42, *,
              quantizer: QuantizerSpec = QuantizerSpec(), grid_size: int | None = None,
              sigma_grid=SIGMA_GRID, fixed_theta: float | None = None) -> list[FoldModel]:
    """Train one model per fold using only that fold's training split.

    ``fixed_theta`` skips threshold training for the APNN methods and uses
    the given value for every class.
    """
    _check_method(method)
    quantized = method.endswith("-q")
    q = quantizer if quantized else None
    nd = normalize_dataset(d)
    split = kfold(d, k, seed)
    grid = theta_grid(grid_size) if grid_size is not None else theta_grid()
    out = []
    for f in range(k):
        train_idx, test_idx = split.train_test(f)
        train = nd.subset(train_idx)
        if method.startswith("pnn"):
            sigma = select_sigma(train, sigma_grid, q)
            out.append(FoldModel(f, train_idx, test_idx, build_pnn(train, sigma, q), {"sigma": sigma}))
        elif fixed_theta is not None:
            model = ApnnModel(build_crossbars(train, q), ThresholdPolicy.fixed(fixed_theta), 1.0, q)
            out.append(FoldModel(f, train_idx, test_idx, model, model.policy.to_dict()))
        else:
            model, fit = fit_apnn(train, quantizer=q, adaptive=method == "apnn-adaptive-q", grid=grid)
            out.append(FoldModel(f, train_idx, test_idx, model, fit.policy.to_dict(),
                                 fit.loo_accuracy, fit.fixed_loo_accuracy))
    return out


def evaluate_folds(d: Dataset, method: str, k: int, seed: int, fold_models: list[FoldModel],
                   electrical: ElectricalConfig | None = None) -> CVReport:
    """Score each fold's held-out samples.

    With ``electrical`` set, APNN models are run through the analog chain;
    the variation generator is keyed by the sample's index in ``d``.
    """
    nd = normalize_dataset(d)
    X, y = nd.X, nd.y
    report = CVReport(method, k, seed)
    for fm in fold_models:
        confusion = np.zeros((d.n_classes, d.n_classes), dtype=int)
        for i in fm.test_idx:
            if isinstance(fm.model, ApnnModel):
                if electrical is not None:
                    pred, _ = analog_forward(fm.model, X[i], electrical, sample_index=i)
                else:
                    pred = apnn_classify(fm.model, X[i])
            else:
                pred = pnn_classify(fm.model, X[i])
            confusion[y[i], pred.label] += 1
        acc = float(np.trace(confusion) / confusion.sum())
        report.folds.append(FoldResult(fm.fold, len(fm.train_idx), len(fm.test_idx), acc, fm.hyper,
                                       confusion.tolist(), fm.loo_train_accuracy,
                                       fm.fixed_loo_train_accuracy))
    return report


def cross_validate(d: Dataset, method: str, k: int = 5, seed: int = 42, *,
                   quantizer: QuantizerSpec = QuantizerSpec(), grid_size: int | None = None,
                   sigma_grid=SIGMA_GRID, fixed_theta: float | None = None,
                   electrical: ElectricalConfig | None = None) -> CVReport:
    folds = fit_folds(d, method, k, seed, quantizer=quantizer, grid_size=grid_size,
                      sigma_grid=sigma_grid, fixed_theta=fixed_theta)
    return evaluate_folds(d, method, k, seed, folds, electrical)
