"""Dataset ingestion, unit normalization and stratified fold splitting."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np


class DataError(ValueError):
    """Malformed dataset, failed normalization or impossible split."""


@dataclass(frozen=True)
class Sample:
    features: tuple[float, ...]
    label: int

    def __post_init__(self):
        if len(self.features) == 0:
            raise DataError("sample has no features")
        if not all(math.isfinite(v) for v in self.features):
            raise DataError(f"non-finite feature in {self.features}")


@dataclass(frozen=True)
class Dataset:
    samples: tuple[Sample, ...]
    n_features: int
    n_classes: int
    # original label text for each dense class id
    label_names: tuple[str, ...] = ()

    def __post_init__(self):
        if self.n_classes < 2:
            raise DataError(f"need at least 2 classes, got {self.n_classes}")
        counts = [0] * self.n_classes
        for i, s in enumerate(self.samples):
            if len(s.features) != self.n_features:
                raise DataError(f"sample {i} has {len(s.features)} features, expected {self.n_features}")
            if not 0 <= s.label < self.n_classes:
                raise DataError(f"sample {i} label {s.label} outside [0, {self.n_classes})")
            counts[s.label] += 1
        empty = [c for c, n in enumerate(counts) if n == 0]
        if empty:
            raise DataError(f"classes without samples: {empty}")

    def __len__(self):
        return len(self.samples)

    @property
    def X(self) -> np.ndarray:
        return np.array([s.features for s in self.samples], dtype=float)

    @property
    def y(self) -> np.ndarray:
        return np.array([s.label for s in self.samples], dtype=int)

    def class_counts(self) -> list[int]:
        return np.bincount(self.y, minlength=self.n_classes).tolist()

    def subset(self, indices) -> Dataset:
        return Dataset(
            samples=tuple(self.samples[i] for i in indices),
            n_features=self.n_features,
            n_classes=self.n_classes,
            label_names=self.label_names,
        )

    @classmethod
    def from_arrays(cls, X, y, n_classes: int | None = None) -> Dataset:
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=int)
        if n_classes is None:
            n_classes = int(y.max()) + 1
        samples = tuple(Sample(tuple(float(v) for v in row), int(lab)) for row, lab in zip(X, y))
        return cls(samples, X.shape[1], n_classes)


@dataclass(frozen=True)
class FoldSplit:
    k: int
    folds: tuple[tuple[int, ...], ...]
    seed: int

    def train_test(self, fold: int) -> tuple[list[int], list[int]]:
        """Indices of the training folds and of the held-out fold, both sorted."""
        test = sorted(self.folds[fold])
        train = sorted(i for j, f in enumerate(self.folds) if j != fold for i in f)
        return train, test

    def fold_of(self) -> dict[int, int]:
        return {i: j for j, f in enumerate(self.folds) for i in f}


def _is_number(text: str) -> bool:
    try:
        float(text)
    except ValueError:
        return False
    return True


def load_csv(path) -> Dataset:
    """Read ``F`` numeric columns followed by a label column.

    A first row with a non-numeric feature field is treated as a header.
    Labels are re-indexed densely in order of first appearance; the original
    strings are kept in ``Dataset.label_names``.
    """
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        rows = [(n, r) for n, r in enumerate(csv.reader(fh), start=1) if any(c.strip() for c in r)]
    if not rows:
        raise DataError(f"{path}: empty file")
    first_no, first = rows[0]
    if len(first) >= 2 and not all(_is_number(c) for c in first[:-1]):
        rows = rows[1:]
    if not rows:
        raise DataError(f"{path}: no data rows after header")

    width = len(rows[0][1])
    if width < 2:
        raise DataError(f"{path}: row {rows[0][0]} needs at least one feature and a label")
    names: dict[str, int] = {}
    samples = []
    for row_no, row in rows:
        if len(row) != width:
            raise DataError(f"{path}: ragged row {row_no} has {len(row)} fields, expected {width}")
        try:
            feats = tuple(float(c) for c in row[:-1])
        except ValueError:
            raise DataError(f"{path}: non-numeric feature in row {row_no}") from None
        label = row[-1].strip()
        samples.append(Sample(feats, names.setdefault(label, len(names))))
    if len(names) < 2:
        raise DataError(f"{path}: fewer than 2 classes ({len(names)})")
    return Dataset(tuple(samples), width - 1, len(names), tuple(names))


def unit_normalize(s: Sample, index: int | None = None) -> Sample:
    """Scale the feature vector to unit L2 norm."""
    norm = math.sqrt(math.fsum(v * v for v in s.features))
    if norm == 0.0:
        where = f" {index}" if index is not None else ""
        raise DataError(f"cannot normalize zero-vector sample{where}")
    return Sample(tuple(v / norm for v in s.features), s.label)


def normalize_dataset(d: Dataset) -> Dataset:
    return Dataset(
        tuple(unit_normalize(s, i) for i, s in enumerate(d.samples)),
        d.n_features,
        d.n_classes,
        d.label_names,
    )


def kfold(d: Dataset, k: int, seed: int) -> FoldSplit:
    """Stratified k-fold split.

    Each class is shuffled with a generator seeded by ``seed`` and dealt
    round-robin into the folds; the dealing position carries over between
    classes so fold sizes stay within one of each other.
    """
    if k < 2:
        raise DataError(f"k must be >= 2, got {k}")
    counts = d.class_counts()
    for c, n in enumerate(counts):
        if n < k:
            raise DataError(f"class {c} has {n} samples, fewer than k={k}")
    rng = np.random.default_rng(seed)
    y = d.y
    folds: list[list[int]] = [[] for _ in range(k)]
    pos = 0
    for c in range(d.n_classes):
        for i in rng.permutation(np.flatnonzero(y == c)):
            folds[pos % k].append(int(i))
            pos += 1
    return FoldSplit(k, tuple(tuple(sorted(f)) for f in folds), seed)


def write_folds_csv(split: FoldSplit, path) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["sample_index", "fold_id"])
        for i, j in sorted(split.fold_of().items()):
            w.writerow([i, j])
