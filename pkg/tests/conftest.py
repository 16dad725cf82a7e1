from pathlib import Path

import pytest

from apnnsim.data import load_csv, normalize_dataset

ROOT = Path(__file__).resolve().parents[1]
IRIS_CSV = ROOT / "data" / "iris.csv"


@pytest.fixture(scope="session")
def iris():
    return load_csv(IRIS_CSV)


@pytest.fixture(scope="session")
def iris_norm(iris):
    return normalize_dataset(iris)
