"""Run configuration: built-in defaults, optionally a JSON file, then CLI flags."""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

from .apnn import DEFAULT_GRID_SIZE
from .crossbar import ElectricalConfig
from .quantizer import QuantizerSpec
from .validation import METHODS

SWEEP_PARAMETERS = ("theta", "variation_sigma", "n_levels")


@dataclass
class RunConfig:
    data: str | None = None
    method: str = "apnn-adaptive-q"
    k: int = 5
    seed: int = 42
    out: str | None = None
    n_levels: int = 16
    range_lo: float = 0.0
    range_hi: float = 1.0
    theta_grid_size: int = DEFAULT_GRID_SIZE
    electrical: dict = field(default_factory=dict)
    # sweep
    parameter: str | None = None
    values: list = field(default_factory=list)
    n_seeds: int = 20
    # trace
    sample_index: int = 0
    train_per_class: int = 10
    theta: float | None = None
    # cost
    classes: int = 3
    cost_overrides: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}; expected one of {', '.join(METHODS)}")
        if self.k < 2:
            raise ValueError(f"k must be >= 2, got {self.k}")
        if self.parameter is not None and self.parameter not in SWEEP_PARAMETERS:
            raise ValueError(f"unknown sweep parameter {self.parameter!r}; expected one of {', '.join(SWEEP_PARAMETERS)}")

    @property
    def quantizer(self) -> QuantizerSpec:
        return QuantizerSpec(self.n_levels, self.range_lo, self.range_hi)

    def electrical_config(self) -> ElectricalConfig:
        return ElectricalConfig(**self.electrical)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["electrical"] = self.electrical_config().to_dict()
        return d


def load_config_file(path) -> dict:
    with Path(path).open(encoding="utf-8") as fh:
        raw = json.load(fh)
    if not isinstance(raw, dict):
        raise ValueError(f"{path}: config must be a JSON object")
    known = {f.name for f in fields(RunConfig)}
    unknown = set(raw) - known
    if unknown:
        raise ValueError(f"{path}: unknown config keys {sorted(unknown)}")
    return raw


def resolve(file_values: dict, flag_values: dict) -> RunConfig:
    """Merge layers; flags left as ``None`` do not override the file."""
    merged = dict(file_values)
    for key, val in flag_values.items():
        if val is None:
            continue
        if key == "electrical":
            merged["electrical"] = {**merged.get("electrical", {}), **val}
        else:
            merged[key] = val
    return RunConfig(**merged)


def write_atomic(path, text: str) -> None:
    """Write to a temp file beside ``path`` and rename it into place."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise


def dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"
