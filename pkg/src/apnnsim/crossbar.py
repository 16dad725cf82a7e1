"""Behavioral model of the analog read-out chain.

Per class crossbar, columns are read one at a time: weights become
conductances, the column current passes an ideal current buffer into a
transimpedance stage (IVC), a comparator tests the IVC voltage against the
calibrated threshold, the comparator bits of a crossbar are averaged, and a
Vref-gated winner-takes-all produces one 1 V line.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field, replace

import numpy as np

from .apnn import ApnnModel, Prediction, wta

IDEAL = "ideal"
CIRCUIT_ANCHORED = "circuit_anchored"
# slope-1 fit through the single stated calibration point: 0.4 V level -> Vth 0.1 V
ANCHOR_OFFSET = 0.3


@dataclass(frozen=True)
class ElectricalConfig:
    r_ivc: float = 200e3
    g_unit: float | None = None  # defaults to 1 / r_ivc
    v_scale: float = 1.0
    vref_wta: float = 0.3
    calibration: str = IDEAL
    variation_sigma: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.g_unit is None:
            object.__setattr__(self, "g_unit", 1.0 / self.r_ivc)
        if self.r_ivc <= 0 or self.g_unit <= 0 or self.v_scale <= 0:
            raise ValueError("r_ivc, g_unit and v_scale must be positive")
        if self.variation_sigma < 0:
            raise ValueError(f"variation_sigma must be >= 0, got {self.variation_sigma}")
        if self.calibration not in (IDEAL, CIRCUIT_ANCHORED):
            raise ValueError(f"unknown calibration {self.calibration!r}")

    def with_(self, **changes) -> ElectricalConfig:
        return replace(self, **changes)

    def to_dict(self) -> dict:
        return {
            "r_ivc": self.r_ivc,
            "g_unit": self.g_unit,
            "v_scale": self.v_scale,
            "vref_wta": self.vref_wta,
            "calibration": self.calibration,
            "variation_sigma": self.variation_sigma,
            "seed": self.seed,
        }


def weight_to_conductance(q, cfg: ElectricalConfig = ElectricalConfig()):
    q_arr = np.asarray(q, dtype=float)
    if np.any((q_arr < 0) | (q_arr > 1)):
        raise ValueError("weights must lie in [0, 1]")
    g = q_arr * cfg.g_unit
    return float(g) if g.ndim == 0 else g


def column_current(x, conductances, cfg: ElectricalConfig = ElectricalConfig()) -> float:
    """Read current of the selected column: sum of row voltage times conductance."""
    x = np.asarray(x, dtype=float)
    g = np.asarray(conductances, dtype=float)
    if x.shape != g.shape:
        raise ValueError(f"length mismatch: {x.shape} vs {g.shape}")
    return float((x * cfg.v_scale) @ g)


def ivc_voltage(i: float, cfg: ElectricalConfig = ElectricalConfig()) -> float:
    # the buffer's sign inversion is folded in: a positive current gives a positive voltage
    return i * cfg.r_ivc


def map_theta_to_vth(theta: float, cfg: ElectricalConfig = ElectricalConfig()) -> float:
    """Comparator threshold voltage for a firing tolerance ``theta``."""
    if not 0.0 < theta <= 1.0:
        raise ValueError(f"theta must lie in (0, 1], got {theta}")
    level = 1.0 - theta
    if cfg.calibration == IDEAL:
        return level
    return max(level - ANCHOR_OFFSET, 0.0)


def _upper_edge(theta: float, cfg: ElectricalConfig) -> float:
    # upper edge of the firing window, shifted by the same calibration offset
    edge = 1.0 + theta
    return edge if cfg.calibration == IDEAL else edge - ANCHOR_OFFSET


def comparator(v: float, vth: float) -> int:
    return int(v > vth)


def window_comparator(v: float, lo: float, hi: float) -> int:
    """Two comparators: fires for ``lo < v < hi``."""
    return comparator(v, lo) & comparator(hi, v)


def inject_variation(conductances, cfg: ElectricalConfig, rng: np.random.Generator | None = None):
    """Multiplicative Gaussian device variation, clamped to ``[0, g_unit]``."""
    g = np.asarray(conductances, dtype=float)
    if cfg.variation_sigma == 0:
        return g.copy()
    if rng is None:
        rng = np.random.default_rng(cfg.seed)
    eps = rng.normal(0.0, cfg.variation_sigma, size=g.shape)
    return np.clip(g * (1.0 + eps), 0.0, cfg.g_unit)


def wta_analog(mean_voltages, cfg: ElectricalConfig = ElectricalConfig()) -> tuple[float, ...]:
    """1.0 V on the argmax class if it reaches ``vref_wta``, 0.0 V everywhere else."""
    v = np.asarray(mean_voltages, dtype=float)
    if v.size == 0:
        raise ValueError("wta_analog needs at least one class")
    out = [0.0] * v.size
    winner = wta(v)
    if v[winner] >= cfg.vref_wta:
        out[winner] = 1.0
    return tuple(out)


@dataclass(frozen=True)
class ColumnRecord:
    step: int
    cls: int
    column: int
    current: float
    v_ivc: float
    comp_bit: int


@dataclass
class AnalogTrace:
    columns: list[ColumnRecord] = field(default_factory=list)
    mean_v: list[float] = field(default_factory=list)
    wta_v: tuple[float, ...] = ()

    def bits(self, cls: int) -> np.ndarray:
        return np.array([r.comp_bit for r in self.columns if r.cls == cls], dtype=int)

    def currents(self, cls: int) -> np.ndarray:
        return np.array([r.current for r in self.columns if r.cls == cls])

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["step", "class", "column", "current_A", "v_ivc_V", "comp_bit"])
        for r in self.columns:
            w.writerow([r.step, r.cls, r.column, f"{r.current:.8e}", f"{r.v_ivc:.8e}", r.comp_bit])
        w.writerow(["class", "mean_v_V", "wta_V"])
        for c, (m, o) in enumerate(zip(self.mean_v, self.wta_v)):
            w.writerow([c, f"{m:.8e}", f"{o:.8e}"])
        return buf.getvalue()


def analog_forward(m: ApnnModel, x, cfg: ElectricalConfig = ElectricalConfig(),
                   sample_index: int = 0) -> tuple[Prediction, AnalogTrace]:
    """Run one input through every crossbar column in read order.

    With variation enabled the generator is seeded from ``(cfg.seed,
    sample_index)`` so each inference is reproducible on its own.
    """
    x = np.asarray(x, dtype=float)
    if x.shape != (m.n_features,):
        raise ValueError(f"input has shape {x.shape}, model expects ({m.n_features},)")
    rng = np.random.default_rng([cfg.seed, sample_index]) if cfg.variation_sigma > 0 else None
    trace = AnalogTrace()
    step = 0
    for c, xb in enumerate(m.crossbars):
        theta = m.policy.for_class(c)
        lo = map_theta_to_vth(theta, cfg)
        hi = _upper_edge(theta, cfg)
        G = inject_variation(weight_to_conductance(xb, cfg), cfg, rng)
        # the column is read sequentially; the stored bits are averaged afterwards
        bits = []
        for j in range(G.shape[1]):
            i_col = column_current(x, G[:, j], cfg)
            v = ivc_voltage(i_col, cfg)
            bit = window_comparator(v, lo, hi)
            trace.columns.append(ColumnRecord(step, c, j, i_col, v, bit))
            bits.append(bit)
            step += 1
        trace.mean_v.append(sum(bits) / len(bits))
    trace.wta_v = wta_analog(trace.mean_v, cfg)
    # class read from the WTA lines; with no line high, fall back to the stored means
    if any(v > 0 for v in trace.wta_v):
        label = trace.wta_v.index(1.0)
    else:
        label = wta(trace.mean_v)
    pred = Prediction(label, tuple(trace.mean_v), any(v > 0 for v in trace.mean_v))
    return pred, trace
