import csv
import io

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from apnnsim.apnn import ApnnModel, ThresholdPolicy, apnn_classify, firing_bits
from apnnsim.cli import trace_model
from apnnsim.config import RunConfig
from apnnsim.crossbar import (
    CIRCUIT_ANCHORED,
    ElectricalConfig,
    analog_forward,
    column_current,
    comparator,
    inject_variation,
    ivc_voltage,
    map_theta_to_vth,
    weight_to_conductance,
    wta_analog,
)
from apnnsim.quantizer import quantize_matrix

from conftest import IRIS_CSV

CFG = ElectricalConfig()
R = 200e3


def test_defaults():
    assert CFG.g_unit == 1 / R
    assert CFG.vref_wta == 0.3
    with pytest.raises(ValueError):
        ElectricalConfig(variation_sigma=-0.1)
    with pytest.raises(ValueError):
        ElectricalConfig(calibration="spice")


@pytest.mark.parametrize("q,g", [(0.0, 0.0), (1.0, 5.0e-6), (8 / 15, 8 / 15 * 5e-6)])
def test_weight_to_conductance(q, g):
    assert weight_to_conductance(q) == pytest.approx(g, rel=1e-15, abs=0)


def test_weight_to_conductance_range():
    with pytest.raises(ValueError):
        weight_to_conductance(1.5)


def test_column_current_examples():
    assert column_current(np.zeros(4), np.full(4, 5e-6)) == 0.0
    assert column_current([1, 0, 0, 0], weight_to_conductance(np.array([1.0, 0, 0, 0]))) == pytest.approx(5e-6)
    x = np.array([5.1, 3.5, 1.4, 0.2])
    x /= np.linalg.norm(x)
    wq = quantize_matrix(x)
    dot = sum(a * b for a, b in zip(x.tolist(), wq.tolist()))
    assert column_current(x, weight_to_conductance(wq)) == pytest.approx(dot / R, rel=1e-14)
    with pytest.raises(ValueError):
        column_current([1, 0], [1e-6])


@pytest.mark.parametrize("i,v", [(0.0, 0.0), (5e-6, 1.0), (1e-6, 0.2)])
def test_ivc(i, v):
    assert ivc_voltage(i) == pytest.approx(v, rel=1e-15)


@settings(max_examples=50)
@given(st.integers(0, 2**31))
def test_column_current_linear(seed):
    rng = np.random.default_rng(seed)
    x1, x2 = rng.random(4), rng.random(4)
    g1, g2 = rng.random(4) * 5e-6, rng.random(4) * 5e-6
    a = rng.uniform(0.1, 3)
    scale = 5e-6
    assert abs(column_current(x1 + x2, g1) - column_current(x1, g1) - column_current(x2, g1)) < 1e-12 * scale
    assert abs(column_current(x1, g1 + g2) - column_current(x1, g1) - column_current(x1, g2)) < 1e-12 * scale
    assert abs(column_current(a * x1, g1) - a * column_current(x1, g1)) < 1e-12 * scale
    assert abs(column_current(x1, a * g1) - a * column_current(x1, g1)) < 1e-12 * scale


def test_vth_mapping():
    assert map_theta_to_vth(0.6) == pytest.approx(0.4)
    anchored = ElectricalConfig(calibration=CIRCUIT_ANCHORED)
    assert map_theta_to_vth(0.6, anchored) == pytest.approx(0.1)
    assert map_theta_to_vth(0.5, anchored) == pytest.approx(0.2)
    assert map_theta_to_vth(0.9, anchored) == 0.0
    with pytest.raises(ValueError):
        map_theta_to_vth(0.0)


def test_comparator():
    assert comparator(0.5, 0.4) == 1
    assert comparator(0.4, 0.4) == 0
    assert comparator(0.0, 0.0) == 0


def test_variation_noop_and_deterministic():
    g = np.linspace(0, 5e-6, 12).reshape(3, 4)
    np.testing.assert_array_equal(inject_variation(g, CFG), g)
    cfg = CFG.with_(variation_sigma=0.1, seed=7)
    a, b = inject_variation(g, cfg), inject_variation(g, cfg)
    np.testing.assert_array_equal(a, b)
    assert not np.array_equal(a, g)
    assert a.min() >= 0 and a.max() <= cfg.g_unit


def test_variation_statistics():
    # mid-range conductance so clamping never triggers at this sigma
    g = np.full(10_000, 0.5 * CFG.g_unit)
    out = inject_variation(g, CFG.with_(variation_sigma=0.05, seed=3))
    eps = out / g - 1
    assert abs(eps.std(ddof=1) - 0.05) < 0.05 * 0.05


@pytest.mark.parametrize(
    "means,out",
    [((0.9, 0.1, 0.2), (1.0, 0.0, 0.0)), ((0.2, 0.25, 0.1), (0.0, 0.0, 0.0)), ((0.5, 0.5, 0.4), (1.0, 0.0, 0.0))],
)
def test_wta_analog(means, out):
    assert wta_analog(means) == out


def test_wta_analog_empty():
    with pytest.raises(ValueError):
        wta_analog([])


def _trace_model(method="apnn-adaptive-q", exclude=None, iris=None):
    return trace_model(iris, RunConfig(data=str(IRIS_CSV), method=method), exclude)


def test_trace_shape_and_ivc_invariant(iris):
    m = _trace_model(iris=iris)
    x = np.array(iris.samples[120].features)
    _, tr = analog_forward(m, x / np.linalg.norm(x))
    assert len(tr.columns) == 30
    assert [(r.cls, r.column) for r in tr.columns] == [(c, j) for c in range(3) for j in range(10)]
    assert [r.step for r in tr.columns] == list(range(30))
    assert len(tr.wta_v) == 3
    for r in tr.columns:
        assert r.v_ivc == r.current * CFG.r_ivc


def test_unquantized_own_column_is_strict_max(iris):
    m = _trace_model("apnn-fixed", iris=iris)
    for c, xb in enumerate(m.crossbars):
        for j in range(xb.shape[1]):
            if (np.abs(xb - xb[:, [j]]).sum(0) == 0).sum() > 1:
                continue  # duplicated sample, no strict maximum possible
            _, tr = analog_forward(m, xb[:, j])
            cur = tr.currents(c)
            assert (cur >= cur[j]).sum() == 1


def test_trace_csv_schema(iris):
    m = _trace_model(iris=iris)
    _, tr = analog_forward(m, m.crossbars[2][:, 2] / np.linalg.norm(m.crossbars[2][:, 2]))
    rows = list(csv.reader(io.StringIO(tr.to_csv())))
    assert rows[0] == ["step", "class", "column", "current_A", "v_ivc_V", "comp_bit"]
    assert rows[31] == ["class", "mean_v_V", "wta_V"]
    assert len(rows) == 35
    for r in rows[1:31]:
        assert all("e" in f and len(f.split("e")[0].replace(".", "").lstrip("-")) == 9 for f in r[3:5])
    assert [r[2] for r in rows[32:]] == ["0.00000000e+00", "0.00000000e+00", "1.00000000e+00"]


def test_circuit_anchored_shifts_window():
    m = ApnnModel((np.array([[1.0], [0.0]]),), ThresholdPolicy.fixed(0.6), quantizer=None)
    x = np.array([0.3, np.sqrt(1 - 0.09)])  # x.w = 0.3
    ideal, _ = analog_forward(m, x)
    anchored, _ = analog_forward(m, x, ElectricalConfig(calibration=CIRCUIT_ANCHORED))
    assert ideal.scores == (0.0,)  # 0.3 is below the 0.4 V level
    assert anchored.scores == (1.0,)  # but above the 0.1 V comparator setting


@pytest.mark.parametrize("method", ["apnn-fixed", "apnn-adaptive-q"])
def test_analog_matches_digital_trace_model(iris, iris_norm, method):
    m = _trace_model(method, iris=iris)
    for i, x in enumerate(iris_norm.X):
        p = apnn_classify(m, x)
        pa, tr = analog_forward(m, x, sample_index=i)
        assert pa.label == p.label and pa.scores == p.scores
        for c, xb in enumerate(m.crossbars):
            np.testing.assert_array_equal(tr.bits(c), firing_bits(x, xb, m.policy.for_class(c)))


def test_noisy_forward_reproducible(iris_norm, iris):
    m = _trace_model(iris=iris)
    cfg = CFG.with_(variation_sigma=0.1, seed=5)
    x = iris_norm.X[60]
    a = analog_forward(m, x, cfg, sample_index=60)[1]
    b = analog_forward(m, x, cfg, sample_index=60)[1]
    c = analog_forward(m, x, cfg, sample_index=61)[1]
    assert a.columns == b.columns
    assert a.columns != c.columns
