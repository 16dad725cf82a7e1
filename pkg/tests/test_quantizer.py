import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from apnnsim.quantizer import QuantizerSpec, is_level, quantize, quantize_matrix

Q = QuantizerSpec()
LEVELS = [k / 15 for k in range(16)]


def nearest_by_enumeration(w):
    # independent of the implementation: scan the explicit level list, prefer upper on ties
    c = min(max(w, 0.0), 1.0)
    return min(LEVELS, key=lambda v: (abs(v - c), -v))


def test_levels():
    np.testing.assert_array_equal(Q.levels(), LEVELS)


@pytest.mark.parametrize("w,expected", [(0.0, 0.0), (1.0, 1.0), (0.5, 8 / 15), (-3.0, 0.0), (7.0, 1.0)])
def test_examples(w, expected):
    assert quantize(w) == expected


def test_midpoint_is_equidistant():
    assert math.isclose(0.5 - 7 / 15, 8 / 15 - 0.5)


def test_matrix_examples():
    assert np.all(quantize_matrix(np.zeros((3, 2))) == 0)
    L = np.array(LEVELS).reshape(4, 4)
    np.testing.assert_array_equal(quantize_matrix(L), L)
    x = np.array([0.80377277301538062, 0.55160876579486905, 0.22064350631794762, 0.031520500902563946])
    np.testing.assert_array_equal(quantize_matrix(x), [12 / 15, 8 / 15, 3 / 15, 0.0])


def test_non_finite():
    with pytest.raises(ValueError):
        quantize(float("nan"))
    with pytest.raises(ValueError):
        quantize_matrix([1.0, float("inf")])


def test_bad_spec():
    with pytest.raises(ValueError):
        QuantizerSpec(n_levels=1)
    with pytest.raises(ValueError):
        QuantizerSpec(range_lo=1.0, range_hi=1.0)


reals = st.floats(-2, 3, allow_nan=False)


@given(reals)
def test_matches_enumeration(w):
    assert quantize(w) == nearest_by_enumeration(w)


@given(reals)
def test_idempotent(w):
    assert quantize(quantize(w)) == quantize(w)


@given(reals, reals)
def test_monotone(a, b):
    lo, hi = sorted((a, b))
    assert quantize(lo) <= quantize(hi)


@given(reals, st.integers(2, 300))
def test_error_bound(w, n):
    q = QuantizerSpec(n_levels=n)
    assert abs(quantize(w, q) - min(max(w, 0.0), 1.0)) <= q.step / 2 + 1e-15


@given(st.lists(reals, min_size=1, max_size=20))
def test_matrix_is_elementwise(ws):
    out = quantize_matrix(ws)
    assert out.tolist() == [quantize(w) for w in ws]
    assert is_level(out).all()


def test_sixteen_distinct_over_dense_sweep():
    out = quantize_matrix(np.linspace(0, 1, 100_000))
    assert len(np.unique(out)) == 16
