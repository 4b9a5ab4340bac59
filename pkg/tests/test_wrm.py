"""Reconstruction-matrix construction and its algebraic properties."""

import numpy as np
import pytest

from refdata import MREC_3DP
from wavemask.errors import ShapeError
from wavemask.wavelet import make_filter, reconstruct_component
from wavemask.wrm import build_wrm

D4 = make_filter("daubechies", 2)
HAAR = make_filter("haar", 1)


def test_matches_displayed_matrix():
    wrm = build_wrm(16, 2, D4)
    assert wrm.shape == (16, 4)
    assert np.max(np.abs(wrm.entries - MREC_3DP)) < 1e-3


def test_haar_length4_level1():
    # the -1 phase wraps the second tap of the last coefficient to row 1
    wrm = build_wrm(4, 1, HAAR)
    r = 1 / np.sqrt(2.0)
    expected = np.array([[r, 0.0], [0.0, r], [0.0, r], [r, 0.0]])
    assert np.allclose(wrm.entries, expected, atol=1e-12)


@pytest.mark.parametrize("length,level", [(8, 1), (8, 3), (16, 2), (32, 3)])
@pytest.mark.parametrize("filters", [HAAR, D4], ids=["haar", "d4"])
def test_columns_are_unit_reconstructions(length, level, filters):
    wrm = build_wrm(length, level, filters)
    width = length >> level
    for j in range(width):
        unit = np.zeros(width)
        unit[j] = 1.0
        column = reconstruct_component(unit, "approx", level, length, filters)
        assert np.allclose(wrm.entries[:, j], column, atol=1e-12)


@pytest.mark.parametrize("length,level", [(8, 1), (8, 3), (16, 2), (32, 3)])
@pytest.mark.parametrize("filters", [HAAR, D4], ids=["haar", "d4"])
def test_column_sums_and_orthonormality(length, level, filters):
    wrm = build_wrm(length, level, filters)
    assert np.allclose(wrm.entries.sum(axis=0), 2.0 ** (level / 2.0), atol=1e-9)
    gram = wrm.entries.T @ wrm.entries
    assert np.allclose(gram, np.eye(length >> level), atol=1e-9)


def test_column_support_d4_level2():
    wrm = build_wrm(16, 2, D4)
    nonzeros = (np.abs(wrm.entries) > 1e-12).sum(axis=0)
    assert nonzeros.tolist() == [10, 10, 10, 10]


def test_apply_agrees_with_iterative_reconstruction():
    wrm = build_wrm(16, 2, D4)
    rng = np.random.default_rng(3)
    for _ in range(10):
        a = rng.normal(size=4) * 100.0
        direct = reconstruct_component(a, "approx", 2, 16, D4)
        assert np.allclose(wrm.apply(a), direct, atol=1e-12)
        assert np.allclose(wrm.entries @ a, direct, atol=1e-12)


def test_row_accessor_is_one_based():
    wrm = build_wrm(16, 2, D4)
    assert np.allclose(wrm.row(1), wrm.entries[0], atol=0)
    assert np.allclose(wrm.row(16), wrm.entries[15], atol=0)
    with pytest.raises(ShapeError):
        wrm.row(0)
    with pytest.raises(ShapeError):
        wrm.row(17)


def test_shape_errors():
    with pytest.raises(ShapeError):
        build_wrm(10, 2, D4)
    with pytest.raises(ShapeError):
        build_wrm(16, 0, D4)
    wrm = build_wrm(16, 2, D4)
    with pytest.raises(ShapeError):
        wrm.apply(np.zeros(5))
