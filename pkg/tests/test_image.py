import colorsys
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from revfilt.image import (
    HsvImage,
    RgbImage,
    clamp01,
    hsv_to_rgb,
    mean_value,
    percentile,
    rgb_to_hsv,
)

unit = st.floats(0.0, 1.0, allow_nan=False)


def pixel(r, g, b):
    return RgbImage(np.array([[r]]), np.array([[g]]), np.array([[b]]))


def hsv_tuple(img):
    return float(img.h[0, 0]), float(img.s[0, 0]), float(img.v[0, 0])


def test_pure_red():
    assert hsv_tuple(rgb_to_hsv(pixel(1, 0, 0))) == (0.0, 1.0, 1.0)


def test_gray_has_zero_hue_and_saturation():
    assert hsv_tuple(rgb_to_hsv(pixel(0.5, 0.5, 0.5))) == (0.0, 0.0, 0.5)


def test_black_is_all_zero():
    assert hsv_tuple(rgb_to_hsv(pixel(0, 0, 0))) == (0.0, 0.0, 0.0)


def test_zero_saturation_to_rgb():
    out = hsv_to_rgb(HsvImage(np.zeros((1, 1)), np.zeros((1, 1)), np.full((1, 1), 0.7)))
    assert [float(c[0, 0]) for c in out.channels()] == [0.7, 0.7, 0.7]


def test_pure_green_to_rgb():
    out = hsv_to_rgb(HsvImage(np.full((1, 1), 1 / 3), np.ones((1, 1)), np.ones((1, 1))))
    np.testing.assert_allclose([c[0, 0] for c in out.channels()], [0, 1, 0], atol=1e-12)


def test_matches_colorsys_on_random_pixels(rng):
    rgb = rng.random((20, 50, 3))
    hsv = rgb_to_hsv(RgbImage.from_array(rgb))
    for i, j in np.ndindex(20, 50):
        h, s, v = colorsys.rgb_to_hsv(*rgb[i, j])
        assert hsv.v[i, j] == v
        assert hsv.s[i, j] == pytest.approx(s, abs=1e-12)
        # hue is circular
        dh = abs(hsv.h[i, j] - h)
        assert min(dh, 1 - dh) < 1e-12


def test_round_trip_1000_pixels(rng):
    img = RgbImage.from_array(rng.random((1, 1000, 3)))
    back = hsv_to_rgb(rgb_to_hsv(img))
    assert np.max(np.abs(back.to_array() - img.to_array())) < 1e-6


@settings(max_examples=200, deadline=None)
@given(unit, unit, unit)
def test_round_trip_property(r, g, b):
    back = hsv_to_rgb(rgb_to_hsv(pixel(r, g, b)))
    np.testing.assert_allclose([c[0, 0] for c in back.channels()], [r, g, b], atol=1e-6)


@settings(max_examples=50, deadline=None)
@given(arrays(np.float64, (4, 5, 3), elements=unit))
def test_value_is_exact_channel_max(arr):
    hsv = rgb_to_hsv(RgbImage.from_array(arr))
    assert np.array_equal(hsv.v, arr.max(axis=2))
    assert np.all((hsv.h >= 0) & (hsv.h < 1))
    assert np.all((hsv.s >= 0) & (hsv.s <= 1))


def test_mismatched_planes_rejected():
    with pytest.raises(ValueError):
        RgbImage(np.zeros((2, 2)), np.zeros((2, 3)), np.zeros((2, 2)))


def test_nonfinite_rejected():
    with pytest.raises(ValueError):
        RgbImage.gray(np.array([[0.0, np.nan]]))


def test_mean_value_examples():
    assert mean_value(np.full((3, 4), 0.2)) == pytest.approx(0.2, abs=1e-15)
    assert mean_value(np.array([[0.0, 1.0]])) == 0.5


def test_mean_value_matches_compensated_sum(rng):
    for _ in range(5):
        p = rng.random((256, 256))
        assert abs(mean_value(p) - math.fsum(p.ravel()) / p.size) < 1e-12


def test_mean_of_empty_plane_raises():
    with pytest.raises(ValueError):
        mean_value(np.zeros((0, 3)))


def test_percentile_endpoints():
    p = np.array([[0.2, 0.5, 0.8]])
    assert percentile(p, 0) == 0.2
    assert percentile(p, 100) == 0.8


def test_percentile_median_of_permutation(rng):
    p = rng.permutation(np.arange(1, 101, dtype=float)).reshape(10, 10)
    oracle = sorted(p.ravel().tolist())
    assert percentile(p, 50) == oracle[49] == 50.0


def test_percentile_avoids_float_rank_overshoot():
    # 7 / 100 * 100 == 7.000000000000001 in floats; nearest rank must still be 7
    p = np.arange(1, 101, dtype=float).reshape(10, 10)
    assert percentile(p, 7) == 7.0


@pytest.mark.parametrize("q", [-0.1, 100.5])
def test_percentile_out_of_range(q):
    with pytest.raises(ValueError):
        percentile(np.ones((2, 2)), q)


@settings(max_examples=100, deadline=None)
@given(arrays(np.float64, st.tuples(st.integers(1, 6), st.integers(1, 6)), elements=unit),
       st.floats(0, 100), st.floats(0, 100))
def test_percentile_monotone_and_bounded(p, q1, q2):
    lo, hi = sorted((q1, q2))
    assert percentile(p, 0) <= percentile(p, lo) <= percentile(p, hi) <= percentile(p, 100)
    assert percentile(p, lo) in p


def test_clamp01():
    out = clamp01(np.array([[1.3, -0.1, 0.25]]))
    assert out.tolist() == [[1.0, 0.0, 0.25]]
