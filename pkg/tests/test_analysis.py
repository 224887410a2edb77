import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from eitmem.analysis import FitError, Profile, centroid, extract_profile, fit_decay, similarity, visibility


def test_single_spot_profile():
    img = np.zeros((9, 9))
    img[3, 5] = 4.0
    p = extract_profile(img, "vertical")
    assert p.offset == 5 and np.count_nonzero(p.values) == 1
    h = extract_profile(img, "horizontal")
    assert h.offset == 3 and np.count_nonzero(h.values) == 1


def test_explicit_anchor_is_exact_column():
    img = np.random.default_rng(0).uniform(size=(6, 7))
    assert np.array_equal(extract_profile(img, "vertical", 4).values, img[:, 4])
    assert np.array_equal(extract_profile(img, "horizontal", 2).values, img[2, :])


def test_symmetric_image_centroid_is_center():
    y, x = np.mgrid[0:21, 0:21]
    img = np.exp(-((x - 10) ** 2 + (y - 10) ** 2) / 20.0)
    assert centroid(img) == (10, 10)


def test_profile_errors():
    with pytest.raises(ValueError):
        extract_profile(np.zeros((4, 4)), "vertical")
    with pytest.raises(ValueError):
        extract_profile(np.ones((4, 4)), "diagonal")
    with pytest.raises(ValueError):
        Profile(np.array([1.0, np.nan]), "vertical", 0)


def test_visibility_examples():
    assert visibility(np.array([0.0, 3.0, 1.0])) == 1.0
    assert visibility(np.full(5, 2.5)) == 0.0
    assert visibility(np.array([2.0, 4.0, 6.0, 4.0, 2.0])) == 0.5
    with pytest.raises(ValueError):
        visibility(np.zeros(4))


def test_similarity_examples():
    A = np.random.default_rng(1).uniform(size=(5, 5))
    assert similarity(A, 3 * A) == pytest.approx(1.0, abs=1e-15)
    a, b = np.zeros((4, 4)), np.zeros((4, 4))
    a[:2], b[2:] = 1.0, 1.0
    assert similarity(a, b) == 0.0
    assert similarity(np.array([[1.0, 1.0], [0.0, 0.0]]), np.array([[1.0, 0.0], [1.0, 0.0]])) == pytest.approx(0.5)
    with pytest.raises(ValueError):
        similarity(A, np.zeros_like(A))
    with pytest.raises(ValueError):
        similarity(A, np.ones((2, 2)))


def test_self_similarity_random_images():
    rng = np.random.default_rng(2)
    for _ in range(100):
        A = rng.uniform(0, 1e4, size=(rng.integers(2, 40), rng.integers(2, 40)))
        assert abs(similarity(A, A) - 1.0) <= 1e-12


def test_negative_pixels_floored():
    A = np.array([[1.0, -5.0]])
    B = np.array([[1.0, 0.0]])
    assert similarity(A, B) == 1.0
    assert visibility(np.array([-1.0, 2.0])) == 1.0


pos_arrays = arrays(np.float64, st.tuples(st.integers(2, 8), st.integers(2, 8)),
                    elements=st.floats(0, 1e6, allow_nan=False))


@settings(max_examples=60, deadline=None)
@given(pos_arrays, st.floats(1e-3, 1e3), st.floats(1e-3, 1e3))
def test_metric_invariances(A, s, t):
    if A.sum() == 0:
        return
    B = A[::-1, ::-1] + 1.0
    r = similarity(A, B)
    assert 0.0 <= r <= 1.0
    assert similarity(s * A, t * B) == pytest.approx(r, rel=1e-9, abs=1e-12)
    v = visibility(A[:, 0]) if A[:, 0].sum() > 0 else None
    if v is not None:
        assert 0.0 <= v <= 1.0
        assert visibility(s * A[:, 0]) == pytest.approx(v, rel=1e-9, abs=1e-12)


# decay fitting

def test_fit_noiseless_round_trip():
    t = np.linspace(0, 8e-6, 9)
    f = fit_decay(t, np.exp(-t / 2e-6))
    assert f.tau == pytest.approx(2e-6, rel=1e-3)
    assert f(f.tau) - f.y0 == pytest.approx((f(0.0) - f.y0) / math.e, rel=1e-12)


@settings(max_examples=50, deadline=None)
@given(st.floats(-2, 2), st.floats(0.1, 100), st.floats(0.5e-6, 20e-6))
def test_fit_recovers_parameters(y0, A, tau):
    t = np.linspace(0, 30e-6, 12)
    f = fit_decay(t, y0 + A * np.exp(-t / tau))
    assert f.tau == pytest.approx(tau, rel=1e-6)
    assert f.A == pytest.approx(A, rel=1e-6)
    assert f.y0 == pytest.approx(y0, abs=1e-6 * A)


def test_fit_offset_times():
    t = np.linspace(5e-6, 25e-6, 10)
    f = fit_decay(t, 1.0 + 4.0 * np.exp(-t / 6e-6))
    assert f.A == pytest.approx(4.0, rel=1e-8) and f.tau == pytest.approx(6e-6, rel=1e-8)


@pytest.mark.parametrize("y", [np.full(6, 3.0), np.linspace(0, 1, 6), np.exp(np.linspace(0, 1, 6))])
def test_fit_unidentifiable(y):
    with pytest.raises(FitError, match="unidentifiable"):
        fit_decay(np.linspace(0, 5e-6, 6), y)


def test_fit_input_errors():
    with pytest.raises(ValueError):
        fit_decay([0, 1, 2], [3, 2, 1])
    with pytest.raises(ValueError):
        fit_decay([0, 1, 1, 2], [4, 3, 2, 1])


def test_fit_five_percent_noise_coverage():
    # 20 samples over four decay times, 5% Gaussian noise relative to each sample
    t = np.linspace(0, 8e-6, 20)
    truth = np.exp(-t / 2e-6)
    hits = 0
    for seed in range(1000):
        y = truth * (1 + np.random.default_rng(seed).normal(0, 0.05, t.size))
        hits += abs(fit_decay(t, y).tau / 2e-6 - 1) <= 0.05
    assert hits >= 950


def test_fit_confidence_interval_coverage():
    # the reported 95% half-width on tau should cover the truth about 95% of the time
    t = np.linspace(0, 8e-6, 20)
    truth = np.exp(-t / 2e-6)
    cover = 0
    for seed in range(1000):
        y = truth + np.random.default_rng(seed).normal(0, 0.05, t.size)
        f = fit_decay(t, y)
        cover += abs(f.tau - 2e-6) <= f.half_widths[2]
    assert 0.92 <= cover / 1000 <= 0.975
