import numpy as np
import pytest

from curvest.errors import Empty, InvalidParams, LengthMismatch, ZeroVector
from curvest.metrics import (
    cosine_rows,
    cosine_similarity,
    curvature_mse,
    normal_scores,
    orientation_consistency,
    summarize,
)


def test_cosine_examples():
    a = np.array([1.0, 2.0, 3.0])
    assert cosine_similarity(a, a) == pytest.approx(1)
    assert cosine_similarity(a, -a) == pytest.approx(-1)
    assert cosine_similarity(a, -a, absolute=True) == pytest.approx(1)
    assert cosine_similarity([1, 0], [0, 1]) == 0


def test_cosine_invariances(rng):
    a, b = rng.standard_normal((2, 5))
    c = cosine_similarity(a, b)
    assert cosine_similarity(3.0 * a, 0.2 * b) == pytest.approx(c)
    assert cosine_similarity(-a, b) == pytest.approx(-c)


def test_cosine_errors():
    with pytest.raises(ZeroVector):
        cosine_similarity([0, 0], [1, 0])
    with pytest.raises(LengthMismatch):
        cosine_rows(np.ones((2, 3)), np.ones((3, 3)))


def test_normal_scores():
    est = np.array([[1.0, 0, 0], [-1.0, 0, 0], [np.nan, np.nan, np.nan], [0, 1.0, 0]])
    ref = np.tile([1.0, 0, 0], (4, 1))
    s = normal_scores(est, ref)
    assert s["mean_cos"] == pytest.approx(0)
    assert s["mean_abs_cos"] == pytest.approx(2 / 3)
    assert s["flip_fraction"] == pytest.approx(1 / 3)
    assert s["failure_rate"] == pytest.approx(0.25)


def test_mse_examples():
    t = np.array([0.5, -1.0, 2.0])
    assert curvature_mse(t, t, "signed") == 0
    assert curvature_mse(t + 0.3, t, "signed") == pytest.approx(0.09)
    # by hand: |est| = (1, 1, 1.5) vs (0.5, 1, 2): (0.25 + 0 + 0.25) / 3
    assert curvature_mse(np.array([-1.0, 1.0, 1.5]), t, "absolute") == pytest.approx(1 / 6)
    assert curvature_mse(np.array([1.0, 1.0, 1.0]), t, "signed") == pytest.approx((0.25 + 4 + 1) / 3)


def test_mse_skips_failures_and_errors():
    est = np.array([1.0, np.nan, 3.0])
    assert curvature_mse(est, np.array([1.0, 5.0, 2.0]), "signed") == pytest.approx(0.5)
    with pytest.raises(LengthMismatch):
        curvature_mse(np.ones(2), np.ones(3))
    with pytest.raises(InvalidParams):
        curvature_mse(np.ones(2), np.ones(2), mode="squared")


def test_mse_nonnegative_zero_iff_equal(rng):
    a, b = rng.standard_normal((2, 50))
    assert curvature_mse(a, b, "signed") > 0
    assert curvature_mse(a, a.copy(), "signed") == 0


def test_orientation_consistency():
    assert orientation_consistency([-1.0, -2.0, 3.0], [1.0, 2.0, 3.0]) == pytest.approx(2 / 3)


def test_summarize():
    s = summarize([2.0, 2.0, 2.0])
    assert s["stddev"] == 0
    assert np.count_nonzero(s["counts"]) == 1
    s = summarize([-1.0, 1.0], bins=2)
    assert list(s["counts"]) == [1, 1]
    with pytest.raises(Empty):
        summarize([])


def test_summarize_matches_numpy(rng):
    for _ in range(20):
        v = rng.standard_normal(int(rng.integers(1, 200)))
        s = summarize(v)
        assert s["mean"] == pytest.approx(np.mean(v))
        assert s["median"] == pytest.approx(np.median(v))
        assert s["stddev"] == pytest.approx(np.std(v))
        assert s["counts"].sum() == len(v)
