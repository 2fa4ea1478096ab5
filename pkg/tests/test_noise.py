import numpy as np
import pytest
from scipy import stats

from curvest.errors import NegativeScale
from curvest.noise import add_noise
from curvest.pointcloud import PointCloud

N = 100_000


@pytest.fixture(scope="module")
def cloud():
    return PointCloud(np.random.default_rng(0).standard_normal((N, 3)))


def test_zero_noise_identity(cloud):
    out = add_noise(cloud, "gaussian", 0.0, seed=1)
    assert np.array_equal(out.points, cloud.points)


def test_gaussian_variance_and_ks(cloud):
    d = add_noise(cloud, "gaussian", 0.4, seed=1).points - cloud.points
    var = d.var(axis=0)
    assert np.all(np.abs(var - 0.16) < 0.03 * 0.16)
    assert stats.kstest(d[:, 0] / 0.4, "norm").pvalue > 0.01


def test_uniform_support_mean_and_ks(cloud):
    a = 0.5
    d = add_noise(cloud, "uniform", a, seed=2).points - cloud.points
    assert np.abs(d).max() <= a
    assert np.all(np.abs(d.mean(axis=0)) < 4 * a / np.sqrt(12 * N))
    assert stats.kstest(d[:, 1], "uniform", args=(-a, 2 * a)).pvalue > 0.01


def test_determinism_and_independence(cloud):
    a = add_noise(cloud, "gaussian", 0.1, seed=5).points
    b = add_noise(cloud, "gaussian", 0.1, seed=5).points
    c = add_noise(cloud, "gaussian", 0.1, seed=6).points
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_input_unchanged(cloud):
    before = cloud.points.copy()
    add_noise(cloud, "uniform", 1.0, seed=3)
    assert np.array_equal(before, cloud.points)


def test_negative_scale(cloud):
    with pytest.raises(NegativeScale):
        add_noise(cloud, "gaussian", -0.1)
