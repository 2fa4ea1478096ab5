import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from curvest.errors import InsufficientPoints, InvalidParams, NoNeighbors, SingletonPoint
from curvest.neighborhood import (
    KNN,
    EpsBall,
    GaussianKernel,
    SpatialIndex,
    brute_neighbors,
    build_index,
    format_spec,
    gaussian_weight,
    neighbors,
    parse_spec,
)
from curvest.pointcloud import PointCloud


def _same(a, b):
    return (
        np.array_equal(a.indices, b.indices)
        and np.allclose(a.weights, b.weights, rtol=0, atol=1e-15)
        and np.allclose(a.distances, b.distances, rtol=0, atol=1e-15)
    )


def test_two_points_knn():
    idx = build_index(PointCloud([[0.0, 0.0], [1.0, 0.0]]))
    nb = neighbors(idx, 0, KNN(1))
    assert list(nb.indices) == [1] and list(nb.weights) == [1.0]


def test_single_point_cloud():
    idx = build_index(PointCloud([[0.0, 0.0, 0.0]]))
    with pytest.raises(NoNeighbors):
        idx.query(0, KNN(1))


def test_k_too_large():
    idx = build_index(PointCloud(np.eye(3)))
    with pytest.raises(InsufficientPoints):
        idx.query(0, KNN(3))
    with pytest.raises(InsufficientPoints):
        idx.table(KNN(3))


def test_eps_below_gap_is_singleton():
    idx = build_index(PointCloud([[0.0, 0.0], [1.0, 0.0], [0.0, 2.0]]))
    with pytest.raises(SingletonPoint) as info:
        idx.query(2, EpsBall(0.5))
    assert info.value.index == 2
    assert list(idx.table(EpsBall(0.5)).singletons) == [0, 1, 2]


def test_gaussian_weight_formula():
    assert gaussian_weight(1.0, 1.0) == pytest.approx(math.exp(-0.5))
    idx = build_index(PointCloud([[0.0, 0.0], [1.0, 0.0]]))
    assert idx.query(0, GaussianKernel(1.0)).weights[0] == pytest.approx(0.6065306597)


def test_spec_parsing():
    assert parse_spec("knn:30") == KNN(30)
    assert parse_spec("eps:0.5") == EpsBall(0.5)
    assert parse_spec("gauss:0.2:2") == GaussianKernel(0.2, 2.0)
    for spec in (KNN(7), EpsBall(0.123456789012345), GaussianKernel(0.1, 3.0)):
        assert parse_spec(format_spec(spec)) == spec
    for bad in ("knn:0", "eps:-1", "cube:2", "gauss:0"):
        with pytest.raises(InvalidParams):
            parse_spec(bad)


def test_ties_broken_by_index():
    pts = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]])
    idx = build_index(PointCloud(pts))
    assert list(idx.query(0, KNN(2)).indices) == [1, 2]
    assert list(idx.table(KNN(2)).indices[0]) == [1, 2]


def test_lattice_ties_table_matches_brute():
    g = np.stack(np.meshgrid(np.arange(6.0), np.arange(6.0)), -1).reshape(-1, 2)
    idx = build_index(PointCloud(g))
    for k in (1, 3, 4, 5, 8):
        tab = idx.table(KNN(k))
        for i in range(len(g)):
            assert list(tab.indices[i]) == list(brute_neighbors(g, i, KNN(k)).indices)


@pytest.mark.parametrize("seed", range(100))
def test_matches_brute_force_random_clouds(seed):
    r = np.random.default_rng(seed)
    n = int(r.integers(5, 120))
    dim = int(r.integers(2, 6))
    pts = r.random((n, dim))
    idx = build_index(PointCloud(pts))
    specs = [KNN(int(r.integers(1, n))), EpsBall(float(r.uniform(0.1, 0.6))), GaussianKernel(float(r.uniform(0.05, 0.2)))]
    for spec in specs:
        for i in r.integers(0, n, 5):
            try:
                want = brute_neighbors(pts, i, spec)
            except SingletonPoint:
                with pytest.raises(SingletonPoint):
                    idx.query(i, spec)
                continue
            assert _same(idx.query(i, spec), want)


@settings(max_examples=60, deadline=None)
@given(
    st.integers(0, 10_000),
    st.integers(2, 200),
    st.integers(1, 20),
    st.floats(0.01, 0.8),
)
def test_property_table_matches_brute(seed, n, k, eps):
    r = np.random.default_rng(seed)
    # coarse grid coordinates create many exact distance ties
    pts = np.round(r.random((n, 3)) * 8) / 8
    idx = SpatialIndex(PointCloud(pts))
    k = min(k, n - 1)
    knn = idx.table(KNN(k))
    assert np.all(knn.counts == k)
    ball = idx.table(EpsBall(eps))
    for i in range(0, n, max(1, n // 10)):
        assert list(knn.indices[i]) == list(brute_neighbors(pts, i, KNN(k)).indices)
        try:
            want = brute_neighbors(pts, i, EpsBall(eps))
            assert list(ball.row(i).indices) == list(want.indices)
        except SingletonPoint:
            assert ball.counts[i] == 0


def test_eps_monotone(rng):
    pts = rng.random((300, 3))
    idx = build_index(PointCloud(pts))
    counts = [idx.table(EpsBall(e)).counts for e in (0.05, 0.1, 0.2, 0.4)]
    for a, b in zip(counts, counts[1:]):
        assert np.all(a <= b)


def test_self_excluded_and_sorted(rng):
    pts = rng.random((200, 3))
    idx = build_index(PointCloud(pts))
    for spec in (KNN(10), EpsBall(0.3), GaussianKernel(0.1)):
        for i in range(0, 200, 17):
            nb = idx.query(i, spec)
            assert i not in nb.indices
            assert np.all(np.diff(nb.distances) >= 0)
            assert np.all((nb.weights > 0) & (nb.weights <= 1))


def test_rebuild_deterministic(rng):
    pts = rng.random((100, 3))
    a = build_index(PointCloud(pts)).table(KNN(9))
    b = build_index(PointCloud(pts)).table(KNN(9))
    assert np.array_equal(a.indices, b.indices)
