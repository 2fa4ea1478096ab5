import numpy as np
import pytest

from curvest.errors import EmptyFile, InvalidInput, IoError, ParseError, RaggedRows
from curvest.pointcloud import GroundTruth, PointCloud, load_cloud, load_labeled, save_cloud


def test_load_simple_csv(tmp_path):
    p = tmp_path / "c.csv"
    p.write_text("0,0,0\n1,0,0\n0,1,0\n")
    c = load_cloud(p)
    assert c.n == 3 and c.dim == 3


def test_ragged_rows(tmp_path):
    p = tmp_path / "c.csv"
    p.write_text("0,0,0\n1,0\n")
    with pytest.raises(RaggedRows):
        load_cloud(p)


def test_parse_error_and_empty(tmp_path):
    p = tmp_path / "c.csv"
    p.write_text("0,0,0\n1,zz,0\n")
    with pytest.raises(ParseError):
        load_cloud(p)
    p.write_text("")
    with pytest.raises(EmptyFile):
        load_cloud(p)


def test_round_trip_bit_exact(tmp_path, rng):
    pts = rng.standard_normal((40, 4)) * 10.0 ** rng.integers(-8, 8, (40, 4))
    p = tmp_path / "c.csv"
    save_cloud(PointCloud(pts), p)
    assert np.array_equal(load_cloud(p).points, pts)


def test_round_trip_with_labels(tmp_path, rng):
    pts = rng.standard_normal((10, 3))
    nrm = pts / np.linalg.norm(pts, axis=1, keepdims=True)
    lab = GroundTruth(nrm, rng.random(10), rng.random(10))
    p = tmp_path / "c.csv"
    save_cloud(PointCloud(pts), p, labels=lab)
    lines = p.read_text().splitlines()
    assert lines[0] == "x0,x1,x2,n0,n1,n2,H,K"
    c, lab2 = load_labeled(p)
    assert np.array_equal(c.points, pts)
    assert np.array_equal(lab2.normals, nrm)
    assert np.array_equal(lab2.mean_curvature, lab.mean_curvature)


def test_normals_only_six_columns(tmp_path):
    p = tmp_path / "c.csv"
    save_cloud(PointCloud([[1.0, 2.0, 3.0]]), p, labels=GroundTruth(normals=np.array([[0.0, 0.0, 1.0]])))
    lines = p.read_text().splitlines()
    assert len(lines) == 2
    assert len(lines[1].split(",")) == 6


def test_xyz(tmp_path, rng):
    pts = rng.standard_normal((5, 3))
    p = tmp_path / "c.xyz"
    save_cloud(PointCloud(pts), p)
    assert np.array_equal(load_cloud(p).points, pts)
    with pytest.raises(InvalidInput):
        save_cloud(PointCloud(np.zeros((2, 2))), p)


def test_unwritable(tmp_path):
    with pytest.raises(IoError):
        save_cloud(PointCloud([[0.0, 0.0]]), tmp_path / "missing" / "c.csv")


def test_validation():
    with pytest.raises(InvalidInput):
        PointCloud([[0.0, np.inf]])
    with pytest.raises(InvalidInput):
        PointCloud(np.zeros((0, 3)))
    with pytest.raises(InvalidInput):
        PointCloud(np.zeros((3, 11)))
    with pytest.raises(InvalidInput):
        GroundTruth(normals=np.array([[0.0, 0.0, 2.0]]))
    with pytest.raises(InvalidInput):
        GroundTruth(mean_curvature=np.zeros(3), gaussian_curvature=np.zeros(4))


def test_immutable():
    c = PointCloud([[0.0, 1.0]])
    with pytest.raises(ValueError):
        c.points[0, 0] = 5.0
