import numpy as np
import pytest
from scipy.stats import special_ortho_group

from curvest.errors import CodimensionNotOne, DegenerateNeighborhood, InvalidInput, SingletonPoint
from curvest.linalg import sym_eigen
from curvest.neighborhood import KNN, EpsBall
from curvest.normals import (
    FrameField,
    align_frames,
    analytic_frames,
    pca_frame,
    pca_frames,
    vcm_frame,
    vcm_frames,
)
from curvest.pointcloud import PointCloud
from curvest.surfaces import sample_hypersphere, sample_torus
from curvest.vcm import brute_vcm, convolve_vcm


def _orthonormal(frames):
    B = np.concatenate([frames.tangent_basis, frames.normal_basis], axis=2)
    gram = np.einsum("nji,njk->nik", B, B)
    return np.abs(gram - np.eye(B.shape[1])).max()


def test_plane_normal(rng):
    pts = np.column_stack([rng.random((20, 2)), np.zeros(20)])
    fr = pca_frame(PointCloud(pts), 0, KNN(10))
    assert abs(abs(fr.normal @ [0, 0, 1]) - 1) < 1e-12
    assert abs(fr.tangent_basis[2]).max() < 1e-12
    diam = np.ptp(pts, axis=0).max()
    assert abs(fr.eigenvalues[0]) <= 1e-12 * diam**2


def test_batch_matches_single(rng):
    cloud, _ = sample_torus(300, seed=1)
    field = pca_frames(cloud, KNN(15))
    for i in (0, 57, 299):
        fr = pca_frame(cloud, i, KNN(15))
        assert abs(abs(field.normals[i] @ fr.normal) - 1) < 1e-10


def test_sphere_normals_accurate():
    cloud, gt = sample_hypersphere(5000, seed=4)
    field = pca_frames(cloud, KNN(50))
    cos = np.abs(np.einsum("nd,nd->n", field.normals, gt.normals))
    assert cos.mean() >= 0.999
    assert _orthonormal(field) < 1e-8


def test_degenerate_neighborhood():
    pts = np.array([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [5.0, 5.0, 5.0]])
    with pytest.raises(DegenerateNeighborhood):
        pca_frame(PointCloud(pts), 0, KNN(1))
    field = pca_frames(PointCloud(pts), KNN(1), errors="record")
    assert field.failures[0] == "DegenerateNeighborhood"
    assert np.isnan(field.normals[0]).all()


def test_singleton_recorded():
    pts = np.array([[0.0, 0.0, 0.0], [0.1, 0.0, 0.0], [0.0, 0.1, 0.0], [9.0, 9.0, 9.0]])
    with pytest.raises(SingletonPoint):
        pca_frames(PointCloud(pts), EpsBall(0.5))
    field = pca_frames(PointCloud(pts), EpsBall(0.5), errors="record")
    assert field.failures == {3: "SingletonPoint"}
    assert list(field.ok) == [True, True, True, False]


def test_rotation_equivariance(rng):
    cloud, _ = sample_torus(400, seed=2)
    Q = special_ortho_group.rvs(3, random_state=5)
    a = pca_frames(cloud, KNN(20))
    b = pca_frames(PointCloud(cloud.points @ Q.T), KNN(20))
    rotated = a.normals @ Q.T
    assert np.abs(np.abs(np.einsum("nd,nd->n", rotated, b.normals)) - 1).max() < 1e-6


def test_vcm_frame_dominant_axis():
    fr = vcm_frame(np.diag([0.01, 0.02, 5.0]))
    assert abs(abs(fr.normal[2]) - 1) < 1e-12
    v = np.array([1.0, 2.0, 2.0]) / 3
    fr = vcm_frame(3.0 * np.outer(v, v))
    assert abs(abs(fr.normal @ v) - 1) < 1e-12
    fr = vcm_frame(np.diag([1.0, 2.0, 3.0]), orientation=[0, 0, -1])
    assert fr.normal[2] == pytest.approx(-1)


def test_vcm_frame_rejects_non_psd():
    with pytest.raises(InvalidInput):
        vcm_frame(np.diag([-1.0, 1.0, 2.0]))


def test_vcm_frame_on_brute_force_strip():
    # a dense flat strip; its VCM normal is e_z
    g = np.stack(np.meshgrid(np.linspace(0, 1, 11), np.linspace(0, 0.4, 5)), -1).reshape(-1, 2)
    pts = np.column_stack([g, np.zeros(len(g))])
    cloud = PointCloud(pts)
    field = brute_vcm(cloud, 0.15, 0.01)
    conv = convolve_vcm(field, cloud, EpsBall(0.21))
    center = int(np.argmin(np.linalg.norm(pts - [0.5, 0.2, 0.0], axis=1)))
    fr = vcm_frame(conv.tensors[center])
    angle = np.degrees(np.arccos(min(1.0, abs(fr.normal[2]))))
    assert angle < 1.0


def test_pca_vcm_duality_on_plane():
    g = np.stack(np.meshgrid(np.linspace(0, 1, 9), np.linspace(0, 1, 9)), -1).reshape(-1, 2)
    # axis-aligned so the quadrature grid is symmetric about the plane
    cloud = PointCloud(np.column_stack([g, np.zeros(len(g))]))
    pca = pca_frames(cloud, KNN(8))
    conv = convolve_vcm(brute_vcm(cloud, 0.2, 0.02), cloud, EpsBall(0.3))
    vf = vcm_frames(conv)
    cos = np.abs(np.einsum("nd,nd->n", pca.normals, vf.normals))
    assert cos.min() >= 1 - 1e-6


def test_vcm_frames_orientation_from_moments():
    T = np.tile(np.diag([0.0, 0.0, 1.0]), (2, 1, 1))
    mom = np.array([[0.0, 0.0, 1.0], [0.0, 0.0, -1.0]])

    class F:
        tensors = T
        moments = mom

    fr = vcm_frames(F())
    assert fr.normals[0, 2] == 1.0 and fr.normals[1, 2] == -1.0


def test_analytic_frames(rng):
    nrm = rng.standard_normal((100, 4))
    nrm /= np.linalg.norm(nrm, axis=1, keepdims=True)
    nrm[0] = [0, 0, 0, 1]
    fr = analytic_frames(nrm)
    assert _orthonormal(fr) < 1e-12
    assert np.array_equal(fr.normals, nrm)


def _frames(normals):
    normals = np.asarray(normals, dtype=float)
    return analytic_frames(normals)


def test_align_frames():
    ref = np.array([[0.0, 0.0, 1.0], [0.0, 1.0, 0.0], [1.0, 0.0, 0.0]])
    fr = _frames([[0.0, 0.0, -1.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
    out = align_frames(fr, ref)
    np.testing.assert_array_equal(out.normals, [[0, 0, 1], [0, 1, 0], [0, 0, 1]])


def test_align_requires_codim_one():
    fr = FrameField(np.zeros((1, 3, 2)), np.zeros((1, 3, 1)), np.zeros((1, 3)))
    with pytest.raises(CodimensionNotOne):
        align_frames(fr, np.zeros((1, 3)))
