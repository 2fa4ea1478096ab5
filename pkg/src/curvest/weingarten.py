"""Weingarten map estimation (WME, VWME) and curvature extraction.

For a point x_i with unit normal zeta_i and tangent basis E, the change of
normal to a nearby x_j satisfies, to first order,

    E^T (zeta_j - zeta_i) = -S E^T (x_j - x_i)

and S is the weighted least-squares solution over the neighborhood. Before
differencing, each neighbor normal is sign-aligned with zeta_i because PCA
and VCM normals carry arbitrary signs. The estimated operator is
symmetrized. With the outward normal of a unit sphere this convention gives
S = -I; compare magnitudes when the orientation is not fixed globally.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    CodimensionNotOne,
    InsufficientNeighbors,
    InvalidParams,
    SingletonPoint,
)
from .linalg import sym_eigen_batch, symmetrize, weingarten_lls_batch
from .neighborhood import SpatialIndex
from .normals import FrameField, vcm_frames
from .vcm import convolve_vcm, mcvcm


@dataclass
class ShapeOperatorField:
    S: np.ndarray  # (n, m, m), in each point's tangent basis
    frames: FrameField
    fallback: np.ndarray  # ridge regularization was needed
    neighbor_count: np.ndarray
    failures: dict = field(default_factory=dict)

    @property
    def n(self):
        return self.S.shape[0]

    @property
    def m(self):
        return self.S.shape[1]

    @property
    def ok(self):
        mask = np.ones(self.n, dtype=bool)
        mask[list(self.failures)] = False
        return mask


@dataclass
class CurvatureField:
    mean: np.ndarray
    gaussian: np.ndarray
    principal: np.ndarray  # (n, m) ascending
    directions: np.ndarray  # (n, N, m) columns pair with ``principal``
    ok: np.ndarray
    fallback: np.ndarray


def _raise_first(failures):
    if not failures:
        return
    i = min(failures)
    if failures[i] == "SingletonPoint":
        raise SingletonPoint(i)
    raise InsufficientNeighbors(f"point {i}: {failures[i]}")


def wme(cloud, frames, mask_spec, errors="raise", ridge=None, min_neighbors=1, index=None):
    """Estimate the Weingarten map at every point from given frames.

    ``mask_spec`` selects the neighbors entering the least-squares fit and
    their weights. Points with fewer than ``m`` usable neighbors are still
    solved through the ridge fallback and flagged; fewer than
    ``min_neighbors`` is an error. ``errors="record"`` stores per-point
    failures (NaN rows) instead of raising the first one.
    """
    if frames.codim != 1:
        raise CodimensionNotOne("WME needs a single normal direction per point")
    pts = cloud.points
    n, dim = pts.shape
    if frames.n != n:
        raise InvalidParams("frames and cloud differ in length")
    m = frames.m
    index = index or SpatialIndex(cloud)
    table = index.table(mask_spec)

    zeta = frames.normals
    E = frames.tangent_basis
    frame_ok = frames.ok & np.all(np.isfinite(zeta), axis=1)
    idx = np.where(table.indices >= 0, table.indices, np.arange(n)[:, None])
    w = table.weights * frame_ok[idx]
    zeta0 = np.where(frame_ok[:, None], zeta, 0.0)
    E0 = np.where(frame_ok[:, None, None], E, 0.0)

    dx = pts[idx] - pts[:, None, :]
    zj = zeta0[idx]
    sign = np.where(np.einsum("nkd,nd->nk", zj, zeta0) < 0, -1.0, 1.0)
    dz = sign[:, :, None] * zj - zeta0[:, None, :]
    Delta = np.einsum("ndm,nkd->nmk", E0, dx)
    Xi = np.einsum("ndm,nkd->nmk", E0, dz)

    count = np.sum(w > 0, axis=1)
    failures = {}
    for i in np.flatnonzero(~frame_ok):
        failures[int(i)] = frames.failures.get(int(i), "FrameFailure")
    for i in np.flatnonzero(frame_ok & (count == 0)):
        failures[int(i)] = "SingletonPoint"
    for i in np.flatnonzero(frame_ok & (count > 0) & (count < min_neighbors)):
        failures[int(i)] = "InsufficientNeighbors"
    if errors == "raise":
        _raise_first(failures)

    live = np.ones(n, dtype=bool)
    live[list(failures)] = False
    S = np.full((n, m, m), np.nan)
    fallback = np.zeros(n, dtype=bool)
    if np.any(live):
        Sl, fb, _ = weingarten_lls_batch(Xi[live], Delta[live], w[live], ridge)
        S[live] = symmetrize(Sl)
        fallback[live] = fb
    return ShapeOperatorField(S, frames, fallback, count, failures)


def vwme(
    cloud,
    R,
    vcm_samples,
    seed,
    conv_spec,
    mask_spec,
    m=2,
    errors="raise",
    ridge=None,
    index=None,
    workers=None,
):
    """WME with normals and tangents from the convolved Monte-Carlo VCM."""
    if int(vcm_samples) != vcm_samples or vcm_samples < 1:
        raise InvalidParams(f"vcm_samples must be a positive integer, got {vcm_samples}")
    index = index or SpatialIndex(cloud)
    field_ = mcvcm(cloud, R, int(vcm_samples), seed, workers=workers)
    conv = convolve_vcm(field_, cloud, conv_spec, index=index)
    frames = vcm_frames(conv, m)
    return wme(cloud, frames, mask_spec, errors=errors, ridge=ridge, index=index)


def curvatures(shape, frames=None):
    """Mean, Gaussian and principal curvatures from a shape-operator field.

    H = trace(S) / m and K = det(S). Principal directions are the
    eigenvectors of S mapped into R^N through the tangent basis.
    """
    frames = frames or shape.frames
    S = shape.S
    n, m, _ = S.shape
    ok = shape.ok & np.all(np.isfinite(S), axis=(1, 2))
    H = np.full(n, np.nan)
    K = np.full(n, np.nan)
    kappa = np.full((n, m), np.nan)
    dirs = np.full((n, frames.tangent_basis.shape[1], m), np.nan)
    if np.any(ok):
        Ss = symmetrize(S[ok])
        H[ok] = np.trace(Ss, axis1=1, axis2=2) / m
        K[ok] = np.linalg.det(Ss)
        vals, vecs = sym_eigen_batch(Ss)
        kappa[ok] = vals
        dirs[ok] = frames.tangent_basis[ok] @ vecs
    return CurvatureField(H, K, kappa, dirs, ok, shape.fallback.copy())
