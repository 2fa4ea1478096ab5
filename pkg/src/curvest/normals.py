"""Tangent/normal frame estimation from PCA and from the VCM eigenbasis.

Frames store column bases: ``normal_basis`` is ``(N, N-m)`` and
``tangent_basis`` is ``(N, m)``; together they form an orthonormal basis
of R^N.

Eigenvector roles. The textbook listing of the PCA estimator assigns the
"first m" (smallest-eigenvalue) eigenvectors to the normal space and the
"last N-m" to the tangent space, which only typechecks when m = N - m. The
local covariance of a sampled m-manifold has its m large eigenvalues along
the surface, so here the normal space is the N-m smallest and the tangent
space the m largest. The VCM concentrates along normal cones, so its roles
are reversed: the normal space is the N-m largest eigenvalues.
"""

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import (
    CodimensionNotOne,
    DegenerateNeighborhood,
    InvalidInput,
    InvalidParams,
    SingletonPoint,
)
from .linalg import sym_eigen, sym_eigen_batch
from .neighborhood import SpatialIndex


@dataclass(frozen=True)
class TangentFrame:
    normal_basis: np.ndarray
    tangent_basis: np.ndarray
    eigenvalues: np.ndarray

    @property
    def normal(self):
        if self.normal_basis.shape[1] != 1:
            raise CodimensionNotOne("frame has more than one normal direction")
        return self.normal_basis[:, 0]


@dataclass
class FrameField:
    """Per-point frames for a whole cloud.

    ``failures`` maps a point index to the name of the error that prevented
    its estimation; those rows are NaN.
    """

    normal_basis: np.ndarray  # (n, N, N-m)
    tangent_basis: np.ndarray  # (n, N, m)
    eigenvalues: np.ndarray  # (n, N)
    failures: dict = field(default_factory=dict)
    method: str = ""

    @property
    def n(self):
        return self.normal_basis.shape[0]

    @property
    def m(self):
        return self.tangent_basis.shape[2]

    @property
    def codim(self):
        return self.normal_basis.shape[2]

    @property
    def normals(self):
        if self.codim != 1:
            raise CodimensionNotOne("frames have more than one normal direction")
        return self.normal_basis[:, :, 0]

    @property
    def ok(self):
        mask = np.ones(self.n, dtype=bool)
        mask[list(self.failures)] = False
        return mask

    def frame(self, i):
        if i in self.failures:
            raise InvalidInput(f"frame {i} failed: {self.failures[i]}")
        return TangentFrame(self.normal_basis[i], self.tangent_basis[i], self.eigenvalues[i])


def _check_m(m, dim):
    if int(m) != m or not 1 <= m < dim:
        raise InvalidParams(f"intrinsic dimension must be in [1, {dim - 1}], got {m}")
    return int(m)


def _raise_first(failures, errors):
    if errors == "raise" and failures:
        i = min(failures)
        name = failures[i]
        if name == "SingletonPoint":
            raise SingletonPoint(i)
        raise DegenerateNeighborhood(f"point {i}: {name}")


def pca_frames(cloud, spec, m=2, errors="raise", index=None):
    """PCA frames at every point.

    The neighborhood of ``x_i`` is its ``spec`` neighbors plus ``x_i``
    itself (weight 1). Weights enter both the mean and the covariance, so a
    Gaussian kernel gives a weighted PCA. ``errors="record"`` stores
    per-point failures in the result instead of raising.
    """
    pts = cloud.points
    n, dim = pts.shape
    m = _check_m(m, dim)
    index = index or SpatialIndex(cloud)
    table = index.table(spec)
    idx = np.where(table.indices >= 0, table.indices, np.arange(n)[:, None])
    w = np.concatenate([np.ones((n, 1)), table.weights], axis=1)
    nbr = np.concatenate([pts[:, None, :], pts[idx]], axis=1)
    wsum = w.sum(axis=1)
    mean = np.einsum("nk,nkd->nd", w, nbr) / wsum[:, None]
    cen = nbr - mean[:, None, :]
    cov = np.einsum("nk,nka,nkb->nab", w, cen, cen)
    vals, vecs = sym_eigen_batch(cov)

    failures = {}
    distinct = np.sum((table.distances > 0) & (table.weights > 0), axis=1)
    for i in np.flatnonzero(table.counts == 0):
        failures[int(i)] = "SingletonPoint"
    for i in np.flatnonzero((table.counts > 0) & (distinct < m)):
        failures[int(i)] = "DegenerateNeighborhood"
    _raise_first(failures, errors)

    normal = vecs[:, :, : dim - m].copy()
    tangent = vecs[:, :, dim - m :].copy()
    bad = list(failures)
    normal[bad] = np.nan
    tangent[bad] = np.nan
    vals[bad] = np.nan
    return FrameField(normal, tangent, vals, failures, "pca")


def pca_frame(cloud, i, spec, m=2, index=None):
    """PCA frame at a single point; see :func:`pca_frames`."""
    pts = cloud.points
    dim = pts.shape[1]
    m = _check_m(m, dim)
    index = index or SpatialIndex(cloud)
    nb = index.query(i, spec)
    if np.sum((nb.distances > 0) & (nb.weights > 0)) < m:
        raise DegenerateNeighborhood(f"point {i}: fewer than {m} distinct neighbors")
    x = np.vstack([pts[i], pts[nb.indices]])
    w = np.concatenate([[1.0], nb.weights])
    mean = w @ x / w.sum()
    cen = x - mean
    cov = (cen * w[:, None]).T @ cen
    vals, vecs = sym_eigen(cov)
    return TangentFrame(vecs[:, : dim - m], vecs[:, dim - m :], vals)


def _orient(normal, orientation):
    if orientation is None:
        return normal
    dots = np.einsum("nd,nd->n", normal[:, :, 0], orientation)
    flip = dots < 0
    normal = normal.copy()
    normal[flip] *= -1.0
    return normal


def vcm_frame(vcm, m=2, orientation=None):
    """Frame from one (convolved) VCM matrix.

    The normal space is spanned by the eigenvectors of the N-m largest
    eigenvalues. For codimension 1 an optional ``orientation`` vector picks
    the normal's sign (``<normal, orientation> >= 0``).
    """
    V = np.asarray(vcm, dtype=float)
    if V.ndim != 2 or V.shape[0] != V.shape[1]:
        raise InvalidInput("VCM must be a square matrix")
    dim = V.shape[0]
    m = _check_m(m, dim)
    vals, vecs = sym_eigen(V)
    if vals[0] < -1e-12 * max(1.0, abs(vals[-1])):
        raise InvalidInput("VCM must be positive semidefinite")
    normal = vecs[:, m:]
    tangent = vecs[:, :m]
    if orientation is not None and dim - m == 1:
        normal = _orient(normal[None], np.asarray(orientation, dtype=float)[None])[0]
    return TangentFrame(normal, tangent, vals)


def vcm_frames(field, m=2, orient=True):
    """Frames from every tensor of a (convolved) VCM field.

    With ``orient`` and codimension 1, each normal is signed to agree with
    the field's first-moment vector, which points toward the side where the
    local offset region is larger (the convex side).
    """
    T = field.tensors
    dim = T.shape[1]
    m = _check_m(m, dim)
    vals, vecs = sym_eigen_batch(T)
    normal = vecs[:, :, m:]
    tangent = vecs[:, :, :m].copy()
    if orient and dim - m == 1 and field.moments is not None:
        normal = _orient(normal, field.moments)
    return FrameField(normal.copy(), tangent, vals, {}, "vcm")


def analytic_frames(normals):
    """Codimension-1 frames from known unit normals.

    The tangent basis is the complement produced by the Householder
    reflection that maps the last axis onto the normal.
    """
    nrm = np.asarray(normals, dtype=float)
    n, dim = nrm.shape
    e = np.zeros(dim)
    e[-1] = 1.0
    u = nrm - e
    unorm = np.linalg.norm(u, axis=1)
    # n == e already: the reflection degenerates to the identity
    near = unorm < 1e-12
    u[near] = 0.0
    u[~near] /= unorm[~near, None]
    Hh = np.eye(dim)[None] - 2.0 * u[:, :, None] * u[:, None, :]
    tangent = Hh[:, :, : dim - 1]
    normal = Hh[:, :, dim - 1 :]
    # Householder maps e to n exactly up to round-off; reuse the given normal
    normal = nrm[:, :, None].copy()
    eig = np.zeros((n, dim))
    return FrameField(normal, tangent.copy(), eig, {}, "analytic")


def align_frames(frames, reference):
    """Copy of ``frames`` with each normal flipped so ``<n_i, ref_i> >= 0``.

    A zero inner product keeps the original sign.
    """
    if frames.codim != 1:
        raise CodimensionNotOne("orientation alignment needs a single normal per point")
    ref = np.asarray(reference, dtype=float)
    if ref.shape != (frames.n, frames.normal_basis.shape[1]):
        raise InvalidInput("reference must hold one vector per point")
    return replace(frames, normal_basis=_orient(frames.normal_basis, ref))
