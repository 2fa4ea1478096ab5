"""Small dense kernels: symmetric eigendecomposition and the regularized
least-squares solve behind the Weingarten map estimators.

Matrices here are at most 10x10, so the eigensolver is a cyclic Jacobi
iteration vectorized over a batch of matrices rather than a LAPACK call.
"""

from typing import NamedTuple

import numpy as np

from .errors import AllWeightsZero, DimensionMismatch, InvalidInput

MAX_DIM = 10
COND_LIMIT = 1e12
RIDGE_SCALE = 1e-10


class EigenPair(NamedTuple):
    values: np.ndarray  # ascending
    vectors: np.ndarray  # column j pairs with values[j]


class LLSResult(NamedTuple):
    S: np.ndarray
    fallback: bool
    ridge: float


def symmetrize(M):
    M = np.asarray(M, dtype=float)
    return 0.5 * (M + np.swapaxes(M, -1, -2))


def _canonical_signs(vectors):
    # flip each column so its largest-magnitude entry is >= 0
    idx = np.argmax(np.abs(vectors), axis=-2)
    pick = np.take_along_axis(vectors, idx[..., None, :], axis=-2)
    signs = np.where(pick < 0, -1.0, 1.0)
    return vectors * signs


def _jacobi(A, tol=1e-15, max_sweeps=60):
    """Cyclic Jacobi on a stack of symmetric matrices, in place on a copy."""
    A = np.array(A, dtype=float, copy=True)
    batch, n, _ = A.shape
    V = np.broadcast_to(np.eye(n), A.shape).copy()
    if n == 1:
        return A[:, 0, :1].copy(), V
    scale = np.sqrt(np.sum(A * A, axis=(1, 2)))
    scale[scale == 0] = 1.0
    iu = np.triu_indices(n, 1)
    for _ in range(max_sweeps):
        off = np.sqrt(2.0 * np.sum(A[:, iu[0], iu[1]] ** 2, axis=1))
        active = off > tol * scale
        if not np.any(active):
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[:, p, q]
                nz = np.abs(apq) > 1e-300
                if not np.any(nz):
                    continue
                # theta**2 may overflow for tiny apq; t -> 0 is then correct
                with np.errstate(over="ignore"):
                    theta = (A[:, q, q] - A[:, p, p]) / np.where(nz, 2.0 * apq, 1.0)
                    t = np.copysign(1.0, theta) / (np.abs(theta) + np.sqrt(theta * theta + 1.0))
                t = np.where(nz, t, 0.0)
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                c_ = c[:, None]
                s_ = s[:, None]
                cp = A[:, :, p].copy()
                cq = A[:, :, q].copy()
                A[:, :, p] = c_ * cp - s_ * cq
                A[:, :, q] = s_ * cp + c_ * cq
                rp = A[:, p, :].copy()
                rq = A[:, q, :].copy()
                A[:, p, :] = c_ * rp - s_ * rq
                A[:, q, :] = s_ * rp + c_ * rq
                A[:, p, q] = 0.0
                A[:, q, p] = 0.0
                vp = V[:, :, p].copy()
                vq = V[:, :, q].copy()
                V[:, :, p] = c_ * vp - s_ * vq
                V[:, :, q] = s_ * vp + c_ * vq
    return np.diagonal(A, axis1=1, axis2=2).copy(), V


def sym_eigen_batch(Ms):
    """Eigendecomposition of a stack ``(..., n, n)`` of symmetric matrices.

    Returns ascending eigenvalues and column eigenvectors, each column
    sign-normalized so its largest-magnitude component is nonnegative.
    """
    Ms = np.asarray(Ms, dtype=float)
    if Ms.ndim < 2 or Ms.shape[-1] != Ms.shape[-2]:
        raise DimensionMismatch(f"expected square matrices, got shape {Ms.shape}")
    n = Ms.shape[-1]
    if n > MAX_DIM:
        raise DimensionMismatch(f"dimension {n} exceeds {MAX_DIM}")
    if not np.all(np.isfinite(Ms)):
        raise InvalidInput("matrix contains NaN or Inf")
    lead = Ms.shape[:-2]
    flat = symmetrize(Ms).reshape(-1, n, n)
    if flat.shape[0] == 0:
        return EigenPair(np.zeros(lead + (n,)), np.zeros(lead + (n, n)))
    values, vectors = _jacobi(flat)
    order = np.argsort(values, axis=1, kind="stable")
    values = np.take_along_axis(values, order, axis=1)
    vectors = np.take_along_axis(vectors, order[:, None, :], axis=2)
    vectors = _canonical_signs(vectors)
    return EigenPair(values.reshape(lead + (n,)), vectors.reshape(lead + (n, n)))


def sym_eigen(M):
    """Eigendecomposition of one symmetric matrix (values ascending)."""
    M = np.asarray(M, dtype=float)
    if M.ndim != 2:
        raise DimensionMismatch(f"expected a 2-D matrix, got shape {M.shape}")
    vals, vecs = sym_eigen_batch(M[None])
    return EigenPair(vals[0], vecs[0])


def default_ridge(gram):
    m = gram.shape[-1]
    return RIDGE_SCALE * np.trace(gram, axis1=-2, axis2=-1) / m


def weingarten_lls_batch(Xi, Delta, weights, ridge=None):
    """Batched closed-form LLS ``S = -Xi W Delta^T (Delta W Delta^T)^-1``.

    Xi, Delta: ``(B, m, k)``; weights: ``(B, k)`` diagonal of W. Rows with
    zero weight act as padding. Where the Gram matrix is singular or its
    condition number exceeds ``COND_LIMIT`` the solve uses
    ``Delta W Delta^T + ridge * I``; ``ridge=None`` selects
    ``1e-10 * trace / m``.

    Returns ``(S, fallback, ridge_used)`` arrays of shapes ``(B, m, m)``,
    ``(B,)`` and ``(B,)``. Batches whose weights sum to zero get NaN
    output; the single-problem wrapper turns that into ``AllWeightsZero``.
    """
    Xi = np.asarray(Xi, dtype=float)
    Delta = np.asarray(Delta, dtype=float)
    w = np.asarray(weights, dtype=float)
    if Xi.shape != Delta.shape or Xi.ndim != 3 or w.shape != Xi.shape[::2]:
        raise DimensionMismatch(
            f"Xi {Xi.shape}, Delta {Delta.shape}, weights {w.shape} are inconsistent"
        )
    if np.any(w < 0):
        raise InvalidInput("weights must be nonnegative")
    if ridge is not None and ridge < 0:
        raise InvalidInput("ridge must be nonnegative")
    B, m, _ = Delta.shape
    DW = Delta * w[:, None, :]
    gram = symmetrize(DW @ np.swapaxes(Delta, 1, 2))
    rhs = Xi @ np.swapaxes(DW, 1, 2)  # Xi W Delta^T
    vals, vecs = sym_eigen_batch(gram)
    lo, hi = vals[:, 0], vals[:, -1]
    with np.errstate(divide="ignore", invalid="ignore"):
        cond = np.where(lo > 0, hi / np.where(lo > 0, lo, 1.0), np.inf)
    fallback = ~(cond <= COND_LIMIT)
    auto = default_ridge(gram)
    if ridge is None or ridge == 0:
        lam = auto
    else:
        lam = np.full(B, float(ridge))
    # an all-zero Gram matrix has a zero auto ridge; any positive shift
    # works there because the right-hand side vanishes as well
    lam = np.where(lam > 0, lam, np.finfo(float).tiny / np.finfo(float).eps)
    lam_used = np.where(fallback, lam, 0.0)
    # Gram matrices are PSD; clip round-off negatives before inverting
    inv_vals = 1.0 / (np.maximum(vals, 0.0) + lam_used[:, None])
    inv = (vecs * inv_vals[:, None, :]) @ np.swapaxes(vecs, 1, 2)
    S = -rhs @ inv
    dead = w.sum(axis=1) <= 0
    S[dead] = np.nan
    return S, fallback & ~dead, lam_used


def weingarten_lls(Xi, Delta, W, ridge=None):
    """Solve ``min_S sum_j w_j |Xi_j + S Delta_j|^2`` for one point.

    ``W`` may be the diagonal ``(n,)`` or a diagonal ``(n, n)`` matrix.
    Returns an :class:`LLSResult` whose ``fallback`` flag records whether
    ridge regularization was needed.
    """
    Xi = np.atleast_2d(np.asarray(Xi, dtype=float))
    Delta = np.atleast_2d(np.asarray(Delta, dtype=float))
    W = np.asarray(W, dtype=float)
    if W.ndim == 2:
        if W.shape[0] != W.shape[1]:
            raise DimensionMismatch("W must be square")
        if np.any(W - np.diag(np.diag(W))):
            raise InvalidInput("W must be diagonal")
        W = np.diag(W)
    if Xi.shape != Delta.shape or W.shape != (Delta.shape[1],):
        raise DimensionMismatch(
            f"Xi {Xi.shape}, Delta {Delta.shape}, W {W.shape} are inconsistent"
        )
    if W.sum() <= 0:
        raise AllWeightsZero("trace(W) is zero")
    S, fb, lam = weingarten_lls_batch(Xi[None], Delta[None], W[None], ridge)
    return LLSResult(S[0], bool(fb[0]), float(lam[0]))
