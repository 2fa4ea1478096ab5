"""Evaluation metrics: cosine similarity, curvature MSE, summaries."""

import numpy as np

from .errors import Empty, InvalidParams, LengthMismatch, ZeroVector


def cosine_similarity(a, b, absolute=False):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0 or nb == 0:
        raise ZeroVector("cosine similarity is undefined for a zero vector")
    c = float(np.clip(a @ b / (na * nb), -1.0, 1.0))
    return abs(c) if absolute else c


def cosine_rows(A, B, absolute=False):
    """Row-wise cosine similarity of two ``(n, N)`` arrays."""
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    if A.shape != B.shape:
        raise LengthMismatch(f"shapes {A.shape} and {B.shape} differ")
    na = np.linalg.norm(A, axis=1)
    nb = np.linalg.norm(B, axis=1)
    if np.any(na == 0) or np.any(nb == 0):
        raise ZeroVector("cosine similarity is undefined for a zero vector")
    c = np.clip(np.einsum("nd,nd->n", A, B) / (na * nb), -1.0, 1.0)
    return np.abs(c) if absolute else c


def normal_scores(estimated, truth):
    """Cosine statistics of estimated vs true normals over finite rows."""
    est = np.asarray(estimated, dtype=float)
    ok = np.all(np.isfinite(est), axis=1)
    c = cosine_rows(est[ok], np.asarray(truth)[ok])
    return {
        "mean_cos": float(np.mean(c)) if c.size else float("nan"),
        "mean_abs_cos": float(np.mean(np.abs(c))) if c.size else float("nan"),
        "flip_fraction": float(np.mean(c < 0)) if c.size else float("nan"),
        "failure_rate": float(1.0 - ok.mean()),
    }


def curvature_mse(estimated, truth, mode="absolute", quantity="mean", mask=None):
    """Mean squared curvature error over points where estimation succeeded.

    ``estimated`` is a :class:`CurvatureField` or an array; ``truth`` a
    :class:`GroundTruth` or an array. ``mode="absolute"`` compares
    magnitudes, which removes the dependence on normal orientation.
    """
    if mode not in ("signed", "absolute"):
        raise InvalidParams(f"unknown mode {mode!r}")
    if hasattr(estimated, "gaussian"):
        est = estimated.mean if quantity == "mean" else estimated.gaussian
        ok = estimated.ok
    else:
        est = np.asarray(estimated, dtype=float)
        ok = np.ones(len(est), dtype=bool)
    if hasattr(truth, "mean_curvature"):
        ref = truth.mean_curvature if quantity == "mean" else truth.gaussian_curvature
    else:
        ref = np.asarray(truth, dtype=float)
    est = np.asarray(est, dtype=float)
    ref = np.asarray(ref, dtype=float)
    if est.shape != ref.shape:
        raise LengthMismatch(f"{len(est)} estimates vs {len(ref)} reference values")
    ok = ok & np.isfinite(est)
    if mask is not None:
        ok = ok & mask
    if not np.any(ok):
        return float("nan")
    e, r = est[ok], ref[ok]
    if mode == "absolute":
        e, r = np.abs(e), np.abs(r)
    return float(np.mean((e - r) ** 2))


def failure_rate(field):
    return float(1.0 - np.mean(field.ok))


def orientation_consistency(estimated_mean, true_mean):
    """Fraction of successful points whose estimated H has the true sign
    under the outward-normal convention (S = -dN gives H_est = -H_true)."""
    e = np.asarray(estimated_mean, dtype=float)
    r = np.asarray(true_mean, dtype=float)
    ok = np.isfinite(e) & (r != 0)
    if not np.any(ok):
        return float("nan")
    return float(np.mean(np.sign(-e[ok]) == np.sign(r[ok])))


def summarize(values, bins=10):
    v = np.asarray(values, dtype=float).ravel()
    if v.size == 0:
        raise Empty("cannot summarize an empty list")
    lo, hi = float(v.min()), float(v.max())
    if lo == hi:
        edges = np.linspace(lo - 0.5, hi + 0.5, bins + 1)
    else:
        edges = np.linspace(lo, hi, bins + 1)
    counts, edges = np.histogram(v, bins=edges)
    return {
        "mean": float(v.mean()),
        "median": float(np.median(v)),
        "stddev": float(v.std()),
        "counts": counts,
        "edges": edges,
    }
