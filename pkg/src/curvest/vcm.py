"""Voronoi covariance measure of a point cloud.

For a cloud K and offset radius R, the VCM of a point p is the integral of
``(y - p)(y - p)^T`` over the part of the R-offset of K whose nearest cloud
point is p. Both estimators here normalize by the total volume of the
offset, so a field's tensors are second moments per unit offset volume and
``mass`` is the fraction of the offset volume in each Voronoi cell.

``mcvcm`` estimates the field by Monte-Carlo: pick a cloud point x, draw s
uniformly in B(x, R), and credit ``(s - p')(s - p')^T / k`` to the nearest
cloud point p' of s, where k counts the cloud points within R of s. The 1/k
weight cancels the over-sampling of regions covered by several balls, so
the estimate is unbiased for the offset integral. ``brute_vcm`` computes
the same quantity by grid quadrature and serves as an oracle.
"""

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.spatial import cKDTree

from . import rng as _rng
from .errors import InvalidParams
from .neighborhood import SpatialIndex

SHARD_SIZE = 1 << 16
DEFAULT_EPS = 0.05


@dataclass
class TensorField:
    tensors: np.ndarray  # (n, N, N)
    R: float
    sample_count: int
    moments: Optional[np.ndarray] = None  # (n, N) first moment of offsets
    mass: Optional[np.ndarray] = None  # (n,) share of the offset volume

    @property
    def n(self):
        return self.tensors.shape[0]

    @property
    def dim(self):
        return self.tensors.shape[1]


def _points(cloud):
    pts = cloud.points if hasattr(cloud, "points") else np.asarray(cloud, dtype=float)
    pts = np.asarray(pts, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
    return pts


def sample_schedule(n_points, eps=DEFAULT_EPS, constant=1.0):
    """Sample count ``constant * |K| * ln(1/eps) / eps^2`` for an eps-accurate VCM."""
    if not 0 < eps < 1:
        raise InvalidParams("eps must lie in (0, 1)")
    return int(math.ceil(constant * n_points * math.log(1.0 / eps) / eps**2))


def uniform_ball(gen, centers, R):
    """One uniform draw from B(c, R) per row of ``centers``."""
    c, dim = centers.shape
    g = gen.standard_normal((c, dim))
    norms = np.linalg.norm(g, axis=1)
    norms[norms == 0] = 1.0
    radius = R * gen.random(c) ** (1.0 / dim)
    return centers + g * (radius / norms)[:, None]


def _accumulate(n, dim, nearest, offsets, w):
    iu, ju = np.triu_indices(dim)
    tens = np.zeros((n, dim, dim))
    for a, b in zip(iu, ju):
        col = np.bincount(nearest, weights=w * offsets[:, a] * offsets[:, b], minlength=n)
        tens[:, a, b] = col
        tens[:, b, a] = col
    mom = np.stack(
        [np.bincount(nearest, weights=w * offsets[:, a], minlength=n) for a in range(dim)], axis=1
    )
    mass = np.bincount(nearest, weights=w, minlength=n)
    return tens, mom, mass


def _shard(pts, tree, R, count, seed, shard, printed):
    gen = _rng.generator(seed, _rng.STREAM_VCM + shard)
    n, dim = pts.shape
    xi = gen.integers(0, n, size=count)
    x = pts[xi]
    s = uniform_ball(gen, x, R)
    # the printed listing evaluates everything at x and leaves s unused
    q = x if printed else s
    k = tree.query_ball_point(q, R, return_length=True)
    _, nearest = tree.query(q)
    offsets = q - pts[nearest]
    w = 1.0 / k
    tens, mom, mass = _accumulate(n, dim, nearest, offsets, w)
    return tens, mom, mass, w.sum()


def worker_count(workers=None):
    if workers is not None:
        return max(1, int(workers))
    return max(1, int(os.environ.get("CURVEST_WORKERS", "1")))


def mcvcm(cloud, R, num_samples, seed=0, printed_variant=False, workers=None):
    """Monte-Carlo VCM estimate at every cloud point.

    Samples are drawn in fixed-size shards, each from its own random
    stream keyed by ``(seed, shard)``, and merged in shard order, so the
    result does not depend on ``workers``. ``printed_variant`` reproduces
    the listing that uses x instead of s (nearly all mass lands on x itself
    with a zero offset); it exists for comparison only.
    """
    pts = _points(cloud)
    if not R > 0:
        raise InvalidParams(f"offset radius must be positive, got {R}")
    if int(num_samples) != num_samples or num_samples < 1:
        raise InvalidParams(f"num_samples must be a positive integer, got {num_samples}")
    num_samples = int(num_samples)
    n, dim = pts.shape
    tree = cKDTree(pts)
    shards = []
    left = num_samples
    while left > 0:
        shards.append(min(SHARD_SIZE, left))
        left -= shards[-1]

    def run(sid):
        return _shard(pts, tree, R, shards[sid], seed, sid, printed_variant)

    nworkers = min(worker_count(workers), len(shards))
    if nworkers > 1:
        with ThreadPoolExecutor(nworkers) as pool:
            parts = list(pool.map(run, range(len(shards))))
    else:
        parts = [run(sid) for sid in range(len(shards))]

    tens = np.zeros((n, dim, dim))
    mom = np.zeros((n, dim))
    mass = np.zeros(n)
    total = 0.0
    for t, mo, ma, wt in parts:
        tens += t
        mom += mo
        mass += ma
        total += wt
    return TensorField(tens / total, float(R), num_samples, mom / total, mass / total)


def brute_vcm(cloud, R, grid_step, chunk=1 << 18):
    """Grid-quadrature VCM, for clouds in dimension N <= 3.

    Every cell center y of a grid with spacing ``grid_step`` over the
    bounding box inflated by R with ``d_K(y) <= R`` contributes
    ``(y - p)(y - p)^T * step^N`` to its nearest point p. Output is divided
    by the total offset volume, matching :func:`mcvcm`.
    """
    pts = _points(cloud)
    n, dim = pts.shape
    if dim > 3:
        raise InvalidParams("brute_vcm supports ambient dimension <= 3")
    if not (R > 0 and grid_step > 0):
        raise InvalidParams("R and grid_step must be positive")
    lo = pts.min(axis=0) - R
    hi = pts.max(axis=0) + R
    counts = np.ceil((hi - lo) / grid_step).astype(np.int64)
    total_cells = int(np.prod(counts))
    tree = cKDTree(pts)
    cell = grid_step**dim
    tens = np.zeros((n, dim, dim))
    mom = np.zeros((n, dim))
    mass = np.zeros(n)
    used = 0
    for start in range(0, total_cells, chunk):
        flat = np.arange(start, min(start + chunk, total_cells))
        ijk = np.stack(np.unravel_index(flat, counts), axis=1)
        y = lo + (ijk + 0.5) * grid_step
        d, nearest = tree.query(y, distance_upper_bound=R * (1 + 1e-12))
        keep = d <= R
        if not np.any(keep):
            continue
        y = y[keep]
        nearest = nearest[keep]
        used += len(y)
        t, mo, ma = _accumulate(n, dim, nearest, y - pts[nearest], np.full(len(y), cell))
        tens += t
        mom += mo
        mass += ma
    total = mass.sum()
    return TensorField(tens / total, float(R), used, mom / total, mass / total)


def convolve_vcm(field, cloud, spec, index=None):
    """Sum each point's tensor with its ``spec`` neighbors' tensors.

    Output at x_i is ``V(x_i) + sum_j w_j V(x_j)``; the point itself always
    enters with weight 1, so an empty neighborhood returns ``V(x_i)``
    unchanged. Moments and masses are convolved the same way.
    """
    index = index or SpatialIndex(cloud)
    table = index.table(spec)
    idx = np.where(table.indices >= 0, table.indices, 0)
    w = table.weights

    def conv(a):
        return a + np.einsum("nk,nk...->n...", w, a[idx])

    moments = conv(field.moments) if field.moments is not None else None
    mass = conv(field.mass) if field.mass is not None else None
    out = conv(field.tensors)
    return TensorField(out, field.R, field.sample_count, moments, mass)
