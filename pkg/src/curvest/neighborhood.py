"""Exact neighbor search and the weight schemes used by the estimators.

Three schemes are supported: the k nearest neighbors, an open epsilon ball,
and a truncated Gaussian kernel. In every scheme the query point itself is
excluded, neighbors are ordered by distance with ties broken by index, and
distances are recomputed from coordinates so results agree exactly with a
linear scan.
"""

from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .errors import InsufficientPoints, InvalidParams, NoNeighbors, SingletonPoint

# slack on tree radii; candidates are re-filtered with exact distances
_PAD = 1e-9


@dataclass(frozen=True)
class KNN:
    k: int

    def __post_init__(self):
        if int(self.k) != self.k or self.k < 1:
            raise InvalidParams(f"k must be a positive integer, got {self.k}")


@dataclass(frozen=True)
class EpsBall:
    eps: float

    def __post_init__(self):
        if not self.eps > 0:
            raise InvalidParams(f"eps must be positive, got {self.eps}")


@dataclass(frozen=True)
class GaussianKernel:
    bandwidth: float
    cutoff: float = 3.0

    def __post_init__(self):
        if not (self.bandwidth > 0 and self.cutoff > 0):
            raise InvalidParams("bandwidth and cutoff must be positive")

    @property
    def radius(self):
        return self.cutoff * self.bandwidth


def gaussian_weight(d, h):
    return np.exp(-0.5 * (np.asarray(d, dtype=float) / h) ** 2)


def parse_spec(text):
    """Parse ``knn:30``, ``eps:0.5`` or ``gauss:0.3[:3]`` into a spec."""
    kind, _, rest = str(text).partition(":")
    kind = kind.strip().lower()
    try:
        if kind in ("knn", "k"):
            return KNN(int(rest))
        if kind in ("eps", "ball", "epsball"):
            return EpsBall(float(rest))
        if kind in ("gauss", "gaussian"):
            parts = rest.split(":")
            if len(parts) == 2:
                return GaussianKernel(float(parts[0]), float(parts[1]))
            return GaussianKernel(float(parts[0]))
    except ValueError:
        pass
    raise InvalidParams(f"cannot parse neighborhood spec {text!r}")


def format_spec(spec):
    if isinstance(spec, KNN):
        return f"knn:{spec.k}"
    if isinstance(spec, EpsBall):
        return f"eps:{spec.eps!r}"
    return f"gauss:{spec.bandwidth!r}:{spec.cutoff!r}"


@dataclass(frozen=True)
class WeightedNeighbors:
    indices: np.ndarray
    weights: np.ndarray
    distances: np.ndarray

    def __len__(self):
        return len(self.indices)


class SpatialIndex:
    """k-d tree over a point cloud answering exact neighborhood queries."""

    def __init__(self, cloud):
        pts = cloud.points if hasattr(cloud, "points") else np.asarray(cloud, dtype=float)
        self.points = pts
        self.tree = cKDTree(pts)

    @property
    def n(self):
        return self.points.shape[0]

    def _sorted(self, i, cand):
        cand = np.asarray(cand, dtype=np.intp)
        cand = cand[cand != i]
        d = np.linalg.norm(self.points[cand] - self.points[i], axis=1)
        order = np.lexsort((cand, d))
        return cand[order], d[order]

    def _within(self, i, radius, strict):
        cand = self.tree.query_ball_point(self.points[i], radius * (1 + _PAD) + _PAD)
        idx, d = self._sorted(i, cand)
        keep = d < radius if strict else d <= radius
        return idx[keep], d[keep]

    def _knn(self, i, k):
        if self.n == 1:
            raise NoNeighbors("a one-point cloud has no neighbors")
        if k >= self.n:
            raise InsufficientPoints(f"k={k} neighbors requested from a cloud of {self.n} points")
        # k+1 covers the point itself; then widen to the k-th distance to catch ties
        _, cand = self.tree.query(self.points[i], k=k + 1)
        idx, d = self._sorted(i, np.atleast_1d(cand))
        kth = d[min(k, len(d)) - 1]
        idx, d = self._within(i, kth, strict=False)
        return idx[:k], d[:k]

    def query(self, i, spec):
        """Neighbors of point ``i`` under ``spec`` (see module docstring)."""
        if isinstance(spec, KNN):
            idx, d = self._knn(i, spec.k)
            w = np.ones(len(idx))
        elif isinstance(spec, EpsBall):
            idx, d = self._within(i, spec.eps, strict=True)
            w = np.ones(len(idx))
        elif isinstance(spec, GaussianKernel):
            idx, d = self._within(i, spec.radius, strict=False)
            w = gaussian_weight(d, spec.bandwidth)
        else:
            raise InvalidParams(f"unknown neighborhood spec {spec!r}")
        if len(idx) == 0:
            raise SingletonPoint(i)
        return WeightedNeighbors(idx, w, d)

    def table(self, spec):
        """Neighborhoods of every point as padded arrays (see :class:`NeighborTable`)."""
        n = self.n
        if isinstance(spec, KNN):
            return self._knn_table(spec.k)
        rows = []
        for i in range(n):
            try:
                rows.append(self.query(i, spec))
            except SingletonPoint:
                rows.append(None)
        return NeighborTable.from_rows(rows)

    def _knn_table(self, k):
        n = self.n
        if n == 1:
            raise NoNeighbors("a one-point cloud has no neighbors")
        if k >= n:
            raise InsufficientPoints(f"k={k} neighbors requested from a cloud of {n} points")
        extra = min(k + 2, n)
        _, cand = self.tree.query(self.points, k=extra)
        cand = cand.reshape(n, extra)
        idx = np.empty((n, k), dtype=np.intp)
        dist = np.empty((n, k))
        for i in range(n):
            row, d = self._sorted(i, cand[i])
            # a tie straddling the k-th slot needs the exact path
            if len(row) > k and d[k] <= d[k - 1] * (1 + _PAD) + _PAD:
                row, d = self._knn(i, k)
            idx[i] = row[:k]
            dist[i] = d[:k]
        return NeighborTable(idx, np.ones((n, k)), dist, np.full(n, k))


@dataclass
class NeighborTable:
    """Neighborhoods of all points, padded to a common width.

    Padding slots hold index -1 and weight 0. ``counts[i] == 0`` marks a
    singleton point.
    """

    indices: np.ndarray
    weights: np.ndarray
    distances: np.ndarray
    counts: np.ndarray

    @classmethod
    def from_rows(cls, rows):
        n = len(rows)
        width = max([len(r) for r in rows if r is not None] + [1])
        idx = np.full((n, width), -1, dtype=np.intp)
        w = np.zeros((n, width))
        d = np.zeros((n, width))
        counts = np.zeros(n, dtype=np.intp)
        for i, r in enumerate(rows):
            if r is None:
                continue
            c = len(r)
            idx[i, :c] = r.indices
            w[i, :c] = r.weights
            d[i, :c] = r.distances
            counts[i] = c
        return cls(idx, w, d, counts)

    @property
    def singletons(self):
        return np.flatnonzero(self.counts == 0)

    def row(self, i):
        c = self.counts[i]
        if c == 0:
            raise SingletonPoint(i)
        return WeightedNeighbors(self.indices[i, :c], self.weights[i, :c], self.distances[i, :c])


def build_index(cloud):
    return SpatialIndex(cloud)


def neighbors(index, i, spec):
    return index.query(i, spec)


def brute_neighbors(points, i, spec):
    """Linear-scan reference for :meth:`SpatialIndex.query`."""
    points = np.asarray(points, dtype=float)
    n = len(points)
    d = np.linalg.norm(points - points[i], axis=1)
    others = np.array([j for j in range(n) if j != i], dtype=np.intp)
    do = d[others]
    order = np.lexsort((others, do))
    others, do = others[order], do[order]
    if isinstance(spec, KNN):
        if spec.k >= n:
            raise InsufficientPoints("k too large")
        idx, dist = others[: spec.k], do[: spec.k]
        w = np.ones(len(idx))
    elif isinstance(spec, EpsBall):
        keep = do < spec.eps
        idx, dist = others[keep], do[keep]
        w = np.ones(len(idx))
    else:
        keep = do <= spec.radius
        idx, dist = others[keep], do[keep]
        w = gaussian_weight(dist, spec.bandwidth)
    if len(idx) == 0:
        raise SingletonPoint(i)
    return WeightedNeighbors(idx, w, dist)
