"""Synthetic surfaces with analytic normals and curvatures.

Curvatures are reported with the outward normal and the convention that a
convex surface has positive mean curvature (sphere of radius rho: H = 1/rho).
"""

import math
from dataclasses import dataclass

import numpy as np

from . import rng as _rng
from .errors import InvalidParams
from .pointcloud import MAX_DIM, MIN_DIM, GroundTruth, PointCloud

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class TorusParams:
    major_radius: float = 2.0
    minor_radius: float = 1.0
    theta_range: tuple = (0.0, TWO_PI)
    phi_range: tuple = (0.0, TWO_PI)

    def __post_init__(self):
        R, r = self.major_radius, self.minor_radius
        if not (r > 0 and R > 0):
            raise InvalidParams("torus radii must be positive")
        if r >= R:
            raise InvalidParams(f"minor radius {r} must be smaller than major radius {R}")
        for name in ("theta_range", "phi_range"):
            lo, hi = getattr(self, name)
            if not (0.0 <= lo < hi <= TWO_PI + 1e-12):
                raise InvalidParams(f"{name} {lo, hi} must be a nonempty interval in [0, 2pi]")

    @property
    def is_full(self):
        return all(
            lo == 0.0 and abs(hi - TWO_PI) < 1e-12 for lo, hi in (self.theta_range, self.phi_range)
        )

    @classmethod
    def sectional(cls, major_radius=2.0, minor_radius=1.0, theta_max=TWO_PI, phi_max=1.5 * math.pi):
        """Default open torus: three quarters of the full revolution."""
        return cls(major_radius, minor_radius, (0.0, theta_max), (0.0, phi_max))


def torus_point(theta, phi, R, r):
    ring = R + r * np.cos(theta)
    return np.stack([ring * np.cos(phi), ring * np.sin(phi), r * np.sin(theta)], axis=-1)


def torus_normal(theta, phi):
    return np.stack(
        [np.cos(theta) * np.cos(phi), np.cos(theta) * np.sin(phi), np.sin(theta)], axis=-1
    )


def torus_curvatures(theta, R, r):
    """Mean and Gaussian curvature of the torus at tube angle ``theta``."""
    c = np.cos(theta)
    H = (R + 2.0 * r * c) / (2.0 * r * (R + r * c))
    K = c / (r * (R + r * c))
    return H, K


def _check_count(n):
    if int(n) != n or n < 1:
        raise InvalidParams(f"point count must be a positive integer, got {n}")
    return int(n)


def sample_torus(n, params=None, seed=0, area_uniform=False):
    """Sample ``n`` torus points uniformly in (theta, phi) over the ranges.

    With ``area_uniform`` theta is thinned by rejection with acceptance
    ``(R + r cos theta) / (R + r)``, making the draw uniform in surface area.
    """
    n = _check_count(n)
    p = params or TorusParams()
    R, r = p.major_radius, p.minor_radius
    gen = _rng.generator(seed, _rng.STREAM_SURFACE)
    t0, t1 = p.theta_range
    f0, f1 = p.phi_range
    if area_uniform:
        thetas = np.empty(0)
        while thetas.size < n:
            cand = gen.uniform(t0, t1, size=2 * n)
            keep = gen.uniform(0.0, 1.0, size=2 * n) * (R + r) < R + r * np.cos(cand)
            thetas = np.concatenate([thetas, cand[keep]])
        theta = thetas[:n]
    else:
        theta = gen.uniform(t0, t1, size=n)
    phi = gen.uniform(f0, f1, size=n)
    pts = torus_point(theta, phi, R, r)
    H, K = torus_curvatures(theta, R, r)
    truth = GroundTruth(
        normals=torus_normal(theta, phi),
        mean_curvature=H,
        gaussian_curvature=K,
        params={"surface": "torus", "theta": theta, "phi": phi, "R": R, "r": r},
    )
    return PointCloud(pts), truth


def sample_hypersphere(n, dim=3, radius=1.0, seed=0):
    """Sample ``n`` points uniformly on the sphere S^{dim-1} of the given radius."""
    n = _check_count(n)
    if not MIN_DIM <= dim <= MAX_DIM:
        raise InvalidParams(f"ambient dimension {dim} outside [{MIN_DIM}, {MAX_DIM}]")
    if not radius > 0:
        raise InvalidParams("radius must be positive")
    gen = _rng.generator(seed, _rng.STREAM_SURFACE)
    g = gen.standard_normal((n, dim))
    norms = np.linalg.norm(g, axis=1)
    while np.any(norms == 0):  # measure-zero, but keep the division safe
        bad = norms == 0
        g[bad] = gen.standard_normal((int(bad.sum()), dim))
        norms = np.linalg.norm(g, axis=1)
    unit = g / norms[:, None]
    m = dim - 1
    kappa = 1.0 / radius
    truth = GroundTruth(
        normals=unit,
        mean_curvature=np.full(n, kappa),
        gaussian_curvature=np.full(n, kappa**m),
        shape_operator=np.broadcast_to(kappa * np.eye(m), (n, m, m)),
        params={"surface": "hypersphere", "radius": radius},
    )
    return PointCloud(radius * unit), truth


def sample_plane(n, dim=3, extent=1.0, seed=0):
    """Points on the coordinate plane ``x2 = ... = x{N-1} = 0``; flat ground truth.

    Used for sanity checks (zero curvature everywhere).
    """
    n = _check_count(n)
    gen = _rng.generator(seed, _rng.STREAM_SURFACE)
    pts = np.zeros((n, dim))
    pts[:, :2] = gen.uniform(-extent, extent, size=(n, 2))
    normals = None
    if dim == 3:
        normals = np.tile([0.0, 0.0, 1.0], (n, 1))
    truth = GroundTruth(
        normals=normals,
        mean_curvature=np.zeros(n),
        gaussian_curvature=np.zeros(n),
        params={"surface": "plane"},
    )
    return PointCloud(pts), truth


def make_surface(name, n, seed=0, **kw):
    """Dispatch by surface name: ``torus``, ``torus-sectional``, ``hypersphere``."""
    if name in ("torus", "torus-sectional"):
        R = kw.get("major_radius", 2.0)
        r = kw.get("minor_radius", 1.0)
        if name == "torus":
            params = TorusParams(R, r)
        else:
            params = TorusParams.sectional(
                R, r, kw.get("theta_max", TWO_PI), kw.get("phi_max", 1.5 * math.pi)
            )
        return sample_torus(n, params, seed, area_uniform=kw.get("area_uniform", False))
    if name == "hypersphere":
        return sample_hypersphere(n, kw.get("dim", 3), kw.get("radius", 1.0), seed)
    if name == "plane":
        return sample_plane(n, kw.get("dim", 3), seed=seed)
    raise InvalidParams(f"unknown surface {name!r}")
