"""Additive noise applied independently to every coordinate."""

import numpy as np

from . import rng as _rng
from .errors import InvalidParams, NegativeScale
from .pointcloud import PointCloud

KINDS = ("gaussian", "uniform")


def add_noise(cloud, kind, scale, seed=0):
    """Return a noisy copy of ``cloud``.

    ``gaussian``: each coordinate gets an independent N(0, scale^2) draw.
    ``uniform``: each coordinate gets an independent U(-scale, scale) draw.
    """
    if kind not in KINDS:
        raise InvalidParams(f"unknown noise kind {kind!r}; expected one of {KINDS}")
    if not scale >= 0:
        raise NegativeScale(f"noise scale must be nonnegative, got {scale}")
    if scale == 0:
        return PointCloud(cloud.points.copy())
    gen = _rng.generator(seed, _rng.STREAM_NOISE)
    shape = cloud.points.shape
    if kind == "gaussian":
        delta = gen.normal(0.0, scale, size=shape)
    else:
        delta = gen.uniform(-scale, scale, size=shape)
    return PointCloud(cloud.points + delta)
