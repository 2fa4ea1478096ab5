"""Point-cloud container, ground-truth labels and text I/O.

CSV files carry a one-line header ``x0,...,x{N-1}`` optionally followed by
label columns ``n0,...,n{N-1},H,K``. A CSV without a header is accepted on
load. XYZ files are headerless, whitespace separated, and always 3-D.
Reals are written with 17 significant digits so a save/load cycle is
bit-exact.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import EmptyFile, InvalidInput, IoError, ParseError, RaggedRows

MIN_DIM = 2
MAX_DIM = 10
_FMT = "%.17g"


def _readonly(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class PointCloud:
    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2:
            raise InvalidInput(f"points must be a 2-D array, got shape {pts.shape}")
        n, dim = pts.shape
        if n < 1:
            raise InvalidInput("a point cloud needs at least one point")
        if not MIN_DIM <= dim <= MAX_DIM:
            raise InvalidInput(f"ambient dimension {dim} outside [{MIN_DIM}, {MAX_DIM}]")
        if not np.all(np.isfinite(pts)):
            raise InvalidInput("points contain NaN or Inf")
        object.__setattr__(self, "points", _readonly(pts))

    @property
    def n(self):
        return self.points.shape[0]

    @property
    def dim(self):
        return self.points.shape[1]

    def __len__(self):
        return self.n


@dataclass(frozen=True)
class GroundTruth:
    """Optional per-point analytic labels for a sampled surface."""

    normals: Optional[np.ndarray] = None
    mean_curvature: Optional[np.ndarray] = None
    gaussian_curvature: Optional[np.ndarray] = None
    shape_operator: Optional[np.ndarray] = None
    params: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        lengths = set()
        for name in ("normals", "mean_curvature", "gaussian_curvature", "shape_operator"):
            val = getattr(self, name)
            if val is None:
                continue
            val = _readonly(val)
            object.__setattr__(self, name, val)
            lengths.add(val.shape[0])
        if len(lengths) > 1:
            raise InvalidInput(f"label arrays have different lengths {sorted(lengths)}")
        if self.normals is not None:
            norms = np.linalg.norm(self.normals, axis=1)
            if np.any(np.abs(norms - 1.0) > 1e-10):
                raise InvalidInput("ground-truth normals must have unit length")

    def __len__(self):
        for name in ("normals", "mean_curvature", "gaussian_curvature", "shape_operator"):
            val = getattr(self, name)
            if val is not None:
                return val.shape[0]
        return 0


def _guess_format(path):
    return "xyz" if str(path).lower().endswith(".xyz") else "csv"


def _label_columns(dim, labels):
    cols = []
    if labels is None:
        return cols
    if labels.normals is not None:
        cols += [f"n{j}" for j in range(dim)]
    if labels.mean_curvature is not None:
        cols.append("H")
    if labels.gaussian_curvature is not None:
        cols.append("K")
    return cols


def save_cloud(cloud, path, labels=None, format=None):
    """Write ``cloud`` (and optional labels, CSV only) to ``path``."""
    fmt = format or _guess_format(path)
    pts = cloud.points
    if fmt == "xyz":
        if cloud.dim != 3:
            raise InvalidInput("XYZ format holds 3-D points only")
        if labels is not None:
            raise InvalidInput("XYZ format cannot carry labels; use CSV")
        header = None
        table = pts
    elif fmt == "csv":
        if labels is not None and len(labels) not in (0, cloud.n):
            raise InvalidInput("labels and cloud have different lengths")
        header = [f"x{j}" for j in range(cloud.dim)] + _label_columns(cloud.dim, labels)
        blocks = [pts]
        if labels is not None:
            if labels.normals is not None:
                blocks.append(labels.normals)
            if labels.mean_curvature is not None:
                blocks.append(labels.mean_curvature[:, None])
            if labels.gaussian_curvature is not None:
                blocks.append(labels.gaussian_curvature[:, None])
        table = np.hstack(blocks)
    else:
        raise InvalidInput(f"unknown format {fmt!r}")
    sep = " " if fmt == "xyz" else ","
    lines = [] if header is None else [",".join(header)]
    lines += [sep.join(_FMT % v for v in row) for row in table]
    try:
        with open(path, "w") as fh:
            fh.write("\n".join(lines) + "\n")
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


def _read_rows(path, fmt):
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise EmptyFile(f"{path} holds no data")
    header = None

    def split(ln):
        if fmt == "csv" and "," in ln:
            return [t.strip() for t in ln.split(",")]
        return ln.split()

    first = split(lines[0])
    try:
        [float(t) for t in first]
    except ValueError:
        if fmt == "xyz":
            raise ParseError(f"{path}:1: XYZ files have no header") from None
        header = first
        lines = lines[1:]
    if not lines:
        raise EmptyFile(f"{path} holds a header but no data")
    rows = []
    width = len(header) if header else None
    for lineno, ln in enumerate(lines, start=2 if header else 1):
        toks = split(ln)
        if width is None:
            width = len(toks)
        if len(toks) != width:
            raise RaggedRows(f"{path}:{lineno}: expected {width} columns, got {len(toks)}")
        try:
            rows.append([float(t) for t in toks])
        except ValueError as exc:
            raise ParseError(f"{path}:{lineno}: {exc}") from None
    return header, np.array(rows, dtype=float)


def load_labeled(path, format=None):
    """Read a cloud and whatever label columns its header names.

    Returns ``(cloud, labels)``; ``labels`` is None when the file carries
    no label columns.
    """
    fmt = format or _guess_format(path)
    if fmt not in ("csv", "xyz"):
        raise InvalidInput(f"unknown format {fmt!r}")
    header, table = _read_rows(path, fmt)
    if fmt == "xyz" and table.shape[1] != 3:
        raise ParseError(f"{path}: XYZ rows need exactly 3 columns")
    if header is None:
        return PointCloud(table), None
    coords = [j for j, h in enumerate(header) if h.startswith("x")]
    dim = len(coords)
    if coords != list(range(dim)) or [header[j] for j in coords] != [f"x{j}" for j in range(dim)]:
        raise ParseError(f"{path}: header must start with x0..x{{N-1}}")
    cloud = PointCloud(table[:, :dim])
    col = {h: j for j, h in enumerate(header)}
    normals = None
    if "n0" in col:
        try:
            normals = table[:, [col[f"n{j}"] for j in range(dim)]]
        except KeyError as exc:
            raise ParseError(f"{path}: incomplete normal columns ({exc})") from None
    H = table[:, col["H"]] if "H" in col else None
    K = table[:, col["K"]] if "K" in col else None
    if normals is None and H is None and K is None:
        return cloud, None
    return cloud, GroundTruth(normals=normals, mean_curvature=H, gaussian_curvature=K)


def load_cloud(path, format=None):
    """Read the point coordinates of a CSV or XYZ file."""
    return load_labeled(path, format)[0]
