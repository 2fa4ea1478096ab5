"""Grid sweeps over surfaces, noise levels and estimator parameters.

One CSV row per (grid cell, seed). Rows are written in grid order as soon
as they are available, whatever the number of workers. Wall-clock times go
to a separate ``<name>.timing.csv`` so the result table itself is
byte-identical across reruns. A cell that raises is recorded with the
exception name in the ``error`` column; per-point failures (such as
singleton points under an epsilon ball) only raise ``failure_rate``.
"""

import csv
import itertools
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .. import metrics as M
from ..neighborhood import SpatialIndex
from ..noise import add_noise
from ..normals import analytic_frames, pca_frames, vcm_frames
from ..surfaces import make_surface
from ..vcm import convolve_vcm, mcvcm, sample_schedule, worker_count
from ..weingarten import curvatures, vwme, wme
from .config import dump_config, resolve_spec

PARAM_COLUMNS = (
    "experiment",
    "task",
    "surface",
    "n",
    "noise_kind",
    "noise_scale",
    "method",
    "normal",
    "conv",
    "mask",
    "R",
    "vcm_samples",
    "seed",
)


@dataclass(frozen=True)
class Cell:
    n: int
    noise_scale: float
    method: str
    normal: str
    conv: str
    mask: str
    R: object


@dataclass
class SweepResult:
    rows: list
    csv_path: str
    errors: int

    @property
    def ok(self):
        return self.errors == 0


def grid_cells(cfg):
    """Unique grid cells in a fixed order; unused parameters become ``-``."""
    cells = []
    seen = set()
    for n, scale, method, normal, conv, mask, R in itertools.product(
        cfg.n, cfg.noise_scales, cfg.methods, cfg.normal, cfg.conv, cfg.mask, cfg.R
    ):
        uses_pca = method == "pca" or (method == "wme" and cfg.frames == "pca")
        uses_vcm = method in ("vcm", "vwme")
        cell = Cell(
            n,
            scale,
            method,
            normal if uses_pca else "-",
            conv if uses_vcm else "-",
            mask if cfg.task == "curvature" else "-",
            R if uses_vcm else "-",
        )
        if cell not in seen:
            seen.add(cell)
            cells.append(cell)
    return cells


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _vcm_samples(cfg, n):
    return cfg.vcm_samples or sample_schedule(n, cfg.vcm_eps, cfg.vcm_constant)


def _normals_cell(cfg, cell, seed, cloud, truth, index):
    if cell.method == "pca":
        frames = pca_frames(cloud, resolve_spec(cell.normal, cloud.n), cfg.m, errors="record", index=index)
    else:
        field = mcvcm(cloud, cell.R, _vcm_samples(cfg, cloud.n), seed, workers=1)
        conv = convolve_vcm(field, cloud, resolve_spec(cell.conv, cloud.n), index=index)
        frames = vcm_frames(conv, cfg.m)
    est = frames.normals
    scores = M.normal_scores(est, truth.normals)
    values = {k: scores[k] for k in cfg.metrics}
    values["failure_rate"] = max(scores["failure_rate"], M.failure_rate(frames))
    points = []
    if cfg.per_point:
        ok = np.all(np.isfinite(est), axis=1)
        cos = np.full(cloud.n, np.nan)
        cos[ok] = M.cosine_rows(est[ok], truth.normals[ok])
        for i in range(cloud.n):
            points.append({"index": i, "cos": cos[i], "abs_cos": abs(cos[i])})
    return values, points


def _curvature_cell(cfg, cell, seed, cloud, truth, index):
    mask = resolve_spec(cell.mask, cloud.n)
    if cell.method == "wme":
        if cfg.frames == "analytic":
            frames = analytic_frames(truth.normals)
        else:
            frames = pca_frames(cloud, resolve_spec(cell.normal, cloud.n), cfg.m, errors="record", index=index)
        shape = wme(cloud, frames, mask, errors="record", index=index)
    else:
        shape = vwme(
            cloud,
            cell.R,
            _vcm_samples(cfg, cloud.n),
            seed,
            resolve_spec(cell.conv, cloud.n),
            mask,
            cfg.m,
            errors="record",
            index=index,
            workers=1,
        )
    curv = curvatures(shape)
    H = truth.mean_curvature
    # S = -dN with outward normals gives H_est = -H_true on convex parts
    all_values = {
        "mse_H_abs": M.curvature_mse(curv, truth, "absolute"),
        "mse_H_signed": M.curvature_mse(-curv.mean, H, "signed", mask=curv.ok),
        "mse_K_abs": M.curvature_mse(curv, truth, "absolute", quantity="gaussian"),
        "orientation": M.orientation_consistency(curv.mean, H),
        "fallback_rate": float(np.mean(curv.fallback[curv.ok])) if np.any(curv.ok) else float("nan"),
    }
    values = {k: all_values[k] for k in cfg.metrics}
    values["failure_rate"] = M.failure_rate(shape)
    points = []
    if cfg.per_point:
        P = cloud.points
        for i in range(cloud.n):
            row = {"index": i}
            for j in range(min(3, cloud.dim)):
                row[f"x{j}"] = P[i, j]
            row["H_est"] = curv.mean[i]
            row["H_true"] = H[i]
            row["sq_err"] = (abs(curv.mean[i]) - abs(H[i])) ** 2
            points.append(row)
    return values, points


def run_cell(cfg, cell, seed):
    """Evaluate one grid cell for one seed; returns ``(row, points, seconds)``."""
    t0 = time.perf_counter()
    row = {
        "experiment": cfg.name,
        "task": cfg.task,
        "surface": cfg.surface,
        "n": cell.n,
        "noise_kind": cfg.noise_kind,
        "noise_scale": cell.noise_scale,
        "method": cell.method,
        "normal": cell.normal,
        "conv": cell.conv,
        "mask": cell.mask,
        "R": cell.R,
        "vcm_samples": _vcm_samples(cfg, cell.n) if cell.method in ("vcm", "vwme") else "-",
        "seed": seed,
    }
    names = list(cfg.metrics) + ["failure_rate"]
    points = []
    try:
        cloud, truth = make_surface(cfg.surface, cell.n, seed, **cfg.surface_kwargs())
        cloud = add_noise(cloud, cfg.noise_kind, cell.noise_scale, seed)
        index = SpatialIndex(cloud)
        if cfg.task == "normals":
            values, points = _normals_cell(cfg, cell, seed, cloud, truth, index)
        else:
            values, points = _curvature_cell(cfg, cell, seed, cloud, truth, index)
        row.update(values)
        row["error"] = ""
    except Exception as exc:  # recorded in-row; a sweep never aborts
        for name in names:
            row[name] = float("nan")
        row["error"] = type(exc).__name__
    return row, points, time.perf_counter() - t0


def _run_task(args):
    return run_cell(*args)


def columns(cfg):
    return list(PARAM_COLUMNS) + list(cfg.metrics) + ["failure_rate", "error"]


def run_sweep(cfg, out_dir=None, workers=None):
    """Run every grid cell for every seed and write ``<out_dir>/<name>.csv``."""
    out_dir = out_dir or cfg.out_dir
    os.makedirs(out_dir, exist_ok=True)
    csv_path = os.path.join(out_dir, f"{cfg.name}.csv")
    with open(os.path.join(out_dir, f"{cfg.name}.ini"), "w") as fh:
        fh.write(dump_config(cfg))
    tasks = [(cfg, cell, seed) for cell in grid_cells(cfg) for seed in cfg.seeds]
    cols = columns(cfg)
    nworkers = min(worker_count(workers), len(tasks))
    rows = []
    errors = 0
    point_cols = None
    pfh = None
    with open(csv_path, "w", newline="") as fh, open(
        os.path.join(out_dir, f"{cfg.name}.timing.csv"), "w", newline=""
    ) as tfh:
        writer = csv.writer(fh, lineterminator="\n")
        twriter = csv.writer(tfh, lineterminator="\n")
        writer.writerow(cols)
        twriter.writerow(["row", "seconds"])
        if nworkers > 1:
            pool = ProcessPoolExecutor(nworkers)
            results = pool.map(_run_task, tasks)
        else:
            pool = None
            results = map(_run_task, tasks)
        try:
            for rid, (row, points, secs) in enumerate(results):
                writer.writerow([_fmt(row[c]) for c in cols])
                fh.flush()
                twriter.writerow([rid, f"{secs:.3f}"])
                rows.append(row)
                errors += bool(row["error"])
                if cfg.per_point and points:
                    if pfh is None:
                        point_cols = ["row", "method", "noise_scale", "n", "seed"] + list(points[0])
                        pfh = open(os.path.join(out_dir, f"{cfg.name}.points.csv"), "w", newline="")
                        pwriter = csv.writer(pfh, lineterminator="\n")
                        pwriter.writerow(point_cols)
                    for p in points:
                        full = {"row": rid, "method": row["method"], "noise_scale": row["noise_scale"],
                                "n": row["n"], "seed": row["seed"], **p}
                        pwriter.writerow([_fmt(full.get(c, "")) for c in point_cols])
        finally:
            if pool is not None:
                pool.shutdown()
            if pfh is not None:
                pfh.close()
    return SweepResult(rows, csv_path, errors)
