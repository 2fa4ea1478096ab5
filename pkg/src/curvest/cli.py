"""Command-line interface: ``curvest <command> [options]``.

Clouds travel between commands as CSV files with a header (``x0..``, then
optional ``n0..``, ``H``, ``K`` ground-truth columns). ``CURVEST_WORKERS``
sets the worker count for Monte-Carlo sampling and sweeps; results do not
depend on it.
"""

import argparse
import logging
import math
import sys

import numpy as np

from . import __version__
from .errors import CurvestError
from .harness.config import load_config, load_preset, preset_names
from .harness.plot import KINDS, plot
from .harness.sweep import run_sweep
from .metrics import curvature_mse, normal_scores
from .neighborhood import KNN, EpsBall, GaussianKernel, SpatialIndex
from .noise import add_noise
from .normals import pca_frames, vcm_frames
from .pointcloud import load_labeled, save_cloud
from .surfaces import make_surface
from .vcm import DEFAULT_EPS, convolve_vcm, mcvcm, sample_schedule
from .weingarten import curvatures, vwme, wme

log = logging.getLogger("curvest")
FMT = "%.17g"


def _write_table(path, header, rows):
    out = sys.stdout if path in (None, "-") else open(path, "w")
    try:
        out.write(",".join(header) + "\n")
        for row in rows:
            out.write(",".join(v if isinstance(v, str) else FMT % v for v in row) + "\n")
    finally:
        if out is not sys.stdout:
            out.close()


def _spec(k=None, eps=None, bandwidth=None, default_k=None):
    given = [v is not None for v in (k, eps, bandwidth)]
    if sum(given) > 1:
        raise CurvestError("give only one of --k, --eps, --bandwidth")
    if eps is not None:
        return EpsBall(eps)
    if bandwidth is not None:
        return GaussianKernel(bandwidth)
    return KNN(k if k is not None else default_k)


def _samples(args, n):
    if args.samples:
        return args.samples
    return sample_schedule(n, args.vcm_eps, args.schedule_constant)


def cmd_generate(args):
    kw = {
        "major_radius": args.Rmaj,
        "minor_radius": args.rmin,
        "theta_max": args.theta_max,
        "phi_max": args.phi_max,
        "dim": args.dim,
        "radius": args.radius,
        "area_uniform": args.area_uniform,
    }
    cloud, truth = make_surface(args.surface, args.n, args.seed, **kw)
    save_cloud(cloud, args.out, labels=truth, format="csv")
    return 0


def cmd_noise(args):
    cloud, labels = load_labeled(args.input)
    noisy = add_noise(cloud, args.kind, args.scale, args.seed)
    save_cloud(noisy, args.out, labels=labels, format="csv")
    return 0


def cmd_normals(args):
    cloud, labels = load_labeled(args.input)
    index = SpatialIndex(cloud)
    if args.method == "pca":
        spec = _spec(args.k, args.eps, args.bandwidth, default_k=50)
        frames = pca_frames(cloud, spec, args.m, errors="record", index=index)
    else:
        conv = _spec(args.conv_k, args.eps, args.bandwidth, default_k=None) if (
            args.conv_k or args.eps or args.bandwidth
        ) else EpsBall(0.2)
        field = mcvcm(cloud, args.R, _samples(args, cloud.n), args.seed)
        frames = vcm_frames(convolve_vcm(field, cloud, conv, index=index), args.m)
    N = frames.normal_basis
    cols = ["index"] + [f"v{c}_{j}" for c in range(N.shape[2]) for j in range(N.shape[1])]
    if frames.codim == 1:
        cols = ["index"] + [f"n{j}" for j in range(cloud.dim)]
    rows = [[str(i)] + list(N[i].T.ravel()) for i in range(cloud.n)]
    _write_table(args.out, cols, rows)
    if labels is not None and labels.normals is not None and frames.codim == 1:
        s = normal_scores(frames.normals, labels.normals)
        print(" ".join(f"{k}={v:.6g}" for k, v in s.items()), file=sys.stderr)
    return 0


def cmd_vcm(args):
    cloud, _ = load_labeled(args.input)
    field = mcvcm(cloud, args.R, _samples(args, cloud.n), args.seed, printed_variant=args.printed_variant)
    iu, ju = np.triu_indices(cloud.dim)
    cols = ["index"] + [f"v{a}{b}" for a, b in zip(iu, ju)]
    rows = [[str(i)] + list(field.tensors[i][iu, ju]) for i in range(cloud.n)]
    _write_table(args.out, cols, rows)
    return 0


def cmd_estimate(args):
    cloud, labels = load_labeled(args.input)
    index = SpatialIndex(cloud)
    mask = _spec(args.mask_k, args.eps, args.bandwidth, default_k=30)
    if args.method == "wme":
        frames = pca_frames(cloud, KNN(args.normal_k), args.m, errors="record", index=index)
        shape = wme(cloud, frames, mask, errors="record", index=index)
    else:
        shape = vwme(
            cloud,
            args.R,
            _samples(args, cloud.n),
            args.seed,
            KNN(args.conv_k),
            mask,
            args.m,
            errors="record",
            index=index,
        )
    curv = curvatures(shape)
    m = curv.principal.shape[1]
    cols = ["index", "H", "K"] + [f"k{j}" for j in range(m)] + ["fallback", "failed"]
    rows = []
    for i in range(cloud.n):
        rows.append(
            [str(i), curv.mean[i], curv.gaussian[i], *curv.principal[i],
             str(int(curv.fallback[i])), str(int(not curv.ok[i]))]
        )
    _write_table(args.out, cols, rows)
    if labels is not None and labels.mean_curvature is not None:
        mse = curvature_mse(curv, labels, "absolute")
        print(f"mse_H_abs={mse:.6g} failures={int((~curv.ok).sum())}", file=sys.stderr)
    return 0


def cmd_sweep(args):
    if args.list:
        print("\n".join(preset_names()))
        return 0
    if bool(args.config) == bool(args.preset):
        raise CurvestError("give exactly one of --config or --preset")
    overrides = args.set or []
    cfg = load_config(args.config, overrides) if args.config else load_preset(args.preset, overrides)
    result = run_sweep(cfg, out_dir=args.out_dir, workers=args.workers)
    print(result.csv_path)
    if result.errors:
        log.error("%d of %d rows recorded an error", result.errors, len(result.rows))
        return 1
    return 0


def cmd_plot(args):
    where = dict(item.split("=", 1) for item in args.where or [])
    plot(
        args.results,
        args.kind,
        args.out,
        x=args.x,
        y=args.y,
        series=args.series,
        column=args.column,
        value=args.value,
        bins=args.bins,
        title=args.title,
        logx=args.logx,
        where=where,
    )
    return 0


def _vcm_options(p):
    p.add_argument("--R", type=float, default=0.5, help="offset radius")
    p.add_argument("--samples", type=int, default=0, help="Monte-Carlo samples (0: schedule)")
    p.add_argument("--vcm-eps", type=float, default=DEFAULT_EPS, help="schedule accuracy")
    p.add_argument("--schedule-constant", type=float, default=1.0, help="schedule multiplier")
    p.add_argument("--seed", type=int, default=0)


def build_parser():
    ap = argparse.ArgumentParser(prog="curvest", description="Curvature estimation on point clouds.")
    ap.add_argument("--version", action="version", version=__version__)
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="sample a synthetic surface with ground truth")
    p.add_argument("--surface", required=True, choices=["torus", "torus-sectional", "hypersphere", "plane"])
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--Rmaj", type=float, default=2.0)
    p.add_argument("--rmin", type=float, default=1.0)
    p.add_argument("--dim", type=int, default=3)
    p.add_argument("--radius", type=float, default=1.0)
    p.add_argument("--theta-max", type=float, default=2 * math.pi)
    p.add_argument("--phi-max", type=float, default=1.5 * math.pi, help="sectional torus only")
    p.add_argument("--area-uniform", action="store_true")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("noise", help="add Gaussian or uniform noise to a cloud")
    p.add_argument("input")
    p.add_argument("--kind", required=True, choices=["gaussian", "uniform"])
    p.add_argument("--scale", type=float, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_noise)

    p = sub.add_parser("normals", help="estimate normals by PCA or convolved VCM")
    p.add_argument("input")
    p.add_argument("--method", choices=["pca", "vcm"], default="pca")
    p.add_argument("--k", type=int)
    p.add_argument("--eps", type=float)
    p.add_argument("--bandwidth", type=float)
    p.add_argument("--conv-k", type=int, help="VCM convolution kNN (default: eps ball 0.2)")
    p.add_argument("--m", type=int, default=2, help="intrinsic dimension")
    _vcm_options(p)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_normals)

    p = sub.add_parser("vcm", help="Monte-Carlo VCM tensor field")
    p.add_argument("input")
    _vcm_options(p)
    p.add_argument("--printed-variant", action="store_true", help="use x instead of s (comparison only)")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_vcm)

    p = sub.add_parser("estimate", help="estimate curvature by WME or VWME")
    p.add_argument("input")
    p.add_argument("--method", choices=["wme", "vwme"], default="wme")
    p.add_argument("--normal-k", type=int, default=50)
    p.add_argument("--mask-k", type=int)
    p.add_argument("--eps", type=float, help="epsilon-ball mask")
    p.add_argument("--bandwidth", type=float, help="Gaussian-kernel mask")
    p.add_argument("--conv-k", type=int, default=50)
    p.add_argument("--vcm-samples", dest="samples", type=int, default=0)
    p.add_argument("--m", type=int, default=2)
    p.add_argument("--R", type=float, default=0.5)
    p.add_argument("--vcm-eps", type=float, default=DEFAULT_EPS)
    p.add_argument("--schedule-constant", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("sweep", help="run an experiment grid")
    p.add_argument("--config")
    p.add_argument("--preset")
    p.add_argument("--list", action="store_true", help="list presets")
    p.add_argument("--set", action="append", metavar="SECTION.KEY=VALUE")
    p.add_argument("--out-dir")
    p.add_argument("--workers", type=int)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("plot", help="render sweep results as SVG")
    p.add_argument("results")
    p.add_argument("--kind", required=True, choices=KINDS)
    p.add_argument("--x")
    p.add_argument("--y")
    p.add_argument("--series")
    p.add_argument("--column")
    p.add_argument("--value")
    p.add_argument("--bins", type=int, default=20)
    p.add_argument("--title")
    p.add_argument("--logx", action="store_true")
    p.add_argument("--where", action="append", metavar="COLUMN=VALUE")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_plot)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except (CurvestError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
