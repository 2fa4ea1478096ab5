"""Experiment configuration files.

Configs are INI files (``configparser``). Comma-separated values form a
grid; the sweep runs the cartesian product of every grid. Sections and
keys::

    [experiment]   name, task (normals | curvature), description
    [surface]      kind (torus | torus-sectional | hypersphere | plane),
                   n (grid), major_radius, minor_radius, theta_max,
                   phi_max, dim, radius, area_uniform
    [noise]        kind (gaussian | uniform), scales (grid)
    [estimator]    methods (grid: pca, vcm for normals; wme, vwme for
                   curvature), normal (grid of neighborhood specs for PCA
                   frames), conv (grid, VCM convolution), mask (grid, WME
                   mask), R (grid), frames (pca | analytic), m,
                   vcm_eps, vcm_constant, vcm_samples (0 = schedule)
    [sweep]        seeds, metrics
    [output]       dir, per_point (true | false)
    [plot]         kind, x, y, series, value, column
    [notes]        free text; presets list which values the figure
                   caption states and which were chosen here

Neighborhood specs are ``knn:K``, ``eps:E``, ``gauss:H[:CUTOFF]`` or
``knnlog:C`` (k = ceil(C ln n), resolved per point count).
"""

import configparser
import io
import math
from dataclasses import dataclass, field, fields
from importlib import resources

from ..errors import InvalidParams
from ..neighborhood import KNN, parse_spec

NORMAL_METRICS = ("mean_cos", "mean_abs_cos", "flip_fraction")
CURVATURE_METRICS = (
    "mse_H_abs",
    "mse_H_signed",
    "mse_K_abs",
    "orientation",
    "fallback_rate",
)


def _grid(text, cast=str):
    items = [t.strip() for t in str(text).split(",") if t.strip()]
    return [cast(t) for t in items]


def _bool(text):
    return str(text).strip().lower() in ("1", "true", "yes", "on")


def resolve_spec(text, n):
    """Turn a spec string into a neighborhood spec for a cloud of ``n`` points."""
    if text.startswith("knnlog:"):
        c = float(text.split(":", 1)[1])
        return KNN(max(1, math.ceil(c * math.log(n))))
    return parse_spec(text)


@dataclass
class ExperimentConfig:
    name: str = "experiment"
    task: str = "normals"
    description: str = ""
    surface: str = "torus-sectional"
    n: list = field(default_factory=lambda: [1000])
    major_radius: float = 2.0
    minor_radius: float = 1.0
    theta_max: float = 2 * math.pi
    phi_max: float = 1.5 * math.pi
    dim: int = 3
    radius: float = 1.0
    area_uniform: bool = False
    noise_kind: str = "gaussian"
    noise_scales: list = field(default_factory=lambda: [0.0])
    methods: list = field(default_factory=lambda: ["pca"])
    normal: list = field(default_factory=lambda: ["knn:50"])
    conv: list = field(default_factory=lambda: ["eps:0.2"])
    mask: list = field(default_factory=lambda: ["knn:30"])
    R: list = field(default_factory=lambda: [0.5])
    frames: str = "pca"
    m: int = 2
    vcm_eps: float = 0.05
    vcm_constant: float = 1.0
    vcm_samples: int = 0
    seeds: list = field(default_factory=lambda: [0])
    metrics: list = field(default_factory=list)
    out_dir: str = "out"
    per_point: bool = False
    plot: dict = field(default_factory=dict)
    notes: dict = field(default_factory=dict)

    def __post_init__(self):
        self.validate()

    def validate(self):
        if self.task not in ("normals", "curvature"):
            raise InvalidParams(f"unknown task {self.task!r}")
        for name in ("n", "noise_scales", "methods", "normal", "conv", "mask", "R", "seeds"):
            if not getattr(self, name):
                raise InvalidParams(f"grid {name!r} is empty")
        if len(set(self.seeds)) != len(self.seeds):
            raise InvalidParams("seeds must be distinct")
        allowed = ("pca", "vcm") if self.task == "normals" else ("wme", "vwme")
        for meth in self.methods:
            if meth not in allowed:
                raise InvalidParams(f"method {meth!r} is not valid for task {self.task!r}")
        if self.frames not in ("pca", "analytic"):
            raise InvalidParams(f"unknown frames {self.frames!r}")
        for grid in (self.normal, self.conv, self.mask):
            for spec in grid:
                resolve_spec(spec, 100)
        if not self.metrics:
            self.metrics = list(NORMAL_METRICS if self.task == "normals" else CURVATURE_METRICS)
        known = NORMAL_METRICS if self.task == "normals" else CURVATURE_METRICS
        for met in self.metrics:
            if met not in known:
                raise InvalidParams(f"unknown metric {met!r} for task {self.task!r}")

    def surface_kwargs(self):
        return {
            "major_radius": self.major_radius,
            "minor_radius": self.minor_radius,
            "theta_max": self.theta_max,
            "phi_max": self.phi_max,
            "dim": self.dim,
            "radius": self.radius,
            "area_uniform": self.area_uniform,
        }


# (section, key) -> (field name, parser)
_KEYS = {
    ("experiment", "name"): ("name", str),
    ("experiment", "task"): ("task", str),
    ("experiment", "description"): ("description", str),
    ("surface", "kind"): ("surface", str),
    ("surface", "n"): ("n", lambda s: _grid(s, int)),
    ("surface", "major_radius"): ("major_radius", float),
    ("surface", "minor_radius"): ("minor_radius", float),
    ("surface", "theta_max"): ("theta_max", float),
    ("surface", "phi_max"): ("phi_max", float),
    ("surface", "dim"): ("dim", int),
    ("surface", "radius"): ("radius", float),
    ("surface", "area_uniform"): ("area_uniform", _bool),
    ("noise", "kind"): ("noise_kind", str),
    ("noise", "scales"): ("noise_scales", lambda s: _grid(s, float)),
    ("estimator", "methods"): ("methods", _grid),
    ("estimator", "normal"): ("normal", _grid),
    ("estimator", "conv"): ("conv", _grid),
    ("estimator", "mask"): ("mask", _grid),
    ("estimator", "r"): ("R", lambda s: _grid(s, float)),
    ("estimator", "frames"): ("frames", str),
    ("estimator", "m"): ("m", int),
    ("estimator", "vcm_eps"): ("vcm_eps", float),
    ("estimator", "vcm_constant"): ("vcm_constant", float),
    ("estimator", "vcm_samples"): ("vcm_samples", int),
    ("sweep", "seeds"): ("seeds", lambda s: _grid(s, int)),
    ("sweep", "metrics"): ("metrics", _grid),
    ("output", "dir"): ("out_dir", str),
    ("output", "per_point"): ("per_point", _bool),
}


def _parser():
    # keep key case; "R" is read case-insensitively below
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str
    return cp


def from_parser(cp, overrides=()):
    values = {}
    plot = {}
    notes = {}
    for section in cp.sections():
        for key, raw in cp.items(section):
            if section == "plot":
                plot[key] = raw
                continue
            if section == "notes":
                notes[key] = raw
                continue
            try:
                fname, cast = _KEYS[(section, key.lower())]
            except KeyError:
                raise InvalidParams(f"unknown config key [{section}] {key}") from None
            values[fname] = cast(raw)
    for item in overrides:
        lhs, _, raw = item.partition("=")
        section, _, key = lhs.strip().partition(".")
        if section == "plot":
            plot[key] = raw
            continue
        try:
            fname, cast = _KEYS[(section, key.lower())]
        except KeyError:
            raise InvalidParams(f"unknown override {item!r}") from None
        values[fname] = cast(raw.strip())
    return ExperimentConfig(**values, plot=plot, notes=notes)


def load_config(path, overrides=()):
    cp = _parser()
    with open(path) as fh:
        cp.read_file(fh)
    return from_parser(cp, overrides)


def loads_config(text, overrides=()):
    cp = _parser()
    cp.read_string(text)
    return from_parser(cp, overrides)


def preset_names():
    root = resources.files("curvest") / "presets"
    return sorted(p.name[:-4] for p in root.iterdir() if p.name.endswith(".ini"))


def load_preset(name, overrides=()):
    path = resources.files("curvest") / "presets" / f"{name}.ini"
    if not path.is_file():
        raise InvalidParams(f"no preset named {name!r}; available: {preset_names()}")
    return loads_config(path.read_text(), overrides)


def dump_config(cfg):
    """Render a config back to INI text (grids joined with commas)."""
    inverse = {fname: (sec, key) for (sec, key), (fname, _) in _KEYS.items()}
    cp = _parser()
    for f in fields(cfg):
        if f.name in ("plot", "notes"):
            continue
        sec, key = inverse[f.name]
        if key == "r":
            key = "R"
        val = getattr(cfg, f.name)
        if isinstance(val, list):
            val = ", ".join(str(v) for v in val)
        if not cp.has_section(sec):
            cp.add_section(sec)
        cp.set(sec, key, str(val))
    for sec, table in (("plot", cfg.plot), ("notes", cfg.notes)):
        if table:
            cp.add_section(sec)
            for k, v in table.items():
                cp.set(sec, k, v)
    buf = io.StringIO()
    cp.write(buf)
    return buf.getvalue()
