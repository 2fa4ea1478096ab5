"""Standalone SVG plots of sweep results.

Three kinds: ``line`` (mean of ``y`` over seeds against ``x``, one polyline
per ``series`` value), ``histogram`` (one overlaid histogram per series,
shared bin edges, empty bins not drawn) and ``scatter3d-projection`` (an
orthographic view of x0, x1, x2 colored by ``value``).
"""

import csv
import math
from collections import OrderedDict
from xml.sax.saxutils import escape

import numpy as np

from ..errors import InvalidParams, MissingColumn
from ..metrics import summarize

WIDTH, HEIGHT = 640, 440
MARGIN = (70, 30, 40, 60)  # left, right, top, bottom
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf", "#7f7f7f")
# viridis anchors for the scatter colormap
_VIRIDIS = np.array(
    [[68, 1, 84], [59, 82, 139], [33, 145, 140], [94, 201, 98], [253, 231, 37]], dtype=float
)
KINDS = ("line", "histogram", "scatter3d-projection")


def read_table(path):
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        rows = list(reader)
        return list(reader.fieldnames or []), rows


def _require(header, *names):
    for name in names:
        if name and name not in header:
            raise MissingColumn(name)


def _num(text):
    # neighborhood specs such as "knn:30" plot at their parameter
    if isinstance(text, str) and ":" in text:
        text = text.rsplit(":", 1)[1]
    try:
        return float(text)
    except (TypeError, ValueError):
        return float("nan")


def _f(v):
    return f"{v:.2f}"


def _ticks(lo, hi, count=5):
    if lo == hi:
        return [lo]
    return list(np.linspace(lo, hi, count))


def _tick_label(v):
    if v == 0 or 1e-3 <= abs(v) < 1e4:
        return f"{v:.4g}"
    return f"{v:.2e}"


class _Canvas:
    def __init__(self, title):
        self.parts = [
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
            f'viewBox="0 0 {WIDTH} {HEIGHT}">',
            f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        ]
        if title:
            self.text(WIDTH / 2, 22, title, size=15, anchor="middle")

    def text(self, x, y, s, size=11, anchor="start", rotate=None):
        tr = f' transform="rotate({rotate} {_f(x)} {_f(y)})"' if rotate is not None else ""
        self.parts.append(
            f'<text x="{_f(x)}" y="{_f(y)}" font-family="sans-serif" font-size="{size}" '
            f'text-anchor="{anchor}"{tr}>{escape(str(s))}</text>'
        )

    def add(self, element):
        self.parts.append(element)

    def svg(self):
        return "\n".join(self.parts + ["</svg>"]) + "\n"


class _Axes:
    def __init__(self, canvas, xlim, ylim, xlabel, ylabel, xlog=False):
        self.c = canvas
        self.xlog = xlog
        self.x0, self.x1 = xlim
        self.y0, self.y1 = ylim
        l, r, t, b = MARGIN
        self.left, self.right = l, WIDTH - r
        self.top, self.bottom = t, HEIGHT - b
        if self.x0 == self.x1:
            self.x0, self.x1 = self.x0 - 0.5, self.x1 + 0.5
        if self.y0 == self.y1:
            self.y0, self.y1 = self.y0 - 0.5, self.y1 + 0.5
        self._frame(xlabel, ylabel)

    def _tx(self, x):
        if self.xlog:
            x, a, b = math.log10(x), math.log10(self.x0), math.log10(self.x1)
        else:
            a, b = self.x0, self.x1
        return self.left + (x - a) / (b - a) * (self.right - self.left)

    def px(self, x, y):
        yy = self.bottom - (y - self.y0) / (self.y1 - self.y0) * (self.bottom - self.top)
        return self._tx(x), yy

    def _frame(self, xlabel, ylabel):
        c = self.c
        c.add(
            f'<path d="M{self.left},{self.top} V{self.bottom} H{self.right}" '
            'fill="none" stroke="black"/>'
        )
        if self.xlog:
            xt = [10**e for e in range(math.ceil(math.log10(self.x0)), math.floor(math.log10(self.x1)) + 1)]
            xt = xt or [self.x0, self.x1]
        else:
            xt = _ticks(self.x0, self.x1)
        for v in xt:
            x, _ = self.px(v, self.y0)
            c.add(f'<path d="M{_f(x)},{self.bottom} v5" stroke="black"/>')
            c.text(x, self.bottom + 18, _tick_label(v), anchor="middle")
        for v in _ticks(self.y0, self.y1):
            _, y = self.px(self.x0, v)
            c.add(f'<path d="M{self.left},{_f(y)} h-5" stroke="black"/>')
            c.text(self.left - 8, y + 4, _tick_label(v), anchor="end")
        c.text((self.left + self.right) / 2, HEIGHT - 15, xlabel, size=12, anchor="middle")
        c.text(18, (self.top + self.bottom) / 2, ylabel, size=12, anchor="middle", rotate=-90)

    def legend(self, labels):
        for j, lab in enumerate(labels):
            y = self.top + 8 + 16 * j
            color = PALETTE[j % len(PALETTE)]
            self.c.add(f'<rect x="{self.right - 130}" y="{y - 8}" width="10" height="10" fill="{color}"/>')
            self.c.text(self.right - 115, y + 1, lab)


def _groups(rows, series):
    out = OrderedDict()
    for row in rows:
        key = row[series] if series else ""
        out.setdefault(key, []).append(row)
    return out


def line_svg(header, rows, x, y, series=None, title=None, logx=False):
    _require(header, x, y, series)
    groups = _groups(rows, series)
    curves = OrderedDict()
    for key, grp in groups.items():
        acc = OrderedDict()
        for row in grp:
            xv, yv = _num(row[x]), _num(row[y])
            if math.isfinite(xv) and math.isfinite(yv):
                acc.setdefault(xv, []).append(yv)
        pts = sorted((xv, float(np.mean(v))) for xv, v in acc.items())
        if pts:
            curves[key] = pts
    allx = [p[0] for c in curves.values() for p in c]
    ally = [p[1] for c in curves.values() for p in c]
    if not allx:
        allx, ally = [0.0], [0.0]
    logx = logx and min(allx) > 0
    canvas = _Canvas(title)
    ax = _Axes(canvas, (min(allx), max(allx)), (min(ally), max(ally)), x, y, xlog=logx)
    for j, pts in enumerate(curves.values()):
        color = PALETTE[j % len(PALETTE)]
        coords = " ".join(f"{_f(a)},{_f(b)}" for a, b in (ax.px(*p) for p in pts))
        canvas.add(f'<polyline points="{coords}" fill="none" stroke="{color}" stroke-width="2"/>')
        for a, b in (ax.px(*p) for p in pts):
            canvas.add(f'<circle cx="{_f(a)}" cy="{_f(b)}" r="3" fill="{color}"/>')
    if series:
        ax.legend([f"{series}={k}" for k in curves])
    return canvas.svg()


def histogram_svg(header, rows, column, series=None, bins=20, title=None):
    _require(header, column, series)
    groups = _groups(rows, series)
    data = OrderedDict()
    for key, grp in groups.items():
        v = np.array([_num(r[column]) for r in grp])
        v = v[np.isfinite(v)]
        if v.size:
            data[key] = v
    if not data:
        raise InvalidParams(f"column {column!r} has no finite values")
    edges = summarize(np.concatenate(list(data.values())), bins)["edges"]
    counts = {k: np.histogram(v, bins=edges)[0] for k, v in data.items()}
    ymax = max(int(c.max()) for c in counts.values())
    canvas = _Canvas(title)
    ax = _Axes(canvas, (edges[0], edges[-1]), (0, ymax), column, "count")
    for j, (key, cnt) in enumerate(counts.items()):
        color = PALETTE[j % len(PALETTE)]
        for b, c in enumerate(cnt):
            if c == 0:
                continue
            xa, ya = ax.px(edges[b], c)
            xb, yb = ax.px(edges[b + 1], 0)
            canvas.add(
                f'<rect class="bar" x="{_f(xa)}" y="{_f(ya)}" width="{_f(xb - xa)}" '
                f'height="{_f(yb - ya)}" fill="{color}" fill-opacity="0.5" stroke="{color}"/>'
            )
    if series:
        ax.legend([f"{series}={k}" for k in counts])
    return canvas.svg()


def _colormap(t):
    t = np.clip(t, 0, 1) * (len(_VIRIDIS) - 1)
    i = np.minimum(t.astype(int), len(_VIRIDIS) - 2)
    f = (t - i)[:, None]
    rgb = _VIRIDIS[i] * (1 - f) + _VIRIDIS[i + 1] * f
    return ["#%02x%02x%02x" % tuple(int(round(c)) for c in row) for row in rgb]


def scatter_svg(header, rows, value, title=None, azimuth=35.0, elevation=25.0):
    _require(header, "x0", "x1", "x2", value)
    P = np.array([[_num(r["x0"]), _num(r["x1"]), _num(r["x2"])] for r in rows])
    v = np.array([_num(r[value]) for r in rows])
    keep = np.all(np.isfinite(P), axis=1) & np.isfinite(v)
    P, v = P[keep], v[keep]
    a, e = math.radians(azimuth), math.radians(elevation)
    right = np.array([-math.sin(a), math.cos(a), 0.0])
    up = np.array([-math.cos(a) * math.sin(e), -math.sin(a) * math.sin(e), math.cos(e)])
    depth = np.cross(right, up)
    u, w, d = P @ right, P @ up, P @ depth
    order = np.argsort(d, kind="stable")  # far points first
    canvas = _Canvas(title)
    if len(P):
        lo, hi = float(v.min()), float(v.max())
        colors = _colormap((v - lo) / (hi - lo) if hi > lo else np.zeros_like(v))
        span = max(np.ptp(u), np.ptp(w), 1e-12)
        l, r, t, b = MARGIN
        scale = min(WIDTH - l - r, HEIGHT - t - b) / span
        cx, cy = (WIDTH - 60) / 2, (HEIGHT + t - b) / 2
        mu, mw = (u.max() + u.min()) / 2, (w.max() + w.min()) / 2
        for i in order:
            x = cx + (u[i] - mu) * scale
            y = cy - (w[i] - mw) * scale
            canvas.add(f'<circle cx="{_f(x)}" cy="{_f(y)}" r="2.5" fill="{colors[i]}"/>')
        # color bar
        for k in range(50):
            c = _colormap(np.array([k / 49]))[0]
            canvas.add(f'<rect x="{WIDTH - 45}" y="{_f(HEIGHT - 80 - 5 * k)}" width="15" height="5" fill="{c}"/>')
        canvas.text(WIDTH - 25, HEIGHT - 62, _tick_label(lo), anchor="middle", size=10)
        canvas.text(WIDTH - 25, HEIGHT - 335, _tick_label(hi), anchor="middle", size=10)
    canvas.text(WIDTH - 37, HEIGHT - 350, value, anchor="middle", size=11)
    return canvas.svg()


def plot(results, kind, output, x=None, y=None, series=None, column=None, value=None,
         bins=20, title=None, logx=False, where=None):
    """Render ``results`` (a CSV path) as an SVG file at ``output``.

    ``where`` is an optional ``{column: value}`` filter applied first.
    """
    header, rows = read_table(results)
    if where:
        _require(header, *where)
        rows = [r for r in rows if all(r[k] == str(v) for k, v in where.items())]
    if kind == "line":
        if not (x and y):
            raise InvalidParams("line plots need x and y columns")
        svg = line_svg(header, rows, x, y, series, title, logx)
    elif kind == "histogram":
        if not column:
            raise InvalidParams("histograms need a column")
        svg = histogram_svg(header, rows, column, series, bins, title)
    elif kind == "scatter3d-projection":
        if not value:
            raise InvalidParams("scatter plots need a value column")
        svg = scatter_svg(header, rows, value, title)
    else:
        raise InvalidParams(f"unknown plot kind {kind!r}; choose from {KINDS}")
    with open(output, "w") as fh:
        fh.write(svg)
    return output
