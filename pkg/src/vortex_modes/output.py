"""JSON/CSV writers with provenance headers and minimal self-contained SVG plots.

Numbers in CSV files use 17 significant digits, so a reload reproduces every
double exactly and regression diffs are meaningful.  JSON floats use Python's
shortest round-trip repr, which is equally lossless.
"""
from __future__ import annotations

import json
import math
from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

from . import __version__

SCHEMA = "vortex_modes.{kind}/1"


def fmt(x):
    return format(float(x), ".17g")


def eps_tag(eps):
    return format(float(eps), "g")


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def json_text(kind, payload, config_hash):
    doc = {"schema": SCHEMA.format(kind=kind), "version": __version__,
           "config_hash": config_hash, **_plain(payload)}
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def write_json(path, kind, payload, config_hash):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json_text(kind, payload, config_hash))
    return path


def csv_text(kind, columns: dict, meta: dict, config_hash):
    lines = [f"# schema: {SCHEMA.format(kind=kind)}", f"# config_hash: {config_hash}"]
    for k, v in meta.items():
        lines.append(f"# {k}: {repr(float(v)) if isinstance(v, (float, np.floating)) else v}")
    names = list(columns)
    lines.append(",".join(names))
    cols = [np.asarray(columns[c], dtype=float) for c in names]
    for row in zip(*cols):
        lines.append(",".join(fmt(v) for v in row))
    return "\n".join(lines) + "\n"


def write_csv(path, kind, columns, meta, config_hash):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(csv_text(kind, columns, meta, config_hash))
    return path


# ------------------------------------------------------------------ svg ---

def nice_ticks(lo, hi, target=6):
    span = hi - lo
    if span <= 0:
        return [lo]
    raw = span / target
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw), default=10 * mag)
    start = math.ceil(lo / step - 1e-9) * step
    ticks = []
    t = start
    while t <= hi + 1e-9 * step:
        ticks.append(0.0 if abs(t) < 1e-12 * step else t)
        t += step
    return ticks


def _num(v):
    return f"{v:.2f}"


def _tick_label(v):
    return f"{v:.6g}"


class _Frame:
    def __init__(self, xlim, ylim, width=640, height=420, margin=(70, 20, 30, 50)):
        self.x0, self.x1 = xlim
        self.y0, self.y1 = ylim
        self.w, self.h = width, height
        self.ml, self.mr, self.mt, self.mb = margin

    def px(self, x):
        return self.ml + (x - self.x0) / (self.x1 - self.x0) * (self.w - self.ml - self.mr)

    def py(self, y):
        return self.h - self.mb - (y - self.y0) / (self.y1 - self.y0) * (self.h - self.mt - self.mb)

    def axes(self, xlabel, ylabel, title):
        out = [f'<rect x="{self.ml}" y="{self.mt}" width="{self.w - self.ml - self.mr}" '
               f'height="{self.h - self.mt - self.mb}" fill="none" stroke="black"/>']
        for t in nice_ticks(self.x0, self.x1):
            X = self.px(t)
            out.append(f'<line x1="{_num(X)}" y1="{self.h - self.mb}" x2="{_num(X)}" '
                       f'y2="{self.h - self.mb + 5}" stroke="black"/>')
            out.append(f'<text x="{_num(X)}" y="{self.h - self.mb + 18}" font-size="11" '
                       f'text-anchor="middle">{_tick_label(t)}</text>')
        for t in nice_ticks(self.y0, self.y1):
            Y = self.py(t)
            out.append(f'<line x1="{self.ml - 5}" y1="{_num(Y)}" x2="{self.ml}" y2="{_num(Y)}" '
                       f'stroke="black"/>')
            out.append(f'<text x="{self.ml - 8}" y="{_num(Y + 4)}" font-size="11" '
                       f'text-anchor="end">{_tick_label(t)}</text>')
        out.append(f'<text x="{_num((self.ml + self.w - self.mr) / 2)}" y="{self.h - 10}" '
                   f'font-size="13" text-anchor="middle">{escape(xlabel)}</text>')
        out.append(f'<text x="16" y="{_num((self.mt + self.h - self.mb) / 2)}" font-size="13" '
                   f'text-anchor="middle" transform="rotate(-90 16 '
                   f'{_num((self.mt + self.h - self.mb) / 2)})">{escape(ylabel)}</text>')
        out.append(f'<text x="{_num(self.w / 2)}" y="18" font-size="14" '
                   f'text-anchor="middle">{escape(title)}</text>')
        return out


def _document(width, height, body):
    head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
            f'viewBox="0 0 {width} {height}">')
    return "\n".join([head, '<rect width="100%" height="100%" fill="white"/>', *body, "</svg>"]) + "\n"


def line_plot(curves, xlabel, ylabel, title, xlim=None, ylim=None, band=None, markers=(),
              width=640, height=420):
    """``curves``: list of (x, y, colour, label); a NaN in y breaks the line.

    ``band`` = (y_lo, y_hi, colour) shades a horizontal strip; ``markers`` are
    (x, y, colour, label) points.
    """
    xs = np.concatenate([np.asarray(c[0], float) for c in curves])
    ys = np.concatenate([np.asarray(c[1], float) for c in curves])
    ys = ys[np.isfinite(ys)]
    if xlim is None:
        xlim = (float(xs.min()), float(xs.max()))
    if ylim is None:
        lo, hi = float(ys.min()), float(ys.max())
        pad = 0.05 * (hi - lo or 1.0)
        ylim = (lo - pad, hi + pad)
    fr = _Frame(xlim, ylim, width, height)
    body = []
    if band is not None:
        y_lo, y_hi, colour = band
        body.append(f'<rect x="{fr.ml}" y="{_num(fr.py(y_hi))}" width="{fr.w - fr.ml - fr.mr}" '
                    f'height="{_num(fr.py(y_lo) - fr.py(y_hi))}" fill="{colour}" '
                    f'fill-opacity="0.3" stroke="none"/>')
    body += fr.axes(xlabel, ylabel, title)
    for i, (x, y, colour, label) in enumerate(curves):
        x, y = np.asarray(x, float), np.asarray(y, float)
        keep = (x >= xlim[0]) & (x <= xlim[1])
        segs, cur = [], []
        for xv, yv in zip(x[keep], y[keep]):
            if math.isfinite(yv):
                cur.append(f"{_num(fr.px(xv))},{_num(fr.py(min(max(yv, ylim[0]), ylim[1])))}")
            elif cur:
                segs.append(cur)
                cur = []
        if cur:
            segs.append(cur)
        for seg in segs:
            body.append(f'<polyline points="{" ".join(seg)}" fill="none" stroke="{colour}" '
                        f'stroke-width="1.6"/>')
        body.append(f'<text x="{fr.w - fr.mr - 8}" y="{fr.mt + 16 + 15 * i}" font-size="12" '
                    f'text-anchor="end" fill="{colour}">{escape(label)}</text>')
    for x, y, colour, label in markers:
        body.append(f'<circle cx="{_num(fr.px(x))}" cy="{_num(fr.py(y))}" r="4" fill="{colour}"/>')
        body.append(f'<text x="{_num(fr.px(x) + 7)}" y="{_num(fr.py(y) - 7)}" font-size="12" '
                    f'fill="{colour}">{escape(label)}</text>')
    return _document(width, height, body)


def _diverging(v):
    """Blue-white-red for v in [-1, 1]."""
    v = max(-1.0, min(1.0, v))
    if v >= 0:
        r, g, b = 255, int(255 * (1 - v)), int(255 * (1 - v))
    else:
        r, g, b = int(255 * (1 + v)), int(255 * (1 + v)), 255
    return f"#{r:02x}{g:02x}{b:02x}"


def polar_heatmap(r, theta, values, title, size=520):
    """Annular cells (r_i, theta_j) coloured by value / max|value|."""
    r = np.unique(np.asarray(r, float))
    theta = np.unique(np.asarray(theta, float))
    vals = np.asarray(values, float).reshape(r.size, theta.size)
    vmax = float(np.max(np.abs(vals))) or 1.0
    c = size / 2
    scale = (size / 2 - 20) / r[-1]
    dth = 2 * np.pi / theta.size
    body = [f'<text x="{c}" y="16" font-size="14" text-anchor="middle">{escape(title)}</text>']
    edges = np.concatenate([[r[0]], 0.5 * (r[1:] + r[:-1]), [r[-1]]])
    for i in range(r.size):
        r_in, r_out = edges[i] * scale, edges[i + 1] * scale
        if r_out <= r_in:
            continue
        for j, t in enumerate(theta):
            v = vals[i, j] / vmax
            if abs(v) < 5e-3:
                continue
            a0, a1 = t - dth / 2, t + dth / 2
            pts = [(c + r_in * math.cos(a0), c - r_in * math.sin(a0)),
                   (c + r_out * math.cos(a0), c - r_out * math.sin(a0)),
                   (c + r_out * math.cos(a1), c - r_out * math.sin(a1)),
                   (c + r_in * math.cos(a1), c - r_in * math.sin(a1))]
            body.append('<polygon points="' + " ".join(f"{_num(x)},{_num(y)}" for x, y in pts)
                        + f'" fill="{_diverging(v)}" stroke="none"/>')
    for rr in (0.5, 1.0, 1.5, 2.0):
        if rr <= r[-1]:
            body.append(f'<circle cx="{c}" cy="{c}" r="{_num(rr * scale)}" fill="none" '
                        f'stroke="#888888" stroke-width="0.5"/>')
    return _document(size, size, body)
