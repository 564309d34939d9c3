"""Deterministic CSV / JSON / SVG writers.

Every file carries a metadata block (tool version, config echo, master seed,
tolerances). Nothing time- or host-dependent is written, so identical inputs
give byte-identical files.
"""
import csv
import json
import math
from xml.sax.saxutils import escape

import numpy as np

from . import __version__
from .boundary import DOMINANCE_SLACK, PURITY_TOL, TRAIT_TOL
from .haar import UNITARITY_TOL
from .linalg import HERMITIAN_TOL, JACOBI_TOL
from .qstate import CLAMP_TOL

TOLERANCES = {
    "purity_tolerance": PURITY_TOL,
    "dominance_slack": DOMINANCE_SLACK,
    "trait_tolerance": TRAIT_TOL,
    "unitarity_tolerance": UNITARITY_TOL,
    "hermitian_tolerance": HERMITIAN_TOL,
    "jacobi_tolerance": JACOBI_TOL,
    "eigenvalue_clamp": CLAMP_TOL,
}


def metadata(config, seed):
    return {
        "tool": "purilab",
        "version": __version__,
        "seed": int(seed),
        "config": config,
        "tolerances": TOLERANCES,
    }


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isnan(v):
            return "nan"
        return repr(v)
    return str(v)


def write_csv(path, meta, columns, rows):
    with open(path, "w", newline="") as fh:
        for key in ("tool", "version", "seed"):
            fh.write(f"# {key}: {meta[key]}\n")
        fh.write(f"# config: {json.dumps(meta['config'], sort_keys=True)}\n")
        fh.write(f"# tolerances: {json.dumps(meta['tolerances'], sort_keys=True)}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([_fmt(row[c]) for c in columns])


def read_csv(path):
    """Rows of a file written by :func:`write_csv` as dicts of strings, plus metadata."""
    meta = {}
    body = []
    with open(path, newline="") as fh:
        for line in fh:
            if line.startswith("# "):
                key, _, val = line[2:].partition(": ")
                meta[key] = json.loads(val) if key in ("config", "tolerances") else val.strip()
            else:
                body.append(line)
    return meta, list(csv.DictReader(body))


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return None if math.isnan(v) else v
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def write_json(path, meta, payload):
    with open(path, "w") as fh:
        json.dump(_jsonable({"metadata": meta, **payload}), fh, indent=1, sort_keys=True)
        fh.write("\n")


def unitary_to_json(u):
    u = np.asarray(u, dtype=complex)
    return {"re": u.real.tolist(), "im": u.imag.tolist()}


def unitary_from_json(obj):
    return np.asarray(obj["re"], dtype=float) + 1j * np.asarray(obj["im"], dtype=float)


PALETTE = ("#1f4e9c", "#e07b1a", "#2f9e44", "#c92a2a", "#7048e8", "#868e96")


def write_svg_scatter(path, meta, series, xlabel, ylabel, title="", curves=(), vlines=(),
                      width=640, height=480):
    """Minimal scatter plot.

    ``series``: iterable of ``(label, xs, ys)`` drawn as dots; ``curves``:
    ``(label, xs, ys)`` drawn as polylines; ``vlines``: x positions drawn dashed.
    """
    pad_l, pad_r, pad_t, pad_b = 70, 20, 40, 55
    xs_all = [x for _, xs, _ in list(series) + list(curves) for x in xs] + list(vlines)
    ys_all = [y for _, _, ys in list(series) + list(curves) for y in ys]
    xs_all = [x for x in xs_all if np.isfinite(x)] or [0.0, 1.0]
    ys_all = [y for y in ys_all if np.isfinite(y)] or [0.0, 1.0]
    x0, x1 = min(xs_all), max(xs_all)
    y0, y1 = min(ys_all), max(ys_all)
    if x1 <= x0:
        x0, x1 = x0 - 0.5, x1 + 0.5
    if y1 <= y0:
        y0, y1 = y0 - 0.5, y1 + 0.5
    mx, my = 0.03 * (x1 - x0), 0.03 * (y1 - y0)
    x0, x1, y0, y1 = x0 - mx, x1 + mx, y0 - my, y1 + my
    pw_, ph_ = width - pad_l - pad_r, height - pad_t - pad_b

    def px(x):
        return pad_l + (x - x0) / (x1 - x0) * pw_

    def py(y):
        return pad_t + (1.0 - (y - y0) / (y1 - y0)) * ph_

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f"<!-- {escape(json.dumps(_jsonable(meta), sort_keys=True))} -->",
        '<rect width="100%" height="100%" fill="white"/>',
        f'<rect x="{pad_l}" y="{pad_t}" width="{pw_}" height="{ph_}" fill="none" stroke="black"/>',
        f'<text x="{width / 2:.1f}" y="22" text-anchor="middle" font-size="15">{escape(title)}</text>',
        f'<text x="{pad_l + pw_ / 2:.1f}" y="{height - 12}" text-anchor="middle" font-size="13">'
        f"{escape(xlabel)}</text>",
        f'<text x="16" y="{pad_t + ph_ / 2:.1f}" text-anchor="middle" font-size="13" '
        f'transform="rotate(-90 16 {pad_t + ph_ / 2:.1f})">{escape(ylabel)}</text>',
    ]
    for k in range(6):
        xv = x0 + (x1 - x0) * k / 5
        yv = y0 + (y1 - y0) * k / 5
        out.append(f'<text x="{px(xv):.1f}" y="{pad_t + ph_ + 16}" text-anchor="middle" '
                   f'font-size="10">{xv:.3f}</text>')
        out.append(f'<text x="{pad_l - 6}" y="{py(yv) + 3:.1f}" text-anchor="end" '
                   f'font-size="10">{yv:.3f}</text>')
    for x in vlines:
        out.append(f'<line x1="{px(x):.2f}" y1="{pad_t}" x2="{px(x):.2f}" y2="{pad_t + ph_}" '
                   'stroke="gray" stroke-dasharray="4 3"/>')
    legend = []
    for k, (label, xs, ys) in enumerate(series):
        color = PALETTE[k % len(PALETTE)]
        legend.append((label, color))
        out.append(f'<g fill="{color}" fill-opacity="0.5">')
        for x, y in zip(xs, ys):
            if np.isfinite(x) and np.isfinite(y):
                out.append(f'<circle cx="{px(x):.2f}" cy="{py(y):.2f}" r="1.3"/>')
        out.append("</g>")
    for k, (label, xs, ys) in enumerate(curves):
        color = PALETTE[(k + 3) % len(PALETTE)]
        legend.append((label, color))
        pts = " ".join(f"{px(x):.2f},{py(y):.2f}" for x, y in zip(xs, ys)
                       if np.isfinite(x) and np.isfinite(y))
        out.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.8"/>')
    for k, (label, color) in enumerate(legend):
        y = pad_t + 14 + 15 * k
        out.append(f'<rect x="{pad_l + 8}" y="{y - 8}" width="9" height="9" fill="{color}"/>')
        out.append(f'<text x="{pad_l + 22}" y="{y}" font-size="11">{escape(str(label))}</text>')
    out.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(out) + "\n")
