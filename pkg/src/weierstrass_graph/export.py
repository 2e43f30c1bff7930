"""JSON, CSV and SVG serialization.

Floats are written with ``repr``, the shortest decimal that round-trips the
binary64 value; the json module does the same.
"""

from __future__ import annotations

import csv
import io
import json
from typing import Iterable, Sequence

import numpy as np

from ._version import __version__
from .ifs import GraphLevel
from .measure import MeasureTable

_NUMBER = {"type": "number"}
_INT = {"type": "integer"}

GRAPH_SCHEMA = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "title": "graph level",
    "type": "object",
    "required": ["params", "level", "vertices", "edges", "polygons"],
    "properties": {
        "params": {
            "type": "object",
            "required": ["lambda", "nb"],
            "properties": {"lambda": _NUMBER, "nb": {"type": "integer", "minimum": 3}},
        },
        "level": {"type": "integer", "minimum": 0},
        "vertices": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["k", "x", "y", "power"],
                "properties": {"k": _INT, "x": _NUMBER, "y": _NUMBER, "power": {"enum": [0.5, 1.0]}},
            },
        },
        "edges": {
            "type": "array",
            "items": {"type": "array", "items": _INT, "minItems": 2, "maxItems": 2},
        },
        "polygons": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["j", "vertex_indices"],
                "properties": {
                    "j": _INT,
                    "vertex_indices": {"type": "array", "items": _INT},
                    "measure": _NUMBER,
                },
            },
        },
    },
}

TABLE_SCHEMA = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "title": "result table",
    "type": "object",
    "required": ["command", "params", "columns", "rows"],
    "properties": {
        "command": {"type": "string"},
        "params": {
            "type": "object",
            "required": ["lambda", "nb"],
            "properties": {"lambda": _NUMBER, "nb": {"type": "integer", "minimum": 3}},
        },
        "level": _INT,
        "columns": {"type": "array", "items": {"type": "string"}},
        "rows": {
            "type": "array",
            "items": {"type": "array", "items": {"type": ["number", "integer", "string", "boolean", "null"]}},
        },
    },
}


def _plain(value):
    """numpy scalars to Python scalars, so json and csv see native types."""
    if isinstance(value, np.generic):
        return value.item()
    return value


def export_graph_json(level: GraphLevel, measures: MeasureTable | None = None) -> dict:
    polys = []
    for poly in level.polygons():
        entry = {"j": poly.j, "vertex_indices": list(poly.vertex_indices)}
        if measures is not None:
            entry["measure"] = float(measures.polygon_measure[poly.j])
        polys.append(entry)
    return {
        "params": {"lambda": level.params.lam, "nb": level.params.n_b},
        "level": level.m,
        "vertices": [
            {"k": int(k), "x": float(x), "y": float(y), "power": float(p)}
            for k, x, y, p in zip(level.k, level.x, level.y, level.powers)
        ],
        "edges": [[int(a), int(b)] for a, b in level.edges],
        "polygons": polys,
    }


def table_document(command: str, params, columns: Sequence[str], rows: Iterable[Sequence],
                   level: int | None = None) -> dict:
    doc = {"command": command, "params": {"lambda": params.lam, "nb": params.n_b}}
    if level is not None:
        doc["level"] = level
    doc["columns"] = list(columns)
    doc["rows"] = [[_plain(v) for v in row] for row in rows]
    return doc


def dumps_json(doc: dict) -> str:
    return json.dumps(doc, indent=1, allow_nan=False) + "\n"


def _cell(value) -> str:
    value = _plain(value)
    if isinstance(value, float):
        return repr(value)
    if value is None:
        return ""
    return str(value)


def dumps_csv(columns: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_cell(v) for v in row])
    return buf.getvalue()


PALETTE = ("#2ca02c", "#d62728", "#ff7f0e", "#17becf", "#1f77b4", "#9467bd", "#8c564b", "#e377c2")

SVG_WIDTH = 800
SVG_HEIGHT = 500
MARGIN = 0.05


def _fmt(v: float) -> str:
    return f"{v:.3f}".rstrip("0").rstrip(".")


def render_svg(series: Sequence[tuple[str, np.ndarray, np.ndarray]], markers: bool = False,
               title: str = "", width: int = SVG_WIDTH, height: int = SVG_HEIGHT) -> str:
    """One polyline per (label, xs, ys) in data coordinates, y pointing up.

    The drawing area is the data bounding box widened by 5% on each side.
    With ``markers`` every sample is also drawn as a dot.
    """
    if not series:
        raise ValueError("nothing to render")
    xs = np.concatenate([np.asarray(s[1], dtype=float) for s in series])
    ys = np.concatenate([np.asarray(s[2], dtype=float) for s in series])
    x0, x1 = float(xs.min()), float(xs.max())
    y0, y1 = float(ys.min()), float(ys.max())
    dx = (x1 - x0) or 1.0
    dy = (y1 - y0) or 1.0
    x0, x1 = x0 - MARGIN * dx, x1 + MARGIN * dx
    y0, y1 = y0 - MARGIN * dy, y1 + MARGIN * dy

    def px(x):
        return (np.asarray(x, dtype=float) - x0) / (x1 - x0) * width

    def py(y):
        return (y1 - np.asarray(y, dtype=float)) / (y1 - y0) * height

    out = [
        '<?xml version="1.0" encoding="UTF-8" standalone="no"?>',
        f"<!-- generated by weierstrass-graph {__version__} -->",
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
    ]
    if title:
        out.append(f"  <title>{title}</title>")
    out.append(f'  <rect x="0" y="0" width="{width}" height="{height}" fill="white"/>')
    for i, (label, sx, sy) in enumerate(series):
        color = PALETTE[i % len(PALETTE)]
        pts = " ".join(f"{_fmt(a)},{_fmt(b)}" for a, b in zip(px(sx), py(sy)))
        out.append(f'  <g id="series-{i}">')
        out.append(f"    <desc>{label}</desc>")
        out.append(f'    <polyline fill="none" stroke="{color}" stroke-width="1.5" points="{pts}"/>')
        if markers:
            for a, b in zip(px(sx), py(sy)):
                out.append(f'    <circle cx="{_fmt(a)}" cy="{_fmt(b)}" r="3" fill="{color}"/>')
        out.append("  </g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def render_levels(levels: Sequence[GraphLevel]) -> str:
    return render_svg([(f"level {lv.m}", lv.x, lv.y) for lv in levels],
                      title="prefractal graphs, levels " + ", ".join(str(lv.m) for lv in levels))


def render_eigenfunction(level: GraphLevel, u, lt: float) -> str:
    return render_svg([(f"eigenfunction, lambda_tilde={lt!r}", level.x, u)], markers=True,
                      title=f"level {level.m} eigenfunction")
