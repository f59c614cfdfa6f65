"""Deterministic SVG 1.1 drawings of embeddings, packings and overlays.

Heatmaps use a sequential three-stop ramp, pale yellow ``#ffffcc`` through
orange ``#fd8d3c`` to dark red ``#800026``, applied to ``(v - min)/(max - min)``;
luminance decreases monotonically along it, so darker means larger.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import MissingPositions
from .graph import EmbeddedGraph
from .packing import PackingResult

RAMP = ((0xFF, 0xFF, 0xCC), (0xFD, 0x8D, 0x3C), (0x80, 0x00, 0x26))


def color(t: float) -> str:
    """Hex colour for ``t`` in ``[0, 1]`` on the heatmap ramp."""
    t = min(max(float(t), 0.0), 1.0) * (len(RAMP) - 1)
    k = min(int(t), len(RAMP) - 2)
    f = t - k
    rgb = [round(a + (b - a) * f) for a, b in zip(RAMP[k], RAMP[k + 1])]
    return "#%02x%02x%02x" % tuple(rgb)


@dataclass
class RenderSpec:
    circles: bool = True
    edges: bool = True
    faces: bool = False
    unit_circle: bool = True
    ball: object = None  # CableBall
    cone: object = None  # CableBall
    curve: object = None  # (k, 2) array of points
    heatmap: object = None  # length-n vertex values
    size: int = 800
    stroke: str = "#333333"
    stroke_width: float = 1.0
    fill: str = "none"
    overlay_color: dict = field(default_factory=lambda: {"ball": "#1f77b4", "cone": "#2ca02c", "curve": "#d62728"})


def _n(x: float) -> str:
    return f"{x:.4f}".rstrip("0").rstrip(".") if x != 0 else "0"


class _Canvas:
    def __init__(self, lo, hi, size):
        span = float(max(hi - lo))
        self.lo, self.scale, self.size = lo, size / span, size
        self.hi_y = hi[1]
        self.parts: list[str] = []

    def xy(self, p):
        return (p[0] - self.lo[0]) * self.scale, (self.hi_y - p[1]) * self.scale

    def circle(self, c, r, style):
        x, y = self.xy(c)
        self.parts.append(f'<circle cx="{_n(x)}" cy="{_n(y)}" r="{_n(r * self.scale)}" {style}/>')

    def line(self, a, b, style):
        (x0, y0), (x1, y1) = self.xy(a), self.xy(b)
        self.parts.append(f'<line x1="{_n(x0)}" y1="{_n(y0)}" x2="{_n(x1)}" y2="{_n(y1)}" {style}/>')

    def poly(self, pts, style, closed):
        d = " ".join("%s,%s" % tuple(map(_n, self.xy(p))) for p in pts)
        tag = "polygon" if closed else "polyline"
        self.parts.append(f'<{tag} points="{d}" {style}/>')

    def open(self, name):
        self.parts.append(f'<g id="{name}">')

    def close(self):
        self.parts.append("</g>")

    def document(self):
        head = ('<?xml version="1.0" encoding="UTF-8" standalone="no"?>\n'
                '<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
                f'width="{self.size}" height="{self.size}" viewBox="0 0 {self.size} {self.size}">')
        return head + "\n" + "\n".join(self.parts) + "\n</svg>\n"


def render(graph: EmbeddedGraph | None = None, packing: PackingResult | None = None,
           spec: RenderSpec | None = None) -> str:
    """Draw base layers (faces, circles, edges) then overlays; returns the SVG text."""
    spec = spec or RenderSpec()
    if graph is None and packing is None:
        raise MissingPositions("nothing to draw")
    pos = None
    if graph is not None:
        pos = getattr(graph, "pos", None)
        if pos is None:
            raise MissingPositions("graph has no positions")
    elif packing is not None:
        pos = packing.center
    pts = [np.asarray(pos)]
    if packing is not None:
        pts += [packing.center - packing.radius[:, None], packing.center + packing.radius[:, None]]
    if spec.unit_circle and packing is not None:
        pts.append(np.array([[-1.0, -1.0], [1.0, 1.0]]))
    allp = np.concatenate(pts)
    lo, hi = allp.min(0), allp.max(0)
    pad = 0.03 * float(max(hi - lo)) or 1.0
    cv = _Canvas(lo - pad, hi + pad, spec.size)
    line = f'fill="none" stroke="{spec.stroke}" stroke-width="{_n(spec.stroke_width)}"'

    if spec.faces and graph is not None:
        cv.open("faces")
        for f in graph.bounded_faces:
            cv.poly(graph.pos[list(f.boundary)], 'fill="#eeeeee" stroke="none"', True)
        cv.close()
    if spec.heatmap is not None and graph is not None:
        vals = np.asarray(spec.heatmap, dtype=float)
        lo_v, hi_v = float(vals.min()), float(vals.max())
        span = hi_v - lo_v or 1.0
        rad = 0.3 * graph.isolation_radii
        cv.open("heatmap")
        for v in range(graph.n):
            cv.circle(graph.pos[v], rad[v], f'fill="{color((vals[v] - lo_v) / span)}" stroke="none"')
        cv.close()
    if spec.unit_circle and packing is not None:
        cv.open("unit-circle")
        cv.circle((0.0, 0.0), 1.0, line)
        cv.close()
    if spec.circles and packing is not None:
        style = f'fill="{spec.fill}" stroke="{spec.stroke}" stroke-width="{_n(spec.stroke_width)}"'
        cv.open("circles")
        for c, r in zip(packing.center, packing.radius):
            cv.circle(c, r, style)
        cv.close()
    if spec.edges and graph is not None:
        cv.open("edges")
        for u, v in graph.edges:
            cv.line(graph.pos[u], graph.pos[v], line)
        cv.close()
    for name in ("ball", "cone"):
        obj = getattr(spec, name)
        if obj is None:
            continue
        if graph is None:
            raise MissingPositions(f"{name} overlay needs a graph")
        st = f'fill="none" stroke="{spec.overlay_color[name]}" stroke-width="{_n(3 * spec.stroke_width)}"'
        cv.open(name)
        for e, a, b in obj.pieces:
            p, q = graph.pos[graph.edges[e, 0]], graph.pos[graph.edges[e, 1]]
            cv.line(p + a * (q - p), p + b * (q - p), st)
        cv.close()
    if spec.curve is not None:
        st = f'fill="none" stroke="{spec.overlay_color["curve"]}" stroke-width="{_n(2 * spec.stroke_width)}"'
        cv.open("curve")
        cv.poly(np.asarray(spec.curve), st, False)
        cv.close()
    return cv.document()
