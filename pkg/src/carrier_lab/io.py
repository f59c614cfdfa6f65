"""JSON file formats for graphs, packings and reports, plus CSV output.

Canonical files have dense ids ``0..n-1``, edges sorted by ``(u, v)`` with
``u < v``, one record per line and floats written with 17 significant digits,
so ``save(load(text)) == text`` for any canonical text.
"""
from __future__ import annotations

import csv
import json
import math
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import FormatVersionMismatch, MissingPositions, SchemaViolation
from .generators import Triangulation
from .graph import EmbeddedGraph, build
from .packing import PackingResult

GRAPH_FORMAT = "carrier-graph/1"
PACKING_FORMAT = "carrier-packing/1"


def fmt(x) -> str:
    """A float as JSON with 17 significant digits."""
    x = float(x)
    if not math.isfinite(x):
        raise SchemaViolation(f"non-finite number {x!r} cannot be written")
    s = "%.17g" % x
    return s if any(c in s for c in ".en") else s + ".0"


def _obj(pairs) -> str:
    return "{" + ",".join(f'"{k}":{v}' for k, v in pairs) + "}"


def _lines(header: str, name: str, rows, tail: str = "") -> str:
    body = ",\n".join(rows)
    return f'{header},\n"{name}":[\n{body}\n]{tail}'


@dataclass
class GraphDocument:
    """Contents of a graph file; positions and triangles are optional."""

    n: int
    positions: np.ndarray | None
    edges: list  # (u, v, w) with u < v
    triangles: np.ndarray | None = None
    boundary: tuple | None = None

    def to_graph(self) -> EmbeddedGraph:
        if self.positions is None:
            raise MissingPositions("the graph file has no vertex positions")
        return build(self.positions, self.edges)

    def to_triangulation(self) -> Triangulation:
        if self.triangles is None or self.boundary is None:
            raise SchemaViolation("the graph file carries no triangles/boundary")
        return Triangulation(self.n, self.triangles, tuple(self.boundary), self.positions)


def graph_document(obj) -> GraphDocument:
    if isinstance(obj, EmbeddedGraph):
        e = [(int(u), int(v), float(w)) for (u, v), w in zip(obj.edges, obj.weights)]
        return GraphDocument(obj.n, np.asarray(obj.pos), sorted(e))
    if isinstance(obj, Triangulation):
        e = [(u, v, 1.0) for u, v in obj.edges()]
        return GraphDocument(obj.n, obj.positions, e, np.asarray(obj.triangles), tuple(obj.boundary))
    if isinstance(obj, GraphDocument):
        return obj
    raise TypeError(f"cannot serialise {type(obj).__name__} as a graph")


def dumps_graph(obj) -> str:
    doc = graph_document(obj)
    verts = []
    for i in range(doc.n):
        pairs = [("id", str(i))]
        if doc.positions is not None:
            pairs += [("x", fmt(doc.positions[i, 0])), ("y", fmt(doc.positions[i, 1]))]
        verts.append(_obj(pairs))
    edges = [_obj([("u", str(u)), ("v", str(v)), ("w", fmt(w))]) for u, v, w in sorted(doc.edges)]
    text = _lines('{"format":"' + GRAPH_FORMAT + '"', "vertices", verts)
    text = _lines(text, "edges", edges)
    if doc.triangles is not None:
        tris = ["[" + ",".join(str(int(a)) for a in t) + "]" for t in doc.triangles]
        text = _lines(text, "triangles", tris)
        text += ',\n"boundary":[' + ",".join(str(int(b)) for b in doc.boundary) + "]"
    return text + "}\n"


def _require(d, key, kind, where):
    if key not in d:
        raise SchemaViolation(f"{where}: missing key {key!r}")
    val = d[key]
    if kind is float:
        if isinstance(val, bool) or not isinstance(val, (int, float)):
            raise SchemaViolation(f"{where}: {key!r} must be a number")
        return float(val)
    if kind is int:
        if isinstance(val, bool) or not isinstance(val, int):
            raise SchemaViolation(f"{where}: {key!r} must be an integer")
        return val
    if not isinstance(val, kind):
        raise SchemaViolation(f"{where}: {key!r} has the wrong type")
    return val


def _check_format(d, expected):
    if not isinstance(d, dict):
        raise SchemaViolation("top level must be a JSON object")
    tag = d.get("format")
    if tag != expected:
        raise FormatVersionMismatch(f"expected format {expected!r}, found {tag!r}")


def loads_graph(text: str) -> GraphDocument:
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaViolation(f"invalid JSON: {exc}") from exc
    _check_format(d, GRAPH_FORMAT)
    verts = _require(d, "vertices", list, "graph")
    ids = [_require(v, "id", int, "vertex") for v in verts]
    if len(set(ids)) != len(ids):
        raise SchemaViolation("duplicate vertex id")
    dense = {vid: k for k, vid in enumerate(sorted(ids))}
    has_xy = ["x" in v or "y" in v for v in verts]
    if any(has_xy) and not all(has_xy):
        raise SchemaViolation("either every vertex has a position or none does")
    pos = None
    if all(has_xy) and verts:
        pos = np.zeros((len(ids), 2))
        for v in verts:
            pos[dense[v["id"]]] = (_require(v, "x", float, "vertex"), _require(v, "y", float, "vertex"))
    edges = []
    defaulted = 0
    for e in _require(d, "edges", list, "graph"):
        u, v = _require(e, "u", int, "edge"), _require(e, "v", int, "edge")
        if u not in dense or v not in dense:
            raise SchemaViolation(f"edge ({u}, {v}) references an unknown vertex")
        if "w" in e:
            w = _require(e, "w", float, "edge")
        else:
            w = 1.0
            defaulted += 1
        a, b = sorted((dense[u], dense[v]))
        edges.append((a, b, w))
    if defaulted:
        warnings.warn(f"{defaulted} edge(s) without weight; using 1.0", stacklevel=2)
    tris = bnd = None
    if "triangles" in d:
        tris = np.array([[dense[int(a)] for a in t] for t in _require(d, "triangles", list, "graph")],
                        dtype=np.int64).reshape(-1, 3)
        bnd = tuple(dense[int(b)] for b in _require(d, "boundary", list, "graph"))
    return GraphDocument(len(ids), pos, sorted(edges), tris, bnd)


def save_graph(obj, path) -> None:
    Path(path).write_text(dumps_graph(obj), encoding="utf-8")


def load_graph(path) -> GraphDocument:
    return loads_graph(Path(path).read_text(encoding="utf-8"))


# -- packings ------------------------------------------------------------------

def dumps_packing(p: PackingResult) -> str:
    radii = [_obj([("id", str(i)), ("r", fmt(r))]) for i, r in enumerate(p.radius)]
    centers = [_obj([("id", str(i)), ("x", fmt(c[0])), ("y", fmt(c[1]))]) for i, c in enumerate(p.center)]
    text = _lines('{"format":"' + PACKING_FORMAT + '"', "radii", radii)
    text = _lines(text, "centers", centers)
    res = _obj([("angle", fmt(p.angle_residual)), ("tangency", fmt(p.tangency_residual))])
    bd = ",".join(str(int(i)) for i in np.flatnonzero(p.is_boundary))
    return text + f',\n"residuals":{res},\n"boundary":[{bd}],\n"iterations":{int(p.iterations)}' + "}\n"


def loads_packing(text: str) -> PackingResult:
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaViolation(f"invalid JSON: {exc}") from exc
    _check_format(d, PACKING_FORMAT)
    radii = _require(d, "radii", list, "packing")
    centers = _require(d, "centers", list, "packing")
    n = len(radii)
    if len(centers) != n:
        raise SchemaViolation("radii and centers differ in length")
    r = np.zeros(n)
    c = np.zeros((n, 2))
    for item in radii:
        i = _require(item, "id", int, "radius")
        if not 0 <= i < n:
            raise SchemaViolation(f"radius id {i} out of range")
        r[i] = _require(item, "r", float, "radius")
    for item in centers:
        i = _require(item, "id", int, "center")
        if not 0 <= i < n:
            raise SchemaViolation(f"center id {i} out of range")
        c[i] = (_require(item, "x", float, "center"), _require(item, "y", float, "center"))
    res = _require(d, "residuals", dict, "packing")
    bd = np.zeros(n, dtype=bool)
    bd[[int(b) for b in d.get("boundary", [])]] = True
    return PackingResult(radius=r, center=c, is_boundary=bd, iterations=int(d.get("iterations", 0)),
                         angle_residual=_require(res, "angle", float, "residuals"),
                         tangency_residual=_require(res, "tangency", float, "residuals"),
                         hyperbolic_radius=np.full(n, np.nan))


def save_packing(p: PackingResult, path) -> None:
    Path(path).write_text(dumps_packing(p), encoding="utf-8")


def load_packing(path) -> PackingResult:
    return loads_packing(Path(path).read_text(encoding="utf-8"))


# -- reports -----------------------------------------------------------------------

def plain(x):
    if isinstance(x, dict):
        return {str(k): plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [plain(v) for v in x]
    if isinstance(x, np.ndarray):
        return [plain(v) for v in x.tolist()]
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else str(x)
    return x


def dumps_report(report: dict) -> str:
    return json.dumps(plain(report), indent=2, sort_keys=True) + "\n"


def save_report(report: dict, path) -> None:
    Path(path).write_text(dumps_report(report), encoding="utf-8")


def write_csv(path, header, rows) -> None:
    """CSV with a header row, '.' decimals and '\\n' line endings."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([repr(float(x)) if isinstance(x, (float, np.floating)) else x for x in row])
