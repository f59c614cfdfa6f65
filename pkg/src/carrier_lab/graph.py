"""Straight-line embedded planar graphs.

Vertices are dense integers ``0..n-1``. Edges are stored canonically as
``(u, v)`` with ``u < v`` sorted lexicographically; the position of an edge
in that order is its edge id (used by cable points in :mod:`metric`).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial import cKDTree

from .errors import (
    Disconnected,
    DuplicatePosition,
    EdgeCrossing,
    GraphError,
    SingletonGraph,
)

TAU_GEOM = 1e-12


@dataclass(frozen=True)
class Face:
    boundary: tuple[int, ...]
    bounded: bool
    area: float
    diameter: float


def _readonly(a):
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


class EmbeddedGraph:
    """An immutable planar graph with a straight-line embedding.

    Use :func:`build` to construct one; the constructor trusts its input.
    """

    def __init__(self, pos, edges, weights, check=True):
        self.pos = _readonly(np.asarray(pos, dtype=float).reshape(-1, 2))
        self.edges = _readonly(np.asarray(edges, dtype=np.int64).reshape(-1, 2))
        self.weights = _readonly(np.asarray(weights, dtype=float))
        n = len(self.pos)
        self.n = n
        self.m = len(self.edges)
        d = self.pos[self.edges[:, 1]] - self.pos[self.edges[:, 0]]
        self.edge_lengths = _readonly(np.hypot(d[:, 0], d[:, 1]))
        self._edge_index = {(int(u), int(v)): i for i, (u, v) in enumerate(self.edges)}

        # rotation system: neighbours sorted counterclockwise by angle
        u = np.concatenate([self.edges[:, 0], self.edges[:, 1]])
        v = np.concatenate([self.edges[:, 1], self.edges[:, 0]])
        eid = np.concatenate([np.arange(self.m), np.arange(self.m)])
        dv = self.pos[v] - self.pos[u]
        ang = np.arctan2(dv[:, 1], dv[:, 0])
        order = np.lexsort((ang, u))
        self.adj_idx = _readonly(v[order])
        self.adj_edge = _readonly(eid[order])
        self.adj_angle = _readonly(ang[order])
        deg = np.bincount(u, minlength=n)
        self.degree = _readonly(deg)
        self.adj_ptr = _readonly(np.concatenate([[0], np.cumsum(deg)]))
        self.max_degree = int(deg.max()) if n else 0
        self.vertex_weight = _readonly(np.bincount(u, weights=np.concatenate([self.weights, self.weights]),
                                                   minlength=n))
        self._faces = None
        self._isolation = None
        self._tree = None
        # derived tables owned by other modules (distance matrices, walk tables)
        self._cache: dict = {}

    # -- adjacency -----------------------------------------------------
    def neighbors(self, v: int) -> np.ndarray:
        """Neighbours of ``v`` in counterclockwise order."""
        return self.adj_idx[self.adj_ptr[v]:self.adj_ptr[v + 1]]

    def incident_edges(self, v: int) -> np.ndarray:
        return self.adj_edge[self.adj_ptr[v]:self.adj_ptr[v + 1]]

    def edge_id(self, u: int, v: int) -> int:
        if u > v:
            u, v = v, u
        return self._edge_index[(int(u), int(v))]

    def has_edge(self, u: int, v: int) -> bool:
        if u > v:
            u, v = v, u
        return (int(u), int(v)) in self._edge_index

    # -- faces ---------------------------------------------------------
    @property
    def faces(self) -> list[Face]:
        if self._faces is None:
            self._faces, self._outer = _trace_faces(self)
        return self._faces

    @property
    def outer_face(self) -> Face:
        self.faces
        return self._faces[self._outer]

    @property
    def bounded_faces(self) -> list[Face]:
        return [f for f in self.faces if f.bounded]

    @property
    def boundary_vertices(self) -> np.ndarray:
        """Vertices on the unbounded face."""
        return np.unique(np.asarray(self.outer_face.boundary, dtype=np.int64))

    # -- geometry ------------------------------------------------------
    @property
    def tree(self) -> cKDTree:
        if self._tree is None:
            self._tree = cKDTree(self.pos)
        return self._tree

    @property
    def isolation_radii(self) -> np.ndarray:
        if self._isolation is None:
            if self.n < 2:
                raise SingletonGraph("isolation radius needs at least two vertices")
            dist, _ = self.tree.query(self.pos, k=2)
            self._isolation = _readonly(dist[:, 1])
        return self._isolation

    def carrier_contains_disc(self, center, r: float) -> bool:
        """True when the closed Euclidean disc lies in the union of bounded faces."""
        c = np.asarray(center, dtype=float)
        cyc = np.asarray(self.outer_face.boundary, dtype=np.int64)
        if len(cyc) < 3:
            return False
        a = self.pos[cyc]
        b = self.pos[np.roll(cyc, -1)]
        if not _point_in_polygon(c, a):
            return False
        return bool(_point_segment_distance(c, a, b).min() >= r)

    def __repr__(self):
        return f"EmbeddedGraph(n={self.n}, m={self.m})"


def _point_in_polygon(p, poly):
    """Winding-number test; ``poly`` is an (k,2) vertex cycle."""
    x, y = p
    a = poly
    b = np.roll(poly, -1, axis=0)
    up = (a[:, 1] <= y) & (b[:, 1] > y)
    down = (a[:, 1] > y) & (b[:, 1] <= y)
    cross = (b[:, 0] - a[:, 0]) * (y - a[:, 1]) - (x - a[:, 0]) * (b[:, 1] - a[:, 1])
    wn = np.sum(up & (cross > 0)) - np.sum(down & (cross < 0))
    return wn != 0


def _point_segment_distance(p, a, b):
    ab = b - a
    ap = p - a
    den = np.einsum("ij,ij->i", ab, ab)
    t = np.clip(np.einsum("ij,ij->i", ap, ab) / np.where(den > 0, den, 1.0), 0.0, 1.0)
    q = a + t[:, None] * ab
    return np.hypot(*(p - q).T)


def segment_distance(p0, p1, q0, q1):
    """Vectorised Euclidean distance between segments ``[p0,p1]`` and ``[q0,q1]``."""
    p0, p1, q0, q1 = (np.atleast_2d(np.asarray(x, dtype=float)) for x in (p0, p1, q0, q1))

    def orient(a, b, c):
        return (b[:, 0] - a[:, 0]) * (c[:, 1] - a[:, 1]) - (b[:, 1] - a[:, 1]) * (c[:, 0] - a[:, 0])

    def psd(p, a, b):
        ab = b - a
        den = np.einsum("ij,ij->i", ab, ab)
        t = np.clip(np.einsum("ij,ij->i", p - a, ab) / np.where(den > 0, den, 1.0), 0.0, 1.0)
        d = p - (a + t[:, None] * ab)
        return np.hypot(d[:, 0], d[:, 1])

    d = np.minimum.reduce([psd(p0, q0, q1), psd(p1, q0, q1), psd(q0, p0, p1), psd(q1, p0, p1)])
    o1, o2 = orient(p0, p1, q0), orient(p0, p1, q1)
    o3, o4 = orient(q0, q1, p0), orient(q0, q1, p1)
    proper = (o1 * o2 < 0) & (o3 * o4 < 0)
    return np.where(proper, 0.0, d)


def _trace_faces(g: EmbeddedGraph):
    n = g.n
    ptr = g.adj_ptr
    nbr = g.adj_idx
    # position of each half-edge (u->v) inside u's rotation
    slot = {}
    for u in range(n):
        for k in range(ptr[u], ptr[u + 1]):
            slot[(u, int(nbr[k]))] = k
    used = np.zeros(len(nbr), dtype=bool)
    traces = []
    for start in range(len(nbr)):
        if used[start]:
            continue
        cyc = []
        k = start
        while not used[k]:
            used[k] = True
            u = int(np.searchsorted(ptr, k, side="right") - 1)
            v = int(nbr[k])
            cyc.append(u)
            j = slot[(v, u)]
            lo, hi = ptr[v], ptr[v + 1]
            k = lo + ((j - lo - 1) % (hi - lo))
        traces.append(cyc)
    areas = []
    for cyc in traces:
        p = g.pos[cyc]
        q = np.roll(p, -1, axis=0)
        areas.append(0.5 * float(np.sum(p[:, 0] * q[:, 1] - q[:, 0] * p[:, 1])))
    outer = int(np.argmin(areas))
    faces = []
    for i, cyc in enumerate(traces):
        if i == outer:
            faces.append(Face(tuple(cyc), False, math.inf, math.inf))
        else:
            p = g.pos[cyc]
            diff = p[:, None, :] - p[None, :, :]
            diam = float(np.sqrt((diff ** 2).sum(-1)).max())
            faces.append(Face(tuple(cyc), True, areas[i], diam))
    return faces, outer


def _normalize_edges(edges) -> tuple[list[tuple[int, int]], list[float]]:
    pairs, ws = [], []
    for item in edges:
        if len(item) == 2 and isinstance(item[0], (tuple, list)):
            (u, v), w = item
        elif len(item) == 3:
            u, v, w = item
        else:
            (u, v), w = item, 1.0
        pairs.append((int(u), int(v)))
        ws.append(float(w))
    return pairs, ws


def build(positions, edges: Iterable, tol: float = TAU_GEOM) -> EmbeddedGraph:
    """Validate input and return an :class:`EmbeddedGraph`.

    ``positions`` is an ``(n, 2)`` array or a mapping ``id -> (x, y)`` with ids
    ``0..n-1``. ``edges`` items are ``((u, v), w)``, ``(u, v, w)`` or ``(u, v)``.
    """
    if isinstance(positions, Mapping):
        n = len(positions)
        pos = np.array([positions[i] for i in range(n)], dtype=float)
    else:
        pos = np.asarray(positions, dtype=float).reshape(-1, 2)
    n = len(pos)
    if n == 0:
        raise GraphError("empty graph")
    pairs, ws = _normalize_edges(edges)
    canon = {}
    for (u, v), w in zip(pairs, ws):
        if u == v:
            raise GraphError(f"self-loop at {u}")
        if not (0 <= u < n and 0 <= v < n):
            raise GraphError(f"edge ({u}, {v}) references unknown vertex")
        if not (w > 0 and math.isfinite(w)):
            raise GraphError(f"edge ({u}, {v}) has non-positive weight {w}")
        key = (min(u, v), max(u, v))
        if key in canon:
            raise GraphError(f"duplicate edge {key}")
        canon[key] = w
    keys = sorted(canon)
    e = np.array(keys, dtype=np.int64).reshape(-1, 2)
    w = np.array([canon[k] for k in keys], dtype=float)

    _check_duplicates(pos, e, tol)
    if n > 1:
        adj = coo_matrix((np.ones(len(e)), (e[:, 0], e[:, 1])), shape=(n, n))
        ncomp, _ = connected_components(adj, directed=False)
        if ncomp != 1:
            raise Disconnected(f"graph has {ncomp} components")
    _check_crossings(pos, e, tol)
    g = EmbeddedGraph(pos, e, w)
    g.faces
    return g


def _check_duplicates(pos, e, tol):
    if len(pos) < 2:
        return
    lengths = np.hypot(*(pos[e[:, 1]] - pos[e[:, 0]]).T) if len(e) else np.array([1.0])
    local = np.zeros(len(pos))
    if len(e):
        np.maximum.at(local, e[:, 0], lengths)
        np.maximum.at(local, e[:, 1], lengths)
    scale = max(float(lengths.max()), float(np.ptp(pos, axis=0).max()), 1e-300)
    for i, j in sorted(cKDTree(pos).query_pairs(tol * scale)):
        d = float(np.hypot(*(pos[i] - pos[j])))
        if d <= tol * max(local[i], local[j], 1e-300) or d == 0.0:
            raise DuplicatePosition(int(i), int(j))


def _check_crossings(pos, e, tol):
    if len(e) < 2:
        return
    import shapely

    a, b = pos[e[:, 0]], pos[e[:, 1]]
    lines = shapely.linestrings(np.stack([a, b], axis=1))
    tree = shapely.STRtree(lines)
    i, j = tree.query(lines)
    keep = i < j
    i, j = i[keep], j[keep]
    if len(i) == 0:
        return
    eu, ev = e[i], e[j]
    shared = (eu[:, 0] == ev[:, 0]) | (eu[:, 0] == ev[:, 1]) | (eu[:, 1] == ev[:, 0]) | (eu[:, 1] == ev[:, 1])
    li = np.hypot(*(b[i] - a[i]).T)
    lj = np.hypot(*(b[j] - a[j]).T)
    # non-adjacent pairs: any contact is a crossing
    na = ~shared
    if na.any():
        d = segment_distance(a[i[na]], b[i[na]], a[j[na]], b[j[na]])
        bad = d <= tol * np.minimum(li[na], lj[na])
        if bad.any():
            k = np.flatnonzero(na)[np.argmax(bad)]
            raise EdgeCrossing(tuple(map(int, e[i[k]])), tuple(map(int, e[j[k]])))
    # adjacent pairs: only a collinear overlap is a crossing
    idx = np.flatnonzero(shared)
    for k in idx:
        (p, q), (r, s) = e[i[k]], e[j[k]]
        c = p if p in (r, s) else q
        x = q if c == p else p
        y = s if c == r else r
        u = pos[x] - pos[c]
        v = pos[y] - pos[c]
        cross = abs(u[0] * v[1] - u[1] * v[0])
        if cross <= tol * li[k] * lj[k] and u @ v > 0:
            raise EdgeCrossing(tuple(map(int, e[i[k]])), tuple(map(int, e[j[k]])))


def isolation_radius(g: EmbeddedGraph, u: int) -> float:
    """Distance from vertex ``u`` to its nearest other vertex."""
    if g.n < 2:
        raise SingletonGraph("isolation radius needs at least two vertices")
    return float(g.isolation_radii[u])


def euclidean_ball_vertices(g: EmbeddedGraph, center, r: float) -> np.ndarray:
    """Sorted ids of vertices ``v`` with ``|v - center| <= r``."""
    c = np.asarray(center, dtype=float)
    d = np.hypot(g.pos[:, 0] - c[0], g.pos[:, 1] - c[1])
    return np.flatnonzero(d <= r)


def vertex_boundary(g: EmbeddedGraph, S) -> np.ndarray:
    """External vertex boundary: vertices outside ``S`` with a neighbour in ``S``."""
    inside = np.zeros(g.n, dtype=bool)
    inside[np.asarray(list(S) if not isinstance(S, np.ndarray) else S, dtype=np.int64)] = True
    u, v = g.edges[:, 0], g.edges[:, 1]
    out = np.zeros(g.n, dtype=bool)
    out[v[inside[u] & ~inside[v]]] = True
    out[u[inside[v] & ~inside[u]]] = True
    return np.flatnonzero(out)


def induced_edges(g: EmbeddedGraph, S) -> np.ndarray:
    """Ids of edges with both endpoints in ``S``."""
    inside = np.zeros(g.n, dtype=bool)
    inside[np.asarray(S, dtype=np.int64)] = True
    return np.flatnonzero(inside[g.edges[:, 0]] & inside[g.edges[:, 1]])


def graph_distances(g: EmbeddedGraph, sources: Sequence[int]) -> np.ndarray:
    """Combinatorial (hop) distance from the nearest of ``sources`` to every vertex."""
    from scipy.sparse.csgraph import shortest_path

    adj = coo_matrix((np.ones(g.m), (g.edges[:, 0], g.edges[:, 1])), shape=(g.n, g.n)).tocsr()
    return shortest_path(adj, directed=False, unweighted=True, indices=list(sources)).min(axis=0)
