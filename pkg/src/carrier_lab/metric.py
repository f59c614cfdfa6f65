"""The cable space: union of edge segments with path metric and edge-weighted length measure.

A point of the cable space is a :class:`CablePoint` ``(edge, t)`` with
``t in [0, 1]`` measured from the lower-id endpoint. The measure weights
arclength on edge ``e`` by ``|e|``, so a whole edge has measure ``|e|**2``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import dijkstra

from .errors import ArcMissesGraph, BallEscapesCarrier, EigenSolverFailure
from .graph import EmbeddedGraph, _point_in_polygon


@dataclass(frozen=True)
class CablePoint:
    edge: int
    t: float

    def xy(self, g: EmbeddedGraph) -> np.ndarray:
        a, b = g.edges[self.edge]
        return g.pos[a] + self.t * (g.pos[b] - g.pos[a])


def at_vertex(g: EmbeddedGraph, v: int) -> CablePoint:
    e = int(g.incident_edges(v)[0])
    return CablePoint(e, 0.0 if g.edges[e, 0] == v else 1.0)


def vertex_of(g: EmbeddedGraph, x: CablePoint) -> int | None:
    if x.t == 0.0:
        return int(g.edges[x.edge, 0])
    if x.t == 1.0:
        return int(g.edges[x.edge, 1])
    return None


@dataclass
class CableBall:
    pieces: list = field(default_factory=list)  # (edge, lo, hi) in parameter units
    measure: float = 0.0

    def vertices(self, g: EmbeddedGraph) -> np.ndarray:
        out = set()
        for e, lo, hi in self.pieces:
            if lo == 0.0:
                out.add(int(g.edges[e, 0]))
            if hi == 1.0:
                out.add(int(g.edges[e, 1]))
        return np.array(sorted(out), dtype=np.int64)


@dataclass
class CurveReport:
    polyline: list
    L: float
    C_len: float
    c_depth: float
    C_euc: float
    points: np.ndarray = field(repr=False, default=None)


# -- distances -------------------------------------------------------------

def _length_matrix(g: EmbeddedGraph):
    cached = g._cache.get("length_csr")
    if cached is None:
        L = g.edge_lengths
        cached = sp.coo_matrix((np.concatenate([L, L]),
                                (np.concatenate([g.edges[:, 0], g.edges[:, 1]]),
                                 np.concatenate([g.edges[:, 1], g.edges[:, 0]]))),
                               shape=(g.n, g.n)).tocsr()
        g._cache["length_csr"] = cached
    return cached


def vertex_distances(g: EmbeddedGraph, sources) -> np.ndarray:
    """Shortest path lengths along edges from each source vertex."""
    return dijkstra(_length_matrix(g), directed=False, indices=np.atleast_1d(sources))


def all_pairs(g: EmbeddedGraph) -> np.ndarray:
    cached = g._cache.get("apsp")
    if cached is None:
        cached = dijkstra(_length_matrix(g), directed=False)
        g._cache["apsp"] = cached
    return cached


def distances_from(g: EmbeddedGraph, x: CablePoint) -> np.ndarray:
    """d0 from ``x`` to every vertex."""
    a, b = g.edges[x.edge]
    L = g.edge_lengths[x.edge]
    D = vertex_distances(g, [a, b])
    return np.minimum(x.t * L + D[0], (1 - x.t) * L + D[1])


def d0(g: EmbeddedGraph, x: CablePoint, y: CablePoint) -> float:
    """Shortest-path distance in the cable space."""
    dx = distances_from(g, x)
    c, d = g.edges[y.edge]
    L = g.edge_lengths[y.edge]
    best = min(dx[c] + y.t * L, dx[d] + (1 - y.t) * L)
    if x.edge == y.edge:
        best = min(best, abs(x.t - y.t) * L)
    return float(best)


def d0_pairs(g: EmbeddedGraph, ex, tx, ey, ty) -> np.ndarray:
    """Vectorised d0 for many pairs using the all-pairs vertex table."""
    D = all_pairs(g)
    ex, ey = np.asarray(ex), np.asarray(ey)
    tx, ty = np.asarray(tx, dtype=float), np.asarray(ty, dtype=float)
    Lx, Ly = g.edge_lengths[ex], g.edge_lengths[ey]
    a, b = g.edges[ex, 0], g.edges[ex, 1]
    c, d = g.edges[ey, 0], g.edges[ey, 1]
    xa, xb = tx * Lx, (1 - tx) * Lx
    yc, yd = ty * Ly, (1 - ty) * Ly
    best = np.minimum.reduce([xa + D[a, c] + yc, xa + D[a, d] + yd, xb + D[b, c] + yc, xb + D[b, d] + yd])
    same = ex == ey
    best[same] = np.minimum(best[same], np.abs(tx - ty)[same] * Lx[same])
    return best


def _points_xy(g, e, t):
    a, b = g.pos[g.edges[e, 0]], g.pos[g.edges[e, 1]]
    return a + np.asarray(t)[:, None] * (b - a)


def sample_points(g: EmbeddedGraph, k: int, rng) -> tuple[np.ndarray, np.ndarray]:
    """``k`` points uniform with respect to arclength."""
    p = g.edge_lengths / g.edge_lengths.sum()
    e = rng.choice(g.m, size=k, p=p)
    return e, rng.random(k)


def bilipschitz_constant(g: EmbeddedGraph, samples: int, seed: int) -> float:
    """Largest sampled ``d0(x,y)/|x-y|``.

    Half of the pairs are drawn on the boundary of a common bounded face (where
    the ratio is largest), half uniformly over the whole cable space.
    """
    rng = np.random.Generator(np.random.Philox(seed))
    k_face = samples // 2
    k_glob = samples - k_face
    faces = g.bounded_faces
    cyc_edges = []
    for f in faces:
        cyc = f.boundary
        cyc_edges.append([g.edge_id(cyc[i], cyc[(i + 1) % len(cyc)]) for i in range(len(cyc))])
    fi = rng.integers(0, len(faces), size=k_face)
    ex = np.array([cyc_edges[i][rng.integers(0, len(cyc_edges[i]))] for i in fi], dtype=np.int64)
    ey = np.array([cyc_edges[i][rng.integers(0, len(cyc_edges[i]))] for i in fi], dtype=np.int64)
    tx, ty = rng.random(k_face), rng.random(k_face)
    gx, gtx = sample_points(g, k_glob, rng)
    gy, gty = sample_points(g, k_glob, rng)
    ex, ey = np.concatenate([ex, gx]), np.concatenate([ey, gy])
    tx, ty = np.concatenate([tx, gtx]), np.concatenate([ty, gty])
    dist = d0_pairs(g, ex, tx, ey, ty)
    eu = np.hypot(*(_points_xy(g, ex, tx) - _points_xy(g, ey, ty)).T)
    ok = eu > 1e-12 * g.edge_lengths.max()
    return float(np.max(dist[ok] / eu[ok]))


# -- balls -------------------------------------------------------------------

def _merge(intervals):
    intervals = sorted((max(0.0, lo), min(1.0, hi)) for lo, hi in intervals if hi >= lo)
    out = []
    for lo, hi in intervals:
        if lo > hi:
            continue
        if out and lo <= out[-1][1]:
            out[-1] = (out[-1][0], max(out[-1][1], hi))
        else:
            out.append((lo, hi))
    return out


def ball_pieces(g: EmbeddedGraph, x: CablePoint, r: float, dx=None):
    if dx is None:
        dx = distances_from(g, x)
    L = g.edge_lengths
    a, b = g.edges[:, 0], g.edges[:, 1]
    ra = (r - dx[a]) / L
    rb = (r - dx[b]) / L
    cand = np.flatnonzero((ra >= 0) | (rb >= 0) | (np.arange(g.m) == x.edge))
    pieces = []
    for e in cand:
        iv = []
        if ra[e] >= 0:
            iv.append((0.0, ra[e]))
        if rb[e] >= 0:
            iv.append((1.0 - rb[e], 1.0))
        if e == x.edge:
            iv.append((x.t - r / L[e], x.t + r / L[e]))
        for lo, hi in _merge(iv):
            if hi > lo:
                pieces.append((int(e), float(lo), float(hi)))
    return pieces


def measure(g: EmbeddedGraph, pieces) -> float:
    return float(sum(g.edge_lengths[e] ** 2 * (hi - lo) for e, lo, hi in pieces))


def ball_d0(g: EmbeddedGraph, x: CablePoint, r: float) -> CableBall:
    """The closed d0-ball ``{y : d0(x, y) <= r}``."""
    pieces = ball_pieces(g, x, r)
    return CableBall(pieces, measure(g, pieces))


def _check_carrier(g, x, r):
    if not g.carrier_contains_disc(x.xy(g), r):
        raise BallEscapesCarrier(f"Euclidean ball of radius {r:g} leaves the carrier")


def doubling_ratio(g: EmbeddedGraph, x: CablePoint, r: float, check: bool = True) -> float:
    """``m(B(x, 2r)) / m(B(x, r))``."""
    if check:
        _check_carrier(g, x, 2 * r)
    dx = distances_from(g, x)
    return measure(g, ball_pieces(g, x, 2 * r, dx)) / measure(g, ball_pieces(g, x, r, dx))


def extended_isolation(g: EmbeddedGraph, x: CablePoint) -> float:
    """Isolation radius at a vertex, edge length elsewhere."""
    v = vertex_of(g, x)
    return float(g.isolation_radii[v]) if v is not None else float(g.edge_lengths[x.edge])


# -- cones -------------------------------------------------------------------

def _in_arc(theta, lo, width):
    return np.mod(theta - lo, 2 * np.pi) <= width + 1e-12


def cone(g: EmbeddedGraph, u: int, r: float, interval, r_min: float = 0.0) -> CableBall:
    """Points of the cable space with ``r_min <= |y-u| <= r`` and ``arg(y-u)`` in ``interval``.

    ``interval`` is ``(start, width)`` in radians, counterclockwise from ``start``.
    """
    lo, width = float(interval[0]), float(interval[1])
    full = width >= 2 * np.pi
    c = g.pos[u]
    A = g.pos[g.edges[:, 0]] - c
    Dd = g.pos[g.edges[:, 1]] - g.pos[g.edges[:, 0]]
    from .graph import segment_distance

    near = segment_distance(g.pos[g.edges[:, 0]], g.pos[g.edges[:, 1]],
                            np.broadcast_to(c, A.shape), np.broadcast_to(c, A.shape)) <= r
    rays = [] if full else [np.array([math.cos(lo), math.sin(lo)]),
                            np.array([math.cos(lo + width), math.sin(lo + width)])]
    pieces = []
    for e in np.flatnonzero(near):
        a, d = A[e], Dd[e]
        dd = d @ d
        ad = a @ d

        def disc(rad):
            disc_ = ad * ad - dd * (a @ a - rad * rad)
            if disc_ < 0:
                return None
            sq = math.sqrt(disc_)
            return ((-ad - sq) / dd, (-ad + sq) / dd)

        outer = disc(r)
        if outer is None:
            continue
        ivs = [(max(0.0, outer[0]), min(1.0, outer[1]))]
        if r_min > 0:
            inner = disc(r_min)
            if inner is not None:
                new = []
                for s0, s1 in ivs:
                    new += [(s0, min(s1, inner[0])), (max(s0, inner[1]), s1)]
                ivs = new
        ivs = [(s0, s1) for s0, s1 in ivs if s1 > s0]
        if not ivs:
            continue
        if not full:
            cuts = []
            for ray in rays:
                den = ray[0] * d[1] - ray[1] * d[0]
                if abs(den) > 1e-300:
                    s = -(ray[0] * a[1] - ray[1] * a[0]) / den
                    cuts.append(s)
            # the segment may pass through the apex; the angle flips there
            if dd > 0:
                s_apex = -ad / dd
                cuts.append(s_apex)
            split = []
            for s0, s1 in ivs:
                pts = sorted({s0, s1, *[s for s in cuts if s0 < s < s1]})
                for p0, p1 in zip(pts, pts[1:]):
                    mid = 0.5 * (p0 + p1)
                    q = a + mid * d
                    if _in_arc(math.atan2(q[1], q[0]), lo, width):
                        split.append((p0, p1))
            ivs = split
        for s0, s1 in _merge(ivs):
            if s1 > s0:
                pieces.append((int(e), float(s0), float(s1)))
    return CableBall(pieces, measure(g, pieces))


# -- Poincare ---------------------------------------------------------------

def _discretize(g, big, small, h):
    """P1 nodes and elements over the big-ball pieces, refined at small-ball ends."""
    small_by_edge: dict[int, list] = {}
    for e, lo, hi in small:
        small_by_edge.setdefault(e, []).append((lo, hi))
    node_of_vertex: dict[int, int] = {}
    n_nodes = 0
    elems = []  # (i, j, edge_length, plane_length, in_small)

    def node(e, s):
        nonlocal n_nodes
        if s == 0.0 or s == 1.0:
            v = int(g.edges[e, 0 if s == 0.0 else 1])
            if v not in node_of_vertex:
                node_of_vertex[v] = n_nodes
                n_nodes += 1
            return node_of_vertex[v]
        n_nodes += 1
        return n_nodes - 1

    for e, lo, hi in big:
        L = g.edge_lengths[e]
        brk = {lo, hi}
        for a, b in small_by_edge.get(e, []):
            for s in (a, b):
                if lo < s < hi:
                    brk.add(s)
        brk = sorted(brk)
        pts = []
        for s0, s1 in zip(brk, brk[1:]):
            k = max(1, int(math.ceil((s1 - s0) * L / h - 1e-9)))
            pts.extend(s0 + (s1 - s0) * np.arange(k) / k)
        pts.append(brk[-1])
        ids = [node(e, float(s)) for s in pts]
        for (s0, i), (s1, j) in zip(zip(pts, ids), zip(pts[1:], ids[1:])):
            mid = 0.5 * (s0 + s1)
            inside = any(a <= mid <= b for a, b in small_by_edge.get(e, []))
            elems.append((i, j, L, (s1 - s0) * L, inside))
    return n_nodes, elems


def poincare_constant(g: EmbeddedGraph, x0: CablePoint, r: float, blowup: float = 4.0,
                      h: float | None = None, cap: int = 200_000, check: bool = True) -> float:
    """Best ``kappa`` with ``int_{B(r)} |f - mean|^2 dm <= kappa r^2 int_{B(blowup r)} |f'|^2 dm``.

    Computed as the top generalised eigenvalue of the variance form on the
    small ball against the energy form on the big ball, over P1 functions.
    """
    if check:
        _check_carrier(g, x0, blowup * r)
    dx = distances_from(g, x0)
    big = ball_pieces(g, x0, blowup * r, dx)
    small = ball_pieces(g, x0, r, dx)
    if h is None:
        h = min(g.edge_lengths[e] for e, _, _ in big) / 8
    total = sum((hi - lo) * g.edge_lengths[e] for e, lo, hi in big)
    h = max(h, total / cap)
    n, elems = _discretize(g, big, small, h)
    el = np.array(elems, dtype=float)
    i, j = el[:, 0].astype(np.int64), el[:, 1].astype(np.int64)
    L, ell, ins = el[:, 2], el[:, 3], el[:, 4].astype(bool)
    k = L / ell
    K = sp.coo_matrix((np.concatenate([k, k, -k, -k]), (np.concatenate([i, j, i, j]), np.concatenate([i, j, j, i]))),
                      shape=(n, n)).tocsr()
    mw = (L * ell / 6)[ins]
    ii, jj = i[ins], j[ins]
    M = sp.coo_matrix((np.concatenate([2 * mw, 2 * mw, mw, mw]),
                       (np.concatenate([ii, jj, ii, jj]), np.concatenate([ii, jj, jj, ii]))),
                      shape=(n, n)).tocsr()
    w = np.asarray(M.sum(axis=1)).ravel()
    mass = w.sum()
    keep = np.arange(1, n)  # pin node 0: both forms ignore constants
    Kr = K[keep][:, keep]
    Mr = M[keep][:, keep]
    wr = w[keep]
    try:
        if n <= 2500:
            from scipy.linalg import eigh

            N = Mr.toarray() - np.outer(wr, wr) / mass
            lam = eigh(N, Kr.toarray(), eigvals_only=True, subset_by_index=[n - 2, n - 2])[0]
        else:
            from scipy.sparse.linalg import LinearOperator, eigsh, splu

            lu = splu(Kr.tocsc())
            op = LinearOperator(Kr.shape, matvec=lambda v: Mr @ v - wr * (wr @ v) / mass, dtype=float)
            minv = LinearOperator(Kr.shape, matvec=lu.solve, dtype=float)
            lam = eigsh(op, k=1, M=Kr.tocsc(), Minv=minv, which="LA", return_eigenvectors=False)[0]
    except Exception as exc:  # LinAlgError, ArpackNoConvergence
        raise EigenSolverFailure(str(exc)) from exc
    return float(lam) / r ** 2


# -- inner uniform curve -------------------------------------------------------

def _boundary_distance_field(g: EmbeddedGraph) -> np.ndarray:
    """d0 from each vertex to the unit circle, exiting through an outer vertex."""
    bv = g.boundary_vertices
    n = g.n
    A = _length_matrix(g).tocoo()
    off = np.maximum(1.0 - np.hypot(*g.pos[bv].T), 0.0) + 1e-300
    rows = np.concatenate([A.row, np.full(len(bv), n), bv])
    cols = np.concatenate([A.col, bv, np.full(len(bv), n)])
    vals = np.concatenate([A.data, off, off])
    M = sp.coo_matrix((vals, (rows, cols)), shape=(n + 1, n + 1)).tocsr()
    return dijkstra(M, directed=False, indices=n)[:n]


def _arc_geometry(a: float, b: float):
    """Circle orthogonal to the unit circle through ``e^{ia}`` and ``e^{ib}``."""
    half = 0.5 * (b - a)
    if abs(math.cos(half)) < 1e-12:
        return None, None
    c = complex(math.cos((a + b) / 2), math.sin((a + b) / 2)) / math.cos(half)
    return c, abs(math.tan(half))


def _face_locator(g):
    faces = g.bounded_faces
    polys = [g.pos[list(f.boundary)] for f in faces]
    lo = np.array([p.min(0) for p in polys])
    hi = np.array([p.max(0) for p in polys])

    def locate(pt):
        cand = np.flatnonzero(np.all((lo <= pt) & (pt <= hi), axis=1))
        for k in cand:
            if _point_in_polygon(pt, polys[k]):
                return faces[k]
        return None

    return locate


def inner_uniform_curve(g: EmbeddedGraph, xi1: float, xi2: float, per_segment: int = 8) -> CurveReport:
    """Trace the circle orthogonal to the unit circle through two boundary angles.

    Consecutive crossings of the arc with the cable space are joined along the
    shorter way round their common face (by a d0 geodesic if the arc leaves the
    carrier between them).
    """
    p1 = complex(math.cos(xi1), math.sin(xi1))
    p2 = complex(math.cos(xi2), math.sin(xi2))
    if abs(p1 - p2) < 1e-12:
        raise ArcMissesGraph("boundary points coincide")
    c, R = _arc_geometry(xi1, xi2)
    A = g.pos[g.edges[:, 0]]
    B = g.pos[g.edges[:, 1]]
    hits = []
    for e in range(g.m):
        a = complex(*A[e])
        d = complex(*B[e]) - a
        if c is None:
            # straight diameter through p1 and p2
            u = p2 - p1
            den = (u.conjugate() * d).imag
            if abs(den) < 1e-300:
                continue
            s = -((u.conjugate() * (a - p1)).imag) / den
            roots = [s]
        else:
            f = a - c
            qa = abs(d) ** 2
            qb = 2 * (f.conjugate() * d).real
            qc = abs(f) ** 2 - R * R
            disc = qb * qb - 4 * qa * qc
            if disc < 0:
                continue
            sq = math.sqrt(disc)
            roots = [(-qb - sq) / (2 * qa), (-qb + sq) / (2 * qa)]
        for s in roots:
            if -1e-12 <= s <= 1 + 1e-12:
                s = min(max(s, 0.0), 1.0)
                z = a + s * d
                if abs(z) < 1:
                    hits.append((abs(z - p1), e, s, z))
    if len(hits) < 2:
        raise ArcMissesGraph("the orthogonal arc meets the graph in fewer than two points")
    hits.sort(key=lambda h: h[0])
    pts = [hits[0]]
    tol = 1e-12 * max(1.0, float(g.edge_lengths.max()))
    for hit in hits[1:]:
        if abs(hit[3] - pts[-1][3]) > tol:
            pts.append(hit)
    locate = _face_locator(g)
    poly: list[CablePoint] = [CablePoint(pts[0][1], pts[0][2])]

    def arc_mid(z0, z1):
        if c is None:
            return 0.5 * (z0 + z1)
        w = (z0 - c) + (z1 - c)
        return c + R * w / abs(w) if abs(w) > 0 else 0.5 * (z0 + z1)

    for (_, e0, s0, z0), (_, e1, s1, z1) in zip(pts, pts[1:]):
        x, y = CablePoint(e0, s0), CablePoint(e1, s1)
        if e0 == e1:
            poly.append(y)
            continue
        mid = arc_mid(z0, z1)
        face = locate(np.array([mid.real, mid.imag]))
        route = _face_route(g, face, x, y) if face is not None else None
        if route is None:
            route = _geodesic(g, x, y)
        poly.extend(route[1:])
    P = np.array([q.xy(g) for q in poly])
    seg = np.hypot(*np.diff(P, axis=0).T)
    L = float(seg.sum())
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    field_ = _boundary_distance_field(g)

    def to_boundary(q: CablePoint):
        a, b = g.edges[q.edge]
        le = g.edge_lengths[q.edge]
        return min(q.t * le + field_[a], (1 - q.t) * le + field_[b])

    depth = math.inf
    for k in range(len(poly) - 1):
        qa, qb = poly[k], poly[k + 1]
        for frac in np.linspace(0, 1, per_segment + 1):
            tpos = cum[k] + frac * seg[k]
            if tpos <= 0 or tpos >= L:
                continue
            q = _interp(g, qa, qb, frac)
            depth = min(depth, to_boundary(q) / min(tpos, L - tpos))
    endpoint_d0 = d0(g, poly[0], poly[-1])
    return CurveReport(polyline=poly, L=L, C_len=L / endpoint_d0 if endpoint_d0 > 0 else math.inf,
                       c_depth=depth, C_euc=L / abs(p1 - p2), points=P)


def _interp(g, qa: CablePoint, qb: CablePoint, frac: float) -> CablePoint:
    if qa.edge == qb.edge:
        return CablePoint(qa.edge, qa.t + frac * (qb.t - qa.t))
    va, vb = vertex_of(g, qa), vertex_of(g, qb)
    # consecutive polyline points share an edge through a common vertex
    for e in (qa.edge, qb.edge):
        a, b = g.edges[e]
        ends = {int(a), int(b)}
        pa = qa if qa.edge == e else (CablePoint(e, 0.0 if va == a else 1.0) if va in ends else None)
        pb = qb if qb.edge == e else (CablePoint(e, 0.0 if vb == a else 1.0) if vb in ends else None)
        if pa is not None and pb is not None:
            return CablePoint(e, pa.t + frac * (pb.t - pa.t))
    return qa if frac < 0.5 else qb


def _face_route(g, face, x: CablePoint, y: CablePoint):
    cyc = list(face.boundary)
    k = len(cyc)
    eids = [g.edge_id(cyc[i], cyc[(i + 1) % k]) for i in range(k)]
    if x.edge not in eids or y.edge not in eids:
        return None
    lens = g.edge_lengths[eids]
    cum = np.concatenate([[0.0], np.cumsum(lens)])
    per = cum[-1]

    def pos(q):
        i = eids.index(q.edge)
        frac = q.t if g.edges[q.edge, 0] == cyc[i] else 1 - q.t
        return i, cum[i] + frac * lens[i]

    ix, px = pos(x)
    iy, py = pos(y)
    fwd = (py - px) % per
    out = [x]
    if fwd <= per - fwd:
        i = ix
        while i != iy:
            i = (i + 1) % k
            out.append(_vertex_point(g, cyc[i]))
    else:
        i = ix
        while i != iy:
            out.append(_vertex_point(g, cyc[i]))
            i = (i - 1) % k
    out.append(y)
    return out


def _vertex_point(g, v):
    return at_vertex(g, v)


def _geodesic(g, x: CablePoint, y: CablePoint):
    """Cable points along a d0-shortest path from ``x`` to ``y``."""
    from scipy.sparse.csgraph import dijkstra as dj

    a, b = g.edges[x.edge]
    c, d = g.edges[y.edge]
    if x.edge == y.edge:
        return [x, y]
    D, pred = dj(_length_matrix(g), directed=False, indices=[a, b], return_predecessors=True)
    Lx, Ly = g.edge_lengths[x.edge], g.edge_lengths[y.edge]
    opts = []
    for k, (s, off) in enumerate(((a, x.t * Lx), (b, (1 - x.t) * Lx))):
        for t_, off2 in ((c, y.t * Ly), (d, (1 - y.t) * Ly)):
            opts.append((off + D[k, t_] + off2, k, t_))
    _, k, tgt = min(opts)
    path = [int(tgt)]
    while path[-1] != (a if k == 0 else b):
        path.append(int(pred[k, path[-1]]))
    path.reverse()
    return [x] + [_vertex_point(g, v) for v in path] + [y]
