"""(D, eta)-goodness checks and the geometric constants of a good embedding."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .graph import EmbeddedGraph, segment_distance

ANGLE_TOL = 1e-9
RATIO_TOL = 1e-12


@dataclass
class GoodnessReport:
    D_required: float
    eta_allowed: float
    min_adjacent_angle: float
    sausage_constant: float
    face_diameter_constant: float
    edge_area_constant: float
    violations: list = field(default_factory=list)
    D: float | None = None
    eta: float | None = None

    @property
    def passed(self) -> bool:
        return not self.violations

    @property
    def noacute_bound(self) -> float:
        """``D_required**-1 * sin(eta_allowed / 2)``."""
        return math.sin(self.eta_allowed / 2) / self.D_required

    def to_dict(self) -> dict:
        d = asdict(self)
        d["violations"] = [[k, list(w)] for k, w in self.violations]
        d["passed"] = self.passed
        return d


def corner_angles(g: EmbeddedGraph, faces=None):
    """Inner angles of bounded faces as ``(face_index, vertex, angle)`` arrays."""
    fi, vs, angs = [], [], []
    for k, f in enumerate(g.faces if faces is None else faces):
        if not f.bounded:
            continue
        cyc = np.asarray(f.boundary)
        p = g.pos[cyc]
        a = np.roll(p, -1, axis=0) - p
        b = np.roll(p, 1, axis=0) - p
        cross = a[:, 0] * b[:, 1] - a[:, 1] * b[:, 0]
        dot = (a * b).sum(1)
        ang = np.mod(np.arctan2(cross, dot), 2 * np.pi)
        fi.append(np.full(len(cyc), k))
        vs.append(cyc)
        angs.append(ang)
    if not fi:
        return np.zeros(0, int), np.zeros(0, int), np.zeros(0)
    return np.concatenate(fi), np.concatenate(vs), np.concatenate(angs)


def vertex_length_ratios(g: EmbeddedGraph) -> np.ndarray:
    """Per-vertex max/min incident edge length (1 for degree <= 1)."""
    L = g.edge_lengths[g.adj_edge]
    hi = np.maximum.reduceat(L, g.adj_ptr[:-1]) if len(L) else np.ones(g.n)
    lo = np.minimum.reduceat(L, g.adj_ptr[:-1]) if len(L) else np.ones(g.n)
    r = hi / lo
    r[g.degree == 0] = 1.0
    return r


def tightest_parameters(g: EmbeddedGraph, vertices=None) -> tuple[float, float]:
    """Smallest admissible ``D`` and largest admissible ``eta``.

    With ``vertices`` given, ``D`` is taken over those vertices and ``eta`` over
    bounded faces whose corners all lie in the set.
    """
    ratios = vertex_length_ratios(g)
    fi, vs, ang = corner_angles(g)
    if vertices is not None:
        sel = np.zeros(g.n, dtype=bool)
        sel[np.asarray(vertices, dtype=np.int64)] = True
        ratios = ratios[sel]
        inside = np.ones(len(g.faces), dtype=bool)
        np.logical_and.at(inside, fi, sel[vs])
        ang = ang[inside[fi]]
    D = float(ratios.max()) if len(ratios) else 1.0
    eta = math.pi - float(ang.max()) if len(ang) else math.pi
    return D, eta


def min_adjacent_angle(g: EmbeddedGraph) -> float:
    """Smallest angle between rotation-consecutive edges, outer face excluded."""
    _, _, ang = corner_angles(g)
    return float(ang.min()) if len(ang) else math.pi


def _nonadjacent(g, i, j):
    a, b = g.edges[i], g.edges[j]
    share = (a[:, 0] == b[:, 0]) | (a[:, 0] == b[:, 1]) | (a[:, 1] == b[:, 0]) | (a[:, 1] == b[:, 1])
    return ~share


def _pair_ratios(g, i, j):
    p = g.pos
    e = g.edges
    d = segment_distance(p[e[i, 0]], p[e[i, 1]], p[e[j, 0]], p[e[j, 1]])
    return d / np.minimum(g.edge_lengths[i], g.edge_lengths[j])


def sausage_constant_bruteforce(g: EmbeddedGraph, chunk: int = 200_000) -> float:
    """All-pairs reference for :func:`sausage_constant`."""
    i, j = np.triu_indices(g.m, k=1)
    best = math.inf
    for s in range(0, len(i), chunk):
        ii, jj = i[s:s + chunk], j[s:s + chunk]
        keep = _nonadjacent(g, ii, jj)
        if keep.any():
            best = min(best, float(_pair_ratios(g, ii[keep], jj[keep]).min()))
    return best


def sausage_constant(g: EmbeddedGraph) -> float:
    """``min d(e,f) / min(|e|,|f|)`` over non-adjacent edge pairs (``inf`` if none).

    A pair with ratio <= 1 has ``f`` within ``|e|`` of ``e``, so a box query of
    that size finds the minimiser whenever it is <= 1; otherwise fall back to
    all pairs.
    """
    import shapely

    if g.m < 2:
        return math.inf
    a, b = g.pos[g.edges[:, 0]], g.pos[g.edges[:, 1]]
    L = g.edge_lengths
    lines = shapely.linestrings(np.stack([a, b], axis=1))
    lo = np.minimum(a, b) - L[:, None]
    hi = np.maximum(a, b) + L[:, None]
    boxes = shapely.box(lo[:, 0], lo[:, 1], hi[:, 0], hi[:, 1])
    i, j = shapely.STRtree(lines).query(boxes)
    keep = (i < j)
    # the query is asymmetric (box of i vs line of j); keep both orientations
    ii = np.concatenate([i[keep], j[i > j]])
    jj = np.concatenate([j[keep], i[i > j]])
    na = _nonadjacent(g, ii, jj)
    best = float(_pair_ratios(g, ii[na], jj[na]).min()) if na.any() else math.inf
    if best <= 1.0:
        return best
    return sausage_constant_bruteforce(g)


def face_diameter_constant(g: EmbeddedGraph) -> tuple[float, float]:
    """``(max diam(f)/|e|, max |e|^2/area(f))`` over bounded faces and their edges."""
    dr, ar = 0.0, 0.0
    for f in g.bounded_faces:
        cyc = np.asarray(f.boundary)
        p = g.pos[cyc]
        el = np.hypot(*(np.roll(p, -1, axis=0) - p).T)
        dr = max(dr, f.diameter / el.min())
        ar = max(ar, float(el.max() ** 2 / f.area))
    return dr, ar


def validate(g: EmbeddedGraph, D: float, eta: float) -> GoodnessReport:
    """Check conditions (a) and (b); violations are returned, never raised."""
    violations = []
    fi, vs, ang = corner_angles(g)
    for k in np.flatnonzero(ang > math.pi - eta + ANGLE_TOL):
        violations.append(("angle", (int(fi[k]), int(vs[k]), float(ang[k]))))
    for u in range(g.n):
        es = g.incident_edges(u)
        if len(es) < 2:
            continue
        L = g.edge_lengths[es]
        r = L.max() / L.min()
        if r > D * (1 + RATIO_TOL):
            nb = g.neighbors(u)
            violations.append(("ratio", (u, int(nb[np.argmax(L)]), int(nb[np.argmin(L)]), float(r))))
    D_req, eta_all = tightest_parameters(g)
    fd, fa = face_diameter_constant(g)
    return GoodnessReport(
        D_required=D_req,
        eta_allowed=eta_all,
        min_adjacent_angle=min_adjacent_angle(g),
        sausage_constant=sausage_constant(g),
        face_diameter_constant=fd,
        edge_area_constant=fa,
        violations=violations,
        D=D,
        eta=eta,
    )


def validate_tightest(g: EmbeddedGraph) -> GoodnessReport:
    D, eta = tightest_parameters(g)
    return validate(g, D, eta)
