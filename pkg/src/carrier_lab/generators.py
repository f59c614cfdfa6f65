"""Test corpora: combinatorial disc triangulations and small embedded graphs."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateConfiguration, GraphError, NotATriangulation, SizeCapExceeded
from .graph import EmbeddedGraph, build

SIZE_CAP = 200_000


@dataclass(frozen=True)
class Triangulation:
    """A combinatorial triangulation of a closed disc.

    ``triangles`` are consistently oriented (counterclockwise once embedded);
    ``boundary`` is the outer cycle. Positions are optional.
    """

    n: int
    triangles: np.ndarray
    boundary: tuple[int, ...]
    positions: np.ndarray | None = None
    _flowers: dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def is_boundary(self) -> np.ndarray:
        flag = np.zeros(self.n, dtype=bool)
        flag[list(self.boundary)] = True
        return flag

    @property
    def interior(self) -> np.ndarray:
        return np.flatnonzero(~self.is_boundary)

    def edges(self) -> list[tuple[int, int]]:
        t = self.triangles
        e = np.concatenate([t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]])
        e.sort(axis=1)
        return [tuple(map(int, x)) for x in np.unique(e, axis=0)]

    def flower(self, v: int) -> list[int]:
        """Counterclockwise neighbours of ``v``.

        Closed (first neighbour not repeated) for interior vertices; for a
        boundary vertex the open fan runs from one boundary neighbour to the other.
        """
        if not self._flowers:
            nxt: dict[int, dict[int, int]] = {}
            for a, b, c in self.triangles.tolist():
                nxt.setdefault(a, {})[b] = c
                nxt.setdefault(b, {})[c] = a
                nxt.setdefault(c, {})[a] = b
            bd = self.is_boundary
            for w, succ in nxt.items():
                if bd[w]:
                    targets = set(succ.values())
                    starts = [a for a in succ if a not in targets]
                    if len(starts) != 1:
                        raise NotATriangulation(f"vertex {w} has a broken fan")
                    cur = starts[0]
                    fl = [cur]
                    while cur in succ:
                        cur = succ[cur]
                        fl.append(cur)
                else:
                    start = min(succ)
                    fl = [start]
                    cur = succ[start]
                    while cur != start:
                        fl.append(cur)
                        cur = succ[cur]
                    if len(fl) != len(succ):
                        raise NotATriangulation(f"vertex {w} has a non-cyclic flower")
                self._flowers[w] = fl
        return self._flowers[v]

    def degree(self, v: int) -> int:
        return len(self.flower(v))

    def with_positions(self, pos) -> "Triangulation":
        return Triangulation(self.n, self.triangles, self.boundary, np.asarray(pos, dtype=float))

    def to_embedded_graph(self, weights=None) -> EmbeddedGraph:
        if self.positions is None:
            raise GraphError("triangulation has no positions")
        e = self.edges()
        w = [1.0] * len(e) if weights is None else weights
        return build(self.positions, [(u, v, x) for (u, v), x in zip(e, w)])


def validate_triangulation(t: Triangulation) -> None:
    """Raise :class:`NotATriangulation` unless ``t`` is a simple disc triangulation."""
    tri = np.asarray(t.triangles)
    if tri.ndim != 2 or tri.shape[1] != 3 or len(tri) == 0:
        raise NotATriangulation("no triangles")
    if np.any(tri[:, 0] == tri[:, 1]) or np.any(tri[:, 1] == tri[:, 2]) or np.any(tri[:, 0] == tri[:, 2]):
        raise NotATriangulation("degenerate triangle")
    directed = {}
    for a, b, c in tri.tolist():
        for x, y in ((a, b), (b, c), (c, a)):
            if (x, y) in directed:
                raise NotATriangulation(f"directed edge {(x, y)} used twice (orientation clash)")
            directed[(x, y)] = True
    free = [(x, y) for (x, y) in directed if (y, x) not in directed]
    succ = {}
    for x, y in free:
        if x in succ:
            raise NotATriangulation("boundary is not a simple cycle")
        succ[x] = y
    if not free:
        raise NotATriangulation("triangulation has no boundary")
    start = free[0][0]
    cyc = [start]
    cur = succ[start]
    while cur != start:
        cyc.append(cur)
        cur = succ.get(cur)
        if cur is None or len(cyc) > len(free):
            raise NotATriangulation("boundary is not a single cycle")
    if len(cyc) != len(free) or set(cyc) != set(t.boundary):
        raise NotATriangulation("declared boundary differs from the free edges")
    used = np.unique(tri)
    if len(used) != t.n or used[0] != 0 or used[-1] != t.n - 1:
        raise NotATriangulation("vertex ids must be 0..n-1 and all used")
    for v in range(t.n):
        t.flower(v)


def wheel(k: int) -> Triangulation:
    """Center 0 joined to a ``k``-cycle ``1..k``; ``wheel(3)`` is K4."""
    if k < 3:
        raise GraphError("a wheel needs at least 3 spokes")
    tris = np.array([(0, 1 + i, 1 + (i + 1) % k) for i in range(k)], dtype=np.int64)
    return Triangulation(k + 1, tris, tuple(range(1, k + 1)))


def generate_hyperbolic(deg: int, depth: int, cap: int = SIZE_CAP) -> Triangulation:
    """Combinatorial ball of radius ``depth`` in the degree-``deg`` triangulation.

    Built layer by layer: every vertex strictly inside the ball receives
    exactly ``deg`` neighbours. Vertex 0 is the center; ids grow outward.
    """
    if deg < 7:
        raise GraphError("deg must be at least 7")
    if depth < 1:
        raise GraphError("depth must be at least 1")
    layer = list(range(1, deg + 1))
    degree = [deg] + [3] * deg
    tris = [(0, layer[i], layer[(i + 1) % deg]) for i in range(deg)]
    n = deg + 1
    for _ in range(depth - 1):
        m = len(layer)
        need = [deg - degree[v] for v in layer]
        size = n + sum(k - 1 for k in need)
        if size > cap:
            raise SizeCapExceeded(f"depth {depth} needs more than {cap} vertices")
        # shared vertex between layer[i] and layer[i+1] is S[i]; privates precede it
        privates = []
        shared = []
        new_layer = []
        for i in range(m):
            p = list(range(n, n + need[i] - 2))
            n += len(p)
            s = n
            n += 1
            privates.append(p)
            shared.append(s)
            new_layer.extend(p)
            new_layer.append(s)
        degree.extend([0] * (n - len(degree)))
        for i in range(m):
            v = layer[i]
            fan = [shared[i - 1]] + privates[i] + [shared[i]]
            for a, b in zip(fan, fan[1:]):
                tris.append((v, a, b))
            tris.append((layer[(i + 1) % m], v, shared[i]))
            degree[v] += len(fan)
            for p in privates[i]:
                degree[p] = 3
            degree[shared[i]] = 4
        layer = new_layer
    return Triangulation(n, np.array(tris, dtype=np.int64), tuple(layer))


def tri3() -> EmbeddedGraph:
    """Equilateral unit triangle."""
    return build([(0.0, 0.0), (1.0, 0.0), (0.5, math.sqrt(3) / 2)], [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)])


def square_grid(k: int) -> EmbeddedGraph:
    """``k x k`` vertices at unit spacing, row-major ids."""
    pos = [(float(i), float(j)) for j in range(k) for i in range(k)]
    edges = []
    for j in range(k):
        for i in range(k):
            v = j * k + i
            if i + 1 < k:
                edges.append((v, v + 1, 1.0))
            if j + 1 < k:
                edges.append((v, v + k, 1.0))
    return build(pos, edges)


def triangular_lattice(radius: int, spacing: float = 1.0) -> EmbeddedGraph:
    """Hexagonal patch of the unit triangular lattice, hex-norm <= ``radius``.

    Vertex 0 is the origin; the patch is invariant under rotation by pi/3.
    """
    pts = []
    for a in range(-radius, radius + 1):
        for b in range(-radius, radius + 1):
            if max(abs(a), abs(b), abs(a + b)) <= radius:
                pts.append((max(abs(a), abs(b), abs(a + b)), a, b))
    pts.sort(key=lambda t: (t[0], math.atan2(t[2] * math.sqrt(3) / 2, t[1] + t[2] / 2)))
    index = {(a, b): i for i, (_, a, b) in enumerate(pts)}
    pos = [((a + b / 2) * spacing, b * math.sqrt(3) / 2 * spacing) for _, a, b in pts]
    edges = []
    for (a, b), i in index.items():
        for da, db in ((1, 0), (0, 1), (-1, 1)):
            j = index.get((a + da, b + db))
            if j is not None:
                edges.append((i, j, 1.0))
    return build(pos, edges)


def _disc_points(n: int, seed: int) -> np.ndarray:
    rng = np.random.Generator(np.random.Philox(seed))
    sep = 0.5 * math.sqrt(math.pi / n)
    pts: list[tuple[float, float]] = []
    attempts = 0
    while len(pts) < n:
        attempts += 1
        if attempts > 2000 * n:
            sep *= 0.9
            attempts = 0
        r = math.sqrt(rng.random())
        th = 2 * math.pi * rng.random()
        p = (r * math.cos(th), r * math.sin(th))
        if all((p[0] - q[0]) ** 2 + (p[1] - q[1]) ** 2 >= sep * sep for q in pts):
            pts.append(p)
    return np.array(pts)


def generate_delaunay(n: int, seed: int) -> EmbeddedGraph:
    """Delaunay triangulation of ``n`` well-separated points in the unit disc."""
    from scipy.spatial import Delaunay

    if n < 3:
        raise GraphError("need at least 3 points")
    pts = _disc_points(n, seed)
    if len(np.unique(pts, axis=0)) != len(pts):
        raise DegenerateConfiguration("duplicate sample points")
    tri = Delaunay(pts)
    e = np.concatenate([tri.simplices[:, [0, 1]], tri.simplices[:, [1, 2]], tri.simplices[:, [2, 0]]])
    e.sort(axis=1)
    e = np.unique(e, axis=0)
    return build(pts, [(int(u), int(v), 1.0) for u, v in e])
