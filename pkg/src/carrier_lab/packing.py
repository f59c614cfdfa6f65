"""Maximal circle packings of disc triangulations in the unit disc.

Radii are solved in hyperbolic geometry with boundary circles fixed as
horocycles, then laid out in the Poincare disc and converted to Euclidean
circles. Internally hyperbolic radii are carried as ``s = exp(-h)`` so a
horocycle is simply ``s = 0``.
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import spsolve

from . import _kernels
from .errors import MaxIterationsExceeded, NoInteriorVertex, NotATriangulation, PackingError
from .generators import Triangulation, validate_triangulation
from .graph import EmbeddedGraph, build

TWO_PI = 2 * math.pi


@dataclass
class PackingResult:
    radius: np.ndarray
    center: np.ndarray
    is_boundary: np.ndarray
    iterations: int
    angle_residual: float
    tangency_residual: float
    hyperbolic_radius: np.ndarray = field(repr=False)
    layout_residual: float = 0.0
    boundary_residual: float = 0.0
    root: int = 0
    axis: int = 0

    @property
    def n(self) -> int:
        return len(self.radius)


# -- angle sums -----------------------------------------------------------

def euclidean_angle(r0, r1, r2):
    """Angle at circle 0 in the triangle of centers of three tangent circles."""
    q = r1 * r2 / ((r0 + r1) * (r0 + r2))
    return 2.0 * np.arcsin(np.sqrt(np.clip(q, 0.0, 1.0)))


def hyperbolic_angle(h0, h1, h2):
    """Same, for hyperbolic radii (``inf`` marks a horocycle)."""
    s = [np.exp(-np.asarray(h, dtype=float)) for h in (h0, h1, h2)]
    return _kernels.tri_angle_np(*s)


def angle_sum(t: Triangulation, radii, v: int, geometry: str = "euclidean") -> float:
    """Sum of the angles at ``v`` over its incident triangles."""
    fl = t.flower(v)
    if t.is_boundary[v]:
        pairs = list(zip(fl, fl[1:]))
    else:
        pairs = list(zip(fl, fl[1:] + fl[:1]))
    r = np.asarray(radii, dtype=float)
    f = euclidean_angle if geometry == "euclidean" else hyperbolic_angle
    return float(sum(f(r[v], r[a], r[b]) for a, b in pairs))


# -- radius solve ---------------------------------------------------------

def _newton_system(s, tri, interior_index, n_int):
    """Angle-sum residual and its Jacobian in the hyperbolic radii ``h``."""
    rows, cols, vals = [], [], []
    theta = np.zeros(len(s))
    for a, b, c in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
        i0, i1, i2 = tri[:, a], tri[:, b], tri[:, c]
        s0, s1, s2 = s[i0], s[i1], s[i2]
        A, B, C = s0 * s0, s1 * s1, s2 * s2
        q = np.clip(A * (1 - B) * (1 - C) / ((1 - A * B) * (1 - A * C)), 0.0, 1.0)
        ang = 2 * np.arcsin(np.sqrt(q))
        np.add.at(theta, i0, ang)
        g = np.sqrt(q / np.maximum(1 - q, 1e-300))
        d0 = -g * (2 + 2 * A * B / (1 - A * B) + 2 * A * C / (1 - A * C))
        d1 = g * 2 * B * (1 / (1 - B) - A / (1 - A * B))
        d2 = g * 2 * C * (1 / (1 - C) - A / (1 - A * C))
        r = interior_index[i0]
        for idx, d in ((i0, d0), (i1, d1), (i2, d2)):
            col = interior_index[idx]
            ok = (r >= 0) & (col >= 0)
            rows.append(r[ok])
            cols.append(col[ok])
            vals.append(d[ok])
    J = sp.coo_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                      shape=(n_int, n_int)).tocsc()
    return theta, J


def _solve_radii(t: Triangulation, tol: float, max_sweeps: int):
    tri = np.asarray(t.triangles, dtype=np.int64)
    n = t.n
    interior = t.interior
    k_deg = np.array([t.degree(v) for v in interior], dtype=float)
    target = np.sin(np.pi / k_deg)
    s = np.zeros(n)
    s[interior] = 0.5
    # uniform-neighbour sweeps get close; Newton finishes quadratically
    s, sweeps, res = _kernels.unm_sweeps(s, tri, interior, k_deg, target, min(max_sweeps, 20000), 1e-3)
    iterations = sweeps
    index = -np.ones(n, dtype=np.int64)
    index[interior] = np.arange(len(interior))
    goal = min(tol, 1e-12)
    best_s, best_res = s.copy(), res
    for _ in range(60):
        theta, J = _newton_system(s, tri, index, len(interior))
        F = theta[interior] - TWO_PI
        res = float(np.abs(F).max())
        if res < best_res:
            best_s, best_res = s.copy(), res
        if res <= goal:
            break
        h = -np.log(s[interior])
        try:
            step = spsolve(J, F)
        except Exception:  # singular Jacobian; fall back to sweeps
            break
        if not np.all(np.isfinite(step)):
            break
        lam = 1.0
        improved = False
        while lam > 1e-4:
            h_new = np.maximum(h - lam * step, 1e-12)
            s_try = s.copy()
            s_try[interior] = np.exp(-h_new)
            r_try = float(np.abs(_kernels.angle_sums(s_try, tri, n)[interior] - TWO_PI).max())
            if r_try < res:
                s = s_try
                improved = True
                break
            lam *= 0.5
        iterations += 1
        if not improved:
            break
    s, res = best_s, best_res
    if res > tol and iterations < max_sweeps:
        s, more, res = _kernels.unm_sweeps(s, tri, interior, k_deg, target, max_sweeps - iterations, tol)
        iterations += more
    return s, iterations, res


# -- layout ---------------------------------------------------------------

def _mobius(a):
    ca = np.conj(a)
    return (lambda z: (z - a) / (1 - ca * z)), (lambda w: (w + a) / (1 + ca * w))


def _layout(t: Triangulation, s: np.ndarray, root: int, axis: int):
    n = t.n
    bd = t.is_boundary
    with np.errstate(divide="ignore"):
        h = np.where(bd, np.inf, -np.log(np.where(s > 0, s, 1.0)))
    tr = np.where(bd, 1.0, (1 - s) / (1 + s))  # tanh(h/2)
    z = np.full(n, np.nan + 0j)  # hyperbolic centers (interior)
    ideal = np.full(n, np.nan + 0j)  # tangency points on the unit circle (boundary)
    hc = np.full(n, np.nan + 0j)  # Euclidean horocycle centers
    hr = np.full(n, np.nan)
    placed = np.zeros(n, dtype=bool)
    worst = 0.0

    def place(w, v, beta, fwd, inv):
        nonlocal worst
        if bd[w]:
            p = inv(np.exp(1j * beta))
            p /= abs(p)
            if placed[w]:
                worst = max(worst, abs(p - ideal[w]))
                return False
            q = inv(tr[v] * np.exp(1j * beta))
            rho = abs(q - p) ** 2 / (2 * (1 - (q * np.conj(p)).real))
            ideal[w], hc[w], hr[w] = p, (1 - rho) * p, rho
        else:
            zw = inv(math.tanh((h[v] + h[w]) / 2) * np.exp(1j * beta))
            if placed[w]:
                worst = max(worst, abs(zw - z[w]))
                return False
            z[w] = zw
        placed[w] = True
        return True

    z[root] = 0j
    placed[root] = True
    fwd, inv = _mobius(0j)
    place(axis, root, 0.0, fwd, inv)
    queue = deque([root])
    if not bd[axis]:
        queue.append(axis)
    seen = {root}
    if not bd[axis]:
        seen.add(axis)
    while queue:
        v = queue.popleft()
        fwd, inv = _mobius(z[v])
        fl = t.flower(v)
        k = len(fl)
        j0 = next(j for j in range(k) if placed[fl[j]])
        u = fl[j0]
        beta = float(np.angle(fwd(ideal[u] if bd[u] else z[u])))
        for step in range(1, k + 1):
            a, b = fl[(j0 + step - 1) % k], fl[(j0 + step) % k]
            beta += float(_kernels.tri_angle_np(s[v], s[a], s[b]))
            new = place(b, v, beta, fwd, inv)
            if new and not bd[b] and b not in seen:
                seen.add(b)
                queue.append(b)
    if not placed.all():
        raise PackingError("layout could not reach every vertex through interior pivots")
    center = np.zeros((n, 2))
    radius = np.zeros(n)
    it = ~bd
    zz = z[it]
    t2 = tr[it] ** 2
    m2 = np.abs(zz) ** 2
    c = zz * (1 - t2) / (1 - t2 * m2)
    center[it] = np.stack([c.real, c.imag], axis=1)
    radius[it] = tr[it] * (1 - m2) / (1 - t2 * m2)
    center[bd] = np.stack([hc[bd].real, hc[bd].imag], axis=1)
    radius[bd] = hr[bd]
    return center, radius, h, worst


def pack_maximal(t: Triangulation, tol: float = 1e-9, max_sweeps: int = 100_000,
                 root: int | None = None, axis: int | None = None) -> PackingResult:
    """Maximal packing of ``t`` in the unit disc.

    ``root`` (default: lowest-id interior vertex, the combinatorial center for
    generated balls) is placed at the origin and ``axis`` (default: its first
    neighbour) on the positive real axis.
    """
    validate_triangulation(t)
    interior = t.interior
    if len(interior) == 0:
        raise NoInteriorVertex("triangulation has no interior vertex")
    if t.n < 4:
        raise NotATriangulation("need at least 4 vertices")
    root = int(interior[0]) if root is None else int(root)
    if t.is_boundary[root]:
        raise PackingError("root must be an interior vertex")
    fl = t.flower(root)
    axis = fl[0] if axis is None else int(axis)
    if axis not in fl:
        raise PackingError("axis vertex must neighbour the root")
    s, iterations, res = _solve_radii(t, tol, max_sweeps)
    center, radius, h, worst = _layout(t, s, root, axis)
    result = PackingResult(
        radius=radius,
        center=center,
        is_boundary=t.is_boundary,
        iterations=iterations,
        angle_residual=res,
        tangency_residual=tangency_residual(t, center, radius),
        hyperbolic_radius=h,
        layout_residual=worst,
        boundary_residual=float(np.abs(np.hypot(*center[t.is_boundary].T) + radius[t.is_boundary] - 1).max()),
        root=root,
        axis=axis,
    )
    if res > tol:
        raise MaxIterationsExceeded(f"angle residual {res:.3e} above tolerance {tol:.1e}", result)
    return result


def tangency_residual(t: Triangulation, center, radius) -> float:
    e = np.array(t.edges())
    d = np.hypot(*(center[e[:, 0]] - center[e[:, 1]]).T)
    rs = radius[e[:, 0]] + radius[e[:, 1]]
    return float(np.max(np.abs(d - rs) / rs))


def to_embedded_graph(p: PackingResult, t: Triangulation, weights=None) -> EmbeddedGraph:
    """Straight-line embedding with vertices at the circle centers."""
    e = t.edges()
    w = [1.0] * len(e) if weights is None else weights
    return build(p.center, [(u, v, x) for (u, v), x in zip(e, w)])


@dataclass
class RingReport:
    interior: float
    overall: float
    boundary: float
    by_degree: dict


def ring_constant(p: PackingResult, t: Triangulation) -> RingReport:
    """Largest radius ratio across edges.

    ``interior`` is restricted to edges between interior circles (``nan`` if
    there are none); ``by_degree`` maps a vertex degree to the largest ratio
    of its neighbours' radii to its own.
    """
    e = np.array(t.edges())
    r = p.radius
    ratio = np.maximum(r[e[:, 0]] / r[e[:, 1]], r[e[:, 1]] / r[e[:, 0]])
    bd = p.is_boundary
    both_int = ~bd[e[:, 0]] & ~bd[e[:, 1]]
    both_bd = bd[e[:, 0]] & bd[e[:, 1]]
    by_degree: dict[int, float] = {}
    for v in range(t.n):
        if bd[v]:
            continue
        fl = t.flower(v)
        val = float(max(max(r[fl] / r[v]), max(r[v] / r[fl])))
        d = len(fl)
        by_degree[d] = max(by_degree.get(d, 0.0), val)
    return RingReport(
        interior=float(ratio[both_int].max()) if both_int.any() else math.nan,
        overall=float(ratio.max()),
        boundary=float(ratio[both_bd].max()) if both_bd.any() else math.nan,
        by_degree=by_degree,
    )
