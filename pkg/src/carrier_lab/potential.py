"""Absorbing-chain potential theory by sparse linear algebra.

Everything reduces to the weighted Laplacian ``L = D - W`` restricted to a
live vertex set, where ``D`` counts every edge at a live vertex (including
edges into the absorbing set). With ``P = D^-1 W`` the Green function is
``G = (I - P)^-1 = L^-1 D``, so ``G(., y) = w_y L^-1 e_y`` and
``w_x G(x, y)`` is symmetric.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components
from scipy.sparse.linalg import splu

from .errors import (DisconnectedLiveSet, DomainViolation, EmptyAnnulusSide, EmptyLiveSet, PolesTooClose,
                     PotentialError, SolverFailure, ZeroDenominator)
from .graph import EmbeddedGraph, vertex_boundary

RESIDUAL_TOL = 1e-12


def _adjacency(g: EmbeddedGraph) -> sp.csr_matrix:
    A = g._cache.get("weight_csr")
    if A is None:
        w = g.weights
        A = sp.coo_matrix((np.concatenate([w, w]), (np.concatenate([g.edges[:, 0], g.edges[:, 1]]),
                                                     np.concatenate([g.edges[:, 1], g.edges[:, 0]]))),
                          shape=(g.n, g.n)).tocsr()
        g._cache["weight_csr"] = A
    return A


class AbsorbingSystem:
    """Factorised Laplacian of ``g`` on ``live`` with the rest absorbing."""

    def __init__(self, g: EmbeddedGraph, live):
        self.g = g
        self.live = np.asarray(sorted(set(int(v) for v in live)), dtype=np.int64)
        if len(self.live) == 0:
            raise EmptyLiveSet("no live vertices")
        self.mask = np.zeros(g.n, dtype=bool)
        self.mask[self.live] = True
        self.index = np.full(g.n, -1, dtype=np.int64)
        self.index[self.live] = np.arange(len(self.live))
        A = _adjacency(g)
        self.W_ll = A[self.live][:, self.live].tocsc()
        self.W_lx = A[self.live]  # live rows, all columns
        self.w = g.vertex_weight
        wl = self.w[self.live]
        self.L = (sp.diags(wl) - self.W_ll).tocsc()
        self._norm = float(2 * wl.max())
        if self.W_lx[:, ~self.mask].nnz == 0:
            raise PotentialError("no live vertex touches the absorbing set; the system is singular")
        try:
            self._lu = splu(self.L)
        except RuntimeError as exc:
            raise SolverFailure(str(exc)) from exc

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        """Solve ``L x = rhs`` to a normwise relative residual of ``RESIDUAL_TOL``."""
        rhs = np.asarray(rhs, dtype=float)
        x = self._lu.solve(rhs)
        for _ in range(2):
            r = rhs - self.L @ x
            # the absolute floor keeps subnormal data from failing the test
            bound = RESIDUAL_TOL * (self._norm * np.abs(x).max(axis=0) + np.abs(rhs).max(axis=0)) + 1e-290
            if np.all(np.abs(r).max(axis=0) <= bound):
                return x
            x = x + self._lu.solve(r)  # iterative refinement
        raise SolverFailure(f"residual {np.abs(r).max():.3g} above tolerance")

    def expand(self, x_live: np.ndarray, fill=0.0) -> np.ndarray:
        out = np.full(self.g.n, fill, dtype=float)
        out[self.live] = x_live
        return out

    def green_live(self, y: int) -> np.ndarray:
        if not self.mask[y]:
            raise PotentialError(f"pole {y} is not live")
        e = np.zeros(len(self.live))
        e[self.index[y]] = self.w[y]
        return self.solve(e)

    def inverse_columns(self, vertices) -> np.ndarray:
        """``L^-1 e_b`` for each vertex ``b`` (live index space, one column each)."""
        idx = self.index[np.asarray(vertices, dtype=np.int64)]
        if np.any(idx < 0):
            raise PotentialError("column vertices must be live")
        E = np.zeros((len(self.live), len(idx)))
        E[idx, np.arange(len(idx))] = 1.0
        return self.solve(E)

    def dirichlet(self, values: np.ndarray) -> np.ndarray:
        """Harmonic on live, equal to ``values`` (length ``n``) elsewhere."""
        vals = np.asarray(values, dtype=float).copy()
        vals[self.mask] = 0.0
        rhs = self.W_lx @ vals
        out = vals
        out[self.live] = self.solve(rhs)
        return out

    def exit_distribution(self, start: int) -> np.ndarray:
        """``P_start(X_T = z)`` for every vertex ``z`` (zero on live vertices)."""
        if not self.mask[start]:
            out = np.zeros(self.g.n)
            out[start] = 1.0
            return out
        e = np.zeros(len(self.live))
        e[self.index[start]] = 1.0
        u = self.solve(e)  # G(start, x) = w_x u_x
        dist = np.asarray(self.W_lx.T @ u).ravel()
        dist[self.mask] = 0.0
        return dist

    def harmonicity_residual(self, h: np.ndarray) -> float:
        """``max |h(v) - sum_u (w_uv / w_v) h(u)|`` over live ``v``."""
        avg = (self.W_lx @ h) / self.w[self.live]
        return float(np.abs(h[self.live] - avg).max())


def walk_region(g: EmbeddedGraph, start: int, stop: np.ndarray) -> np.ndarray:
    """Non-stop vertices reachable from ``start`` without passing a stop vertex."""
    keep = ~np.asarray(stop, dtype=bool)
    A = _adjacency(g)
    sub = A[keep][:, keep]
    ids = np.flatnonzero(keep)
    _, lab = connected_components(sub, directed=False)
    pos = np.searchsorted(ids, start)
    return ids[lab == lab[pos]]


def exit_distribution(g: EmbeddedGraph, start: int, stop) -> np.ndarray:
    """Exact law of the first stop vertex hit by the walk from ``start``."""
    stop = np.asarray(stop, dtype=bool)
    if stop[start]:
        out = np.zeros(g.n)
        out[start] = 1.0
        return out
    return AbsorbingSystem(g, walk_region(g, start, stop)).exit_distribution(start)


# -- exhaustions ---------------------------------------------------------------

@dataclass
class Exhaustion:
    base: EmbeddedGraph
    epsilon: float
    live: np.ndarray
    absorbing: np.ndarray
    _system: AbsorbingSystem | None = field(default=None, repr=False)

    @property
    def system(self) -> AbsorbingSystem:
        if self._system is None:
            self._system = AbsorbingSystem(self.base, self.live)
        return self._system

    @property
    def live_mask(self) -> np.ndarray:
        return self.system.mask


def exhaust(g: EmbeddedGraph, epsilon: float) -> Exhaustion:
    """Live vertices ``|v| <= 1 - epsilon`` off the outer cycle; absorbing is their boundary."""
    if not epsilon > 0:
        raise PotentialError("epsilon must be positive")
    r = np.hypot(g.pos[:, 0], g.pos[:, 1])
    keep = r <= 1 - epsilon
    keep[g.boundary_vertices] = False
    live = np.flatnonzero(keep)
    if len(live) == 0:
        raise EmptyLiveSet(f"no vertex with |v| <= {1 - epsilon:g}")
    sub = _adjacency(g)[live][:, live]
    k, _ = connected_components(sub, directed=False)
    if k != 1:
        raise DisconnectedLiveSet(f"live set at epsilon={epsilon:g} has {k} components")
    return Exhaustion(g, float(epsilon), live, vertex_boundary(g, live))


@dataclass
class GreenColumn:
    y: int
    values: np.ndarray  # length n; zero off the live set


@dataclass
class MartinVector:
    y: int
    x0: int
    values: np.ndarray  # length n; zero off the live set


def green(ex: Exhaustion, y: int) -> GreenColumn:
    """Expected visits to ``y`` before absorption, from every start."""
    return GreenColumn(int(y), ex.system.expand(ex.system.green_live(int(y))))


def martin_kernel(ex: Exhaustion, x0: int, y: int) -> MartinVector:
    col = green(ex, y)
    den = col.values[x0]
    if not den > 0:
        raise ZeroDenominator(f"G(x0={x0}, y={y}) = 0")
    vals = col.values / den
    vals[x0] = 1.0
    return MartinVector(int(y), int(x0), vals)


def nearest_live(ex: Exhaustion, xi: float, rank: int = 0) -> int:
    """The ``rank``-th closest live vertex to ``e^{i xi}``."""
    p = np.array([math.cos(xi), math.sin(xi)])
    d = np.hypot(*(ex.base.pos[ex.live] - p).T)
    return int(ex.live[np.argsort(d, kind="stable")[rank]])


def root_vertex(g: EmbeddedGraph) -> int:
    return int(np.argmin(np.hypot(g.pos[:, 0], g.pos[:, 1])))


@dataclass
class MartinConvergence:
    epsilons: list
    poles: list
    successive: list  # sup over probes of |M_n - M_{n+1}|
    agreement: list  # sup |M(., y_n) - M(., y'_n)| for a second sequence to the same angle
    separation: float  # sup |M(., y_last) - M(., y_last at the far angle)|
    probes: list

    @property
    def cauchy(self) -> bool:
        tail = self.successive[-3:]
        return all(a > b for a, b in zip(tail, tail[1:]))

    @property
    def same_residual(self) -> float:
        return max(self.successive[-1], self.agreement[-1])

    @property
    def separation_factor(self) -> float:
        r = self.same_residual
        return math.inf if r == 0 else self.separation / r

    def to_dict(self) -> dict:
        return {"epsilons": self.epsilons, "poles": self.poles, "successive": self.successive,
                "agreement": self.agreement, "separation": self.separation, "probes": self.probes,
                "cauchy": self.cauchy, "separation_factor": self.separation_factor}


def martin_convergence(exs, x0: int, xi: float, xi_far: float | None = None,
                       probe_hops: int = 2) -> MartinConvergence:
    """Cauchy, agreement and separation audits of ``M(., y_n)`` as ``y_n -> e^{i xi}``.

    ``exs`` is ordered by decreasing epsilon; ``y_n`` is the live vertex nearest
    the boundary point, the second sequence uses the next nearest one. Probes
    are the vertices within ``probe_hops`` edges of ``x0``.
    """
    from .graph import graph_distances

    g = exs[0].base
    if xi_far is None:
        xi_far = xi + math.pi
    hops = graph_distances(g, [x0])
    probes = np.flatnonzero(hops <= probe_hops)
    for ex in exs:
        if not ex.live_mask[probes].all():
            raise PotentialError("probe set must be live in every exhaustion")
    seq, alt, poles = [], [], []
    for ex in exs:
        y, y2 = nearest_live(ex, xi, 0), nearest_live(ex, xi, 1)
        poles.append(y)
        seq.append(martin_kernel(ex, x0, y).values[probes])
        alt.append(martin_kernel(ex, x0, y2).values[probes])
    far = martin_kernel(exs[-1], x0, nearest_live(exs[-1], xi_far)).values[probes]
    succ = [float(np.abs(a - b).max()) for a, b in zip(seq, seq[1:])]
    agree = [float(np.abs(a - b).max()) for a, b in zip(seq, alt)]
    return MartinConvergence([ex.epsilon for ex in exs], poles, succ, agree,
                             float(np.abs(seq[-1] - far).max()), probes.tolist())


def dirichlet_solve(ex: Exhaustion, boundary_values) -> np.ndarray:
    """Harmonic extension of values on the absorbing set (dict or length-``n`` array)."""
    vals = np.zeros(ex.base.n)
    if isinstance(boundary_values, dict):
        for v, x in boundary_values.items():
            vals[int(v)] = float(x)
    else:
        vals[:] = np.asarray(boundary_values, dtype=float)
    return ex.system.dirichlet(vals)


# -- resistance -----------------------------------------------------------------

@dataclass
class ResistanceQuery:
    A: list
    Z: list
    value: float

    def to_dict(self) -> dict:
        return {"A": self.A, "Z": self.Z, "value": self.value}


def _subgraph(g: EmbeddedGraph, vertices):
    A = _adjacency(g)
    if vertices is None:
        return A, np.arange(g.n)
    ids = np.asarray(sorted(set(int(v) for v in vertices)), dtype=np.int64)
    return A[ids][:, ids], ids


def network_resistance(W: sp.spmatrix, a, z) -> float:
    """Effective resistance between index sets of a conductance matrix ``W``."""
    W = sp.csr_matrix(W)
    n = W.shape[0]
    a = np.unique(np.asarray(a, dtype=np.int64))
    z = np.unique(np.asarray(z, dtype=np.int64))
    if len(a) == 0 or len(z) == 0:
        raise PotentialError("both terminal sets must be nonempty")
    if np.intersect1d(a, z).size:
        return 0.0
    fixed = np.zeros(n, dtype=bool)
    fixed[a] = fixed[z] = True
    _, lab = connected_components(W, directed=False)
    if not np.isin(lab[a], lab[z]).any():
        return math.inf
    # free vertices in components without terminals carry no current
    terminal_comp = np.isin(lab, np.unique(lab[fixed]))
    free = np.flatnonzero(~fixed & terminal_comp)
    phi = np.zeros(n)
    phi[a] = 1.0
    if len(free):
        deg = np.asarray(W.sum(axis=1)).ravel()
        Lff = (sp.diags(deg[free]) - W[free][:, free]).tocsc()
        rhs = W[free] @ phi
        try:
            x = splu(Lff).solve(rhs)
        except RuntimeError as exc:
            raise SolverFailure(str(exc)) from exc
        if np.abs(Lff @ x - rhs).max() > 1e-10 * max(1.0, np.abs(rhs).max()):
            raise SolverFailure("resistance solve residual too large")
        phi[free] = x
    Wc = W.tocoo()
    energy = 0.5 * float(np.sum(Wc.data * (phi[Wc.row] - phi[Wc.col]) ** 2))
    return math.inf if energy == 0 else 1.0 / energy


def effective_resistance(g, A, Z, vertices=None) -> ResistanceQuery:
    """Resistance between vertex sets with edge weights as conductances.

    ``g`` may be an :class:`Exhaustion`, in which case the network is the
    subgraph induced on its live vertices. ``vertices`` restricts any graph.
    """
    if isinstance(g, Exhaustion):
        vertices = g.live if vertices is None else vertices
        g = g.base
    W, ids = _subgraph(g, vertices)
    pos = np.full(g.n, -1, dtype=np.int64)
    pos[ids] = np.arange(len(ids))
    a, z = pos[np.asarray(list(A), dtype=np.int64)], pos[np.asarray(list(Z), dtype=np.int64)]
    if np.any(a < 0) or np.any(z < 0):
        raise PotentialError("terminals must lie in the network")
    return ResistanceQuery(sorted(map(int, A)), sorted(map(int, Z)), network_resistance(W, a, z))


def contracted_resistance(g: EmbeddedGraph, groups, A, Z, vertices=None) -> float:
    """Resistance after shorting each vertex group to a single node (a lower bound)."""
    W, ids = _subgraph(g, vertices)
    pos = np.full(g.n, -1, dtype=np.int64)
    pos[ids] = np.arange(len(ids))
    label = np.arange(len(ids))
    nxt = len(ids)
    for grp in list(groups) + [A, Z]:
        idx = pos[np.asarray(list(grp), dtype=np.int64)]
        idx = idx[idx >= 0]
        if len(idx):
            tgt = np.unique(label[idx])
            label[np.isin(label, tgt)] = nxt
            nxt += 1
    _, label = np.unique(label, return_inverse=True)
    k = label.max() + 1
    Wc = W.tocoo()
    keep = label[Wc.row] != label[Wc.col]
    C = sp.coo_matrix((Wc.data[keep], (label[Wc.row][keep], label[Wc.col][keep])), shape=(k, k)).tocsr()
    a = np.unique(label[pos[np.asarray(list(A), dtype=np.int64)]])
    z = np.unique(label[pos[np.asarray(list(Z), dtype=np.int64)]])
    return network_resistance(C, a, z)


def _ball_sets(ex: Exhaustion, xi: float, r: float, R: float):
    p = np.array([math.cos(xi), math.sin(xi)])
    d = np.hypot(*(ex.base.pos[ex.live] - p).T)
    A = ex.live[d <= r]
    Z = ex.live[d > R]
    if len(A) == 0 or len(Z) == 0:
        raise EmptyAnnulusSide(f"annulus at xi={xi:g}, r={r:g}, R={R:g} has an empty side")
    return A, Z, d


def annulus_test_energy(ex: Exhaustion, xi: float, r: float) -> tuple[float, int]:
    """Energy of ``f = clip((|x - xi| - r)/r, 0, 1)`` on the live network.

    Also returns the number of edges with both ends on one side of the
    annulus that nonetheless carry energy (always zero).
    """
    p = np.array([math.cos(xi), math.sin(xi)])
    g = ex.base
    f = np.clip((np.hypot(*(g.pos - p).T) - r) / r, 0.0, 1.0)
    mask = ex.live_mask
    e = g.edges
    inside = mask[e[:, 0]] & mask[e[:, 1]]
    diff = f[e[:, 0]] - f[e[:, 1]]
    contrib = g.weights * diff ** 2
    d = np.hypot(*(g.pos - p).T)
    flat = ((d[e[:, 0]] <= r) & (d[e[:, 1]] <= r)) | ((d[e[:, 0]] >= 2 * r) & (d[e[:, 1]] >= 2 * r))
    leaks = int(np.count_nonzero(inside & flat & (contrib != 0)))
    return float(contrib[inside].sum()), leaks


def resistance_annulus_bound(ex: Exhaustion, xi: float, r: float) -> tuple[float, float]:
    """``(R_measured, R_variational_lower)`` across the annulus ``r < |x - xi| <= 2r``."""
    A, Z, _ = _ball_sets(ex, xi, r, 2 * r)
    R = effective_resistance(ex, A, Z).value
    energy, _ = annulus_test_energy(ex, xi, r)
    return R, (math.inf if energy == 0 else 1.0 / energy)


@dataclass
class LogGrowth:
    ratios: list
    values: list
    slope: float
    intercept: float
    series_lower: list

    @property
    def nondecreasing(self) -> bool:
        return all(a <= b * (1 + 1e-12) for a, b in zip(self.values, self.values[1:]))

    def to_dict(self) -> dict:
        return {"ratios": self.ratios, "values": self.values, "slope": self.slope,
                "intercept": self.intercept, "series_lower": self.series_lower,
                "nondecreasing": self.nondecreasing}


def series_lower_bound(ex: Exhaustion, xi: float, r: float, R: float) -> float:
    """Short every even dyadic shell ``2^(2i) r < |x - xi| <= 2^(2i+1) r`` and solve."""
    A, Z, d = _ball_sets(ex, xi, r, R)
    groups = []
    j = 0
    while r * 2 ** j < R:
        lo, hi = r * 2 ** j, min(r * 2 ** (j + 1), R)
        if j % 2 == 0:
            grp = ex.live[(d > lo) & (d <= hi)]
            if len(grp):
                groups.append(grp)
        j += 1
    return contracted_resistance(ex.base, groups, A, Z, ex.live)


def resistance_log_growth(ex: Exhaustion, xi: float, r: float, ratios=(4, 8, 16)) -> LogGrowth:
    """Resistance from ``V_euc(xi, r)`` to the live vertices beyond ``k r``, fitted against ``log k``."""
    vals, lows = [], []
    for k in ratios:
        A, Z, _ = _ball_sets(ex, xi, r, k * r)
        vals.append(effective_resistance(ex, A, Z).value)
        lows.append(series_lower_bound(ex, xi, r, k * r))
    x = np.log(np.asarray(ratios, dtype=float))
    slope, intercept = np.polyfit(x, np.asarray(vals), 1)
    return LogGrowth(list(map(float, ratios)), vals, float(slope), float(intercept), lows)


# -- Harnack --------------------------------------------------------------------

def cable_values(g: EmbeddedGraph, h: np.ndarray, pieces) -> np.ndarray:
    """Values of the edgewise-linear extension of ``h`` at the ends of ball pieces.

    ``h`` may be ``(n,)`` or ``(k, n)``; the extension is linear on every piece,
    so these values carry its extremes over the ball.
    """
    e = np.array([p[0] for p in pieces], dtype=np.int64)
    s = np.array([[p[1], p[2]] for p in pieces]).T.ravel()
    e2 = np.concatenate([e, e])
    a, b = g.edges[e2, 0], g.edges[e2, 1]
    return h[..., a] * (1 - s) + h[..., b] * s


def harnack_ratio(g: EmbeddedGraph, x, r: float, h: np.ndarray) -> float:
    """``max h / min h`` over the cable ball ``B_d0(x, r)``, ``h`` extended linearly on edges."""
    from . import metric

    if isinstance(x, (int, np.integer)):
        x = metric.at_vertex(g, int(x))
    vals = cable_values(g, np.asarray(h, dtype=float), metric.ball_pieces(g, x, r))
    if np.any(vals <= 0):
        raise DomainViolation("test function is not positive on the ball")
    return float(vals.max() / vals.min())


def green_harnack_max(ex: Exhaustion, x, r: float, A: float = 2.0) -> tuple[float, int]:
    """Max Harnack ratio on ``B_d0(x, r)`` over all Green columns with poles outside ``B_d0(x, A r)``.

    Uses ``G(b, y) = w_y (L^-1)_{b y}``: columns of ``L^-1`` at the ball's edge
    endpoints give every pole at once. Returns ``(ratio, pole)``.
    """
    from . import metric

    g = ex.base
    if isinstance(x, (int, np.integer)):
        x = metric.at_vertex(g, int(x))
    dx = metric.distances_from(g, x)
    big = dx <= A * r
    if not ex.live_mask[big].all():
        raise DomainViolation("the A r ball reaches the absorbing set")
    pieces = metric.ball_pieces(g, x, r, dx)
    ends = np.unique(g.edges[[p[0] for p in pieces]].ravel())
    ends = ends[ex.live_mask[ends]]
    poles = np.flatnonzero(~big[ex.live])
    if len(poles) == 0:
        raise DomainViolation("no live pole outside the A r ball")
    cols = ex.system.inverse_columns(ends)  # rows: live y; cols: ends b
    H = np.zeros((len(poles), g.n))  # H[k, b] proportional to G(b, y_k)
    H[:, ends] = cols[poles]
    vals = cable_values(g, H, pieces)
    ratio = vals.max(axis=1) / vals.min(axis=1)
    k = int(np.argmax(ratio))
    return float(ratio[k]), int(ex.live[poles[k]])


def boundary_harnack_ratio(ex: Exhaustion, xi: float, r: float, x0: int | None = None,
                           x: int | None = None, A0: float = 4.0) -> float:
    """Max over ``a, b`` in ``V_euc(xi, r)`` of ``(h1(a)/h2(a)) / (h1(b)/h2(b))``.

    ``h1 = G(., x0)`` and ``h2 = G(., x)``; defaults put ``x0`` at the root and
    ``x`` at the live vertex nearest ``0.5 e^{i(xi + pi/2)}``.
    """
    g = ex.base
    p = np.array([math.cos(xi), math.sin(xi)])
    if x0 is None:
        x0 = root_vertex(g)
    if x is None:
        q = 0.5 * np.array([math.cos(xi + math.pi / 2), math.sin(xi + math.pi / 2)])
        x = int(ex.live[np.argmin(np.hypot(*(g.pos[ex.live] - q).T))])
    for pole in (x0, x):
        if np.hypot(*(g.pos[pole] - p)) < A0 * r:
            raise PolesTooClose(f"pole {pole} lies within {A0:g} r of the boundary point")
    d = np.hypot(*(g.pos[ex.live] - p).T)
    ball = ex.live[d <= r]
    if len(ball) == 0:
        raise EmptyAnnulusSide(f"no live vertex within {r:g} of angle {xi:g}")
    h1 = green(ex, x0).values[ball]
    h2 = green(ex, x).values[ball]
    q = h1 / h2
    return float(q.max() / q.min())


# -- harmonic extension against Monte Carlo --------------------------------------

@dataclass
class HarmonicCheck:
    epsilon: float
    probes: list
    solve: list
    monte_carlo: list
    ci: list
    n: int

    @property
    def discrepancy(self) -> float:
        return float(max(abs(a - b) for a, b in zip(self.solve, self.monte_carlo)))

    @property
    def within(self) -> bool:
        """Every probe agrees within twice its 95% half-width."""
        return all(abs(a - b) <= 2 * c for a, b, c in zip(self.solve, self.monte_carlo, self.ci))

    def to_dict(self) -> dict:
        return {"epsilon": self.epsilon, "probes": self.probes, "solve": self.solve,
                "monte_carlo": self.monte_carlo, "ci": self.ci, "n": self.n,
                "discrepancy": self.discrepancy, "within": self.within}


def arc_indicator(lo: float, width: float):
    """Indicator of the arc ``[lo, lo + width)`` as a function of angle."""
    def f(theta):
        return (np.mod(np.asarray(theta) - lo, 2 * math.pi) < width).astype(float)
    return f


def harmonic_extension_check(ex: Exhaustion, g_angle, cfg, probes=None,
                             stop_radius: float | None = None) -> HarmonicCheck:
    """Dirichlet solve with data ``g(arg v)`` on the absorbing set versus ``E_v g(exit angle)``.

    The Monte Carlo side walks the full graph to the stopping annulus
    (``stop_radius`` defaults to ``epsilon / 4``), independently of ``ex``.
    """
    from . import walk

    g = ex.base
    if probes is None:
        probes = [root_vertex(g)]
    ang = np.arctan2(g.pos[:, 1], g.pos[:, 0])
    data = np.zeros(g.n)
    data[ex.absorbing] = g_angle(ang[ex.absorbing])
    h = ex.system.dirichlet(data)
    sr = ex.epsilon / 4 if stop_radius is None else stop_radius
    sol, mc, ci = [], [], []
    n = 0
    for v in probes:
        s = walk.walk_to_boundary(g, int(v), sr, cfg)
        m, c = walk.mean_ci(g_angle(s.angles))
        sol.append(float(h[v]))
        mc.append(m)
        ci.append(c)
        n = s.n
    return HarmonicCheck(ex.epsilon, [int(v) for v in probes], sol, mc, ci, n)
