"""Monte Carlo for the weighted random walk.

Walk ``i`` of a batch draws its randomness from a counter-based stream keyed
by ``(seed, i)``, so results do not depend on thread count or batch order.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import AllWalksTruncated, BallEscapesCarrier, IsolatedVertex, WalkError
from .graph import EmbeddedGraph

Z95 = 1.959963984540054
TWO_PI = 2 * math.pi


@dataclass(frozen=True)
class WalkConfig:
    seed: int = 0
    max_steps: int = 10_000_000
    samples: int = 10_000
    weight_source: str = "graph"  # or "uniform"
    jit: bool | None = None

    def __post_init__(self):
        if self.samples < 1 or self.max_steps < 1:
            raise WalkError("samples and max_steps must be at least 1")
        if self.weight_source not in ("graph", "uniform"):
            raise WalkError(f"unknown weight_source {self.weight_source!r}")


@dataclass
class Estimate:
    value: float
    ci: float
    n: int
    truncated: int = 0

    def to_dict(self) -> dict:
        return {"value": self.value, "ci": self.ci, "n": self.n, "truncated": self.truncated}


@dataclass
class ExitStats:
    n: int
    exit_arg_histogram: list
    arc_probability: float | None
    arc_ci: float | None
    time_functional_mean: float
    time_functional_ci: float
    truncated: int
    exit_angles: np.ndarray = field(repr=False, default=None)
    exit_vertices: np.ndarray = field(repr=False, default=None)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "exit_arg_histogram": list(map(int, self.exit_arg_histogram)),
            "arc_probability": self.arc_probability,
            "arc_ci": self.arc_ci,
            "time_functional_mean": self.time_functional_mean,
            "time_functional_ci": self.time_functional_ci,
            "truncated": self.truncated,
        }


def transition_table(g: EmbeddedGraph, weight_source: str = "graph") -> np.ndarray:
    """Cumulative transition probabilities aligned with ``g.adj_idx``."""
    cache = g._cache.setdefault("cumprob", {})
    if weight_source not in cache:
        w = g.weights[g.adj_edge] if weight_source == "graph" else np.ones(len(g.adj_edge))
        cum = np.empty(len(w))
        for v in range(g.n):
            lo, hi = g.adj_ptr[v], g.adj_ptr[v + 1]
            if hi > lo:
                c = np.cumsum(w[lo:hi])
                cum[lo:hi] = c / c[-1]
        cache[weight_source] = cum
    return cache[weight_source]


def step(g: EmbeddedGraph, v: int, rng, weight_source: str = "graph") -> int:
    """One transition from ``v`` with probability proportional to edge weight."""
    lo, hi = g.adj_ptr[v], g.adj_ptr[v + 1]
    if hi == lo:
        raise IsolatedVertex(f"vertex {v} has no neighbours")
    cum = transition_table(g, weight_source)[lo:hi]
    j = min(int(np.searchsorted(cum, rng.random(), side="right")), hi - lo - 1)
    return int(g.adj_idx[lo + j])


def run_batch(g: EmbeddedGraph, start: int, stop: np.ndarray, cfg: WalkConfig,
              cost=None, score=None, first: int = 0):
    """Walks from ``start`` until ``stop``; see :func:`_kernels.walk_batch`."""
    if g.degree[start] == 0:
        raise IsolatedVertex(f"vertex {start} has no neighbours")
    cost = np.zeros(g.n) if cost is None else np.ascontiguousarray(cost, dtype=np.float64)
    score = np.zeros(g.n) if score is None else np.ascontiguousarray(score, dtype=np.float64)
    keys = _kernels.stream_keys(cfg.seed, first, cfg.samples)
    return _kernels.walk_batch(g.adj_ptr, g.adj_idx, transition_table(g, cfg.weight_source), start,
                               np.ascontiguousarray(stop, dtype=np.bool_), cost, score, keys,
                               cfg.max_steps, jit=cfg.jit)


def in_arc(theta, interval, closed: bool = False):
    """Whether angles lie in ``[lo, lo + width)`` (closed at both ends if asked)."""
    lo, width = interval
    if width >= TWO_PI:
        return np.ones(np.shape(theta), dtype=bool)
    d = np.mod(np.asarray(theta) - lo, TWO_PI)
    return d <= width if closed else d < width


def proportion(hits: np.ndarray) -> tuple[float, float]:
    n = len(hits)
    p = float(np.mean(hits))
    return p, Z95 * math.sqrt(p * (1 - p) / n)


def mean_ci(x: np.ndarray) -> tuple[float, float]:
    n = len(x)
    sd = float(np.std(x, ddof=1)) if n > 1 else 0.0
    return float(np.mean(x)), Z95 * sd / math.sqrt(n)


def _check_ball(g: EmbeddedGraph, u: int, r: float):
    if not g.carrier_contains_disc(g.pos[u], r):
        raise BallEscapesCarrier(f"ball of radius {r:g} about vertex {u} leaves the carrier")


def run_to_exit(g: EmbeddedGraph, u: int, r: float, cfg: WalkConfig, interval=None,
                bins: int = 36, include_exit: bool = True, check: bool = True) -> ExitStats:
    """Walk from ``u`` until the first vertex with ``|v - u| > r``.

    Records ``arg(X_T - u)`` and ``sum r_{X_t}^2`` over ``t = 0..T`` (``t < T``
    when ``include_exit`` is false). Truncated walks are counted and dropped.
    """
    if check:
        _check_ball(g, u, r)
    rel = g.pos - g.pos[u]
    stop = np.hypot(rel[:, 0], rel[:, 1]) > r
    r2 = g.isolation_radii ** 2
    final, steps, total, _, trunc = run_batch(g, u, stop, cfg, cost=r2)
    ok = ~trunc
    if not ok.any():
        raise AllWalksTruncated(f"all {cfg.samples} walks hit max_steps={cfg.max_steps}")
    final, total = final[ok], total[ok]
    if not include_exit:
        total = total - r2[final]
    ang = np.mod(np.arctan2(rel[final, 1], rel[final, 0]), TWO_PI)
    hist, _ = np.histogram(ang, bins=bins, range=(0.0, TWO_PI))
    p = ci = None
    if interval is not None:
        p, ci = proportion(in_arc(ang, interval))
    tm, tci = mean_ci(total)
    return ExitStats(n=int(ok.sum()), exit_arg_histogram=hist.tolist(), arc_probability=p, arc_ci=ci,
                     time_functional_mean=tm, time_functional_ci=tci, truncated=int(trunc.sum()),
                     exit_angles=ang, exit_vertices=final)


def exit_arc_probability(g, u, r, interval, cfg: WalkConfig) -> Estimate:
    """``P_u(arg(X_{T_r} - u) in I)`` with a 95% normal interval."""
    st = run_to_exit(g, u, r, cfg, interval=interval)
    return Estimate(st.arc_probability, st.arc_ci, st.n, st.truncated)


def exit_arc_sweep(g, centers, radii, width: float, rotations: int, cfg: WalkConfig):
    """Rows ``(u, r, lo, hi, estimate, ci, n, truncated)``; one walk batch per ``(u, r)``."""
    rows = []
    for u in centers:
        for r in radii:
            st = run_to_exit(g, int(u), float(r), cfg)
            for k in range(rotations):
                lo = TWO_PI * k / rotations
                p, ci = proportion(in_arc(st.exit_angles, (lo, width)))
                rows.append((int(u), float(r), lo, lo + width, p, ci, st.n, st.truncated))
    return rows


def exit_time_functional(g, u, r, cfg: WalkConfig, include_exit: bool = True) -> Estimate:
    """``E_u sum_t r_{X_t}^2`` up to the exit from ``V_euc(u, r)``."""
    st = run_to_exit(g, u, r, cfg, include_exit=include_exit)
    return Estimate(st.time_functional_mean, st.time_functional_ci, st.n, st.truncated)


def cone_target(g: EmbeddedGraph, u: int, r: float, interval, clearance: float = 0.125) -> np.ndarray:
    """Vertices in the closed cone at ``u`` with ``clearance*r < |v-u| <= r``."""
    rel = g.pos - g.pos[u]
    d = np.hypot(rel[:, 0], rel[:, 1])
    ang = np.mod(np.arctan2(rel[:, 1], rel[:, 0]), TWO_PI)
    return (d > clearance * r) & (d <= r) & in_arc(ang, interval, closed=True)


def cone_hitting_probability(g, u, r, interval, cfg: WalkConfig, clearance: float = 0.125,
                             check: bool = True) -> Estimate:
    """``P_u(tau_S < tau_{outside V_euc(u, 2r)})`` for the clipped cone ``S``."""
    if check:
        _check_ball(g, u, 2 * r)
    target = cone_target(g, u, r, interval, clearance)
    rel = g.pos - g.pos[u]
    outside = np.hypot(rel[:, 0], rel[:, 1]) > 2 * r
    final, _, _, _, trunc = run_batch(g, u, target | outside, cfg)
    ok = ~trunc
    if not ok.any():
        raise AllWalksTruncated("all walks truncated")
    p, ci = proportion(target[final[ok]])
    return Estimate(p, ci, int(ok.sum()), int(trunc.sum()))


def boundary_stop(g: EmbeddedGraph, stop_radius: float) -> np.ndarray:
    """Outer-cycle vertices and vertices within ``stop_radius`` of the unit circle."""
    stop = np.hypot(g.pos[:, 0], g.pos[:, 1]) >= 1 - stop_radius
    stop[g.boundary_vertices] = True
    return stop


@dataclass
class BoundarySample:
    angles: np.ndarray
    vertices: np.ndarray
    truncated: int

    @property
    def n(self) -> int:
        return len(self.angles)


def walk_to_boundary(g: EmbeddedGraph, u: int, stop_radius: float, cfg: WalkConfig) -> BoundarySample:
    """Angular positions where walks from ``u`` first reach the stopping annulus."""
    if not 0 < stop_radius < 1:
        raise WalkError("stop_radius must lie in (0, 1)")
    stop = boundary_stop(g, stop_radius)
    final, _, _, _, trunc = run_batch(g, u, stop, cfg)
    ok = ~trunc
    if not ok.any():
        raise AllWalksTruncated("all walks truncated")
    v = final[ok]
    ang = np.mod(np.arctan2(g.pos[v, 1], g.pos[v, 0]), TWO_PI)
    return BoundarySample(ang, v, int(trunc.sum()))


@dataclass
class AtomProbe:
    radii: list
    probabilities: list
    ci: list
    C: float
    n: int
    truncated: int

    @property
    def nonincreasing(self) -> bool:
        return all(a >= b for a, b in zip(self.probabilities, self.probabilities[1:]))

    def to_dict(self) -> dict:
        return {"radii": self.radii, "probabilities": self.probabilities, "ci": self.ci, "C": self.C,
                "n": self.n, "truncated": self.truncated, "nonincreasing": self.nonincreasing}


def atom_probe(g: EmbeddedGraph, u: int, xi: float, radii, cfg: WalkConfig,
               stop_radius: float = 0.01) -> AtomProbe:
    """Probability of visiting ``V_euc(e^{i xi}, r)`` before the stopping annulus.

    All radii share one set of walks (the closest approach to ``e^{i xi}`` is
    recorded), so the estimates are monotone in ``r`` by construction. A ball
    that already holds ``u`` is visited at time 0 and gets probability 1. ``C``
    is the smallest constant with ``p(r) <= C / |log r|`` over the given radii.
    """
    radii = [float(r) for r in radii]
    if any(a <= b for a, b in zip(radii, radii[1:])):
        raise WalkError("radii must be strictly decreasing")
    target = np.array([math.cos(xi), math.sin(xi)])
    dist = np.hypot(*(g.pos - target).T)
    stop = boundary_stop(g, stop_radius)
    _, _, _, closest, trunc = run_batch(g, u, stop, cfg, score=dist)
    ok = ~trunc
    if not ok.any():
        raise AllWalksTruncated("all walks truncated")
    closest = closest[ok]
    probs, cis = [], []
    for r in radii:
        p, ci = proportion(closest <= r)
        probs.append(p)
        cis.append(ci)
    C = max(p * abs(math.log(r)) for p, r in zip(probs, radii))
    return AtomProbe(radii, probs, cis, C, int(ok.sum()), int(trunc.sum()))
