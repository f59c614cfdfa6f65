import math

import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given
from hypothesis import strategies as st
from scipy.sparse.csgraph import dijkstra

from carrier_lab import generators, metric
from carrier_lab.errors import BallEscapesCarrier
from carrier_lab.graph import build
from carrier_lab.metric import CablePoint


def vertex_oracle(g):
    W = sp.coo_matrix((g.edge_lengths, (g.edges[:, 0], g.edges[:, 1])), shape=(g.n, g.n))
    return dijkstra(W, directed=False)


def split_oracle(g, x, y):
    """Shortest path after subdividing the edges carrying x and y."""
    rows, cols, w = list(g.edges[:, 0]), list(g.edges[:, 1]), list(g.edge_lengths)
    X, Y = g.n, g.n + 1
    for node, q in ((X, x), (Y, y)):
        a, b = g.edges[q.edge]
        L = g.edge_lengths[q.edge]
        rows += [node, node]
        cols += [a, b]
        w += [q.t * L + 1e-300, (1 - q.t) * L + 1e-300]
    if x.edge == y.edge:
        rows.append(X)
        cols.append(Y)
        w.append(abs(x.t - y.t) * g.edge_lengths[x.edge] + 1e-300)
    W = sp.coo_matrix((w, (rows, cols)), shape=(g.n + 2, g.n + 2)).tocsr()
    return dijkstra(W, directed=False, indices=[X])[0, Y]


def point_distance(g, dv, x, e, t):
    """d0 from x to the point t on edge e, given vertex distances dv from x's edge endpoints."""
    a, b = g.edges[e]
    L = g.edge_lengths[e]
    ax, bx = g.edges[x.edge]
    Lx = g.edge_lengths[x.edge]
    to = np.minimum(x.t * Lx + dv[ax], (1 - x.t) * Lx + dv[bx])
    d = np.minimum(t * L + to[a], (1 - t) * L + to[b])
    if e == x.edge:
        d = np.minimum(d, np.abs(t - x.t) * L)
    return d


def test_same_edge_is_segment_length(tri3):
    x, y = CablePoint(0, 0.2), CablePoint(0, 0.9)
    assert metric.d0(tri3, x, y) == pytest.approx(0.7)


def test_square_face_opposite_corners(grid3):
    assert metric.d0(grid3, metric.at_vertex(grid3, 0), metric.at_vertex(grid3, 4)) == pytest.approx(2.0)


def test_diagonal_ratio_is_root_two(grid3):
    x, y = metric.at_vertex(grid3, 0), metric.at_vertex(grid3, 4)
    ratio = metric.d0(grid3, x, y) / np.hypot(*(x.xy(grid3) - y.xy(grid3)))
    assert ratio == pytest.approx(math.sqrt(2))


def test_square_grid_sampled_ratio_reaches_opposite_sides(grid3):
    # midpoints of opposite sides of a unit face: d0 = 2, |x - y| = 1
    c = metric.bilipschitz_constant(grid3, 4000, 2)
    assert math.sqrt(2) < c <= 2 + 1e-9


def test_random_pairs_match_split_graph(hex7_d4):
    g = hex7_d4[2]
    rng = np.random.default_rng(11)
    for _ in range(100):
        x = CablePoint(int(rng.integers(g.m)), float(rng.random()))
        y = CablePoint(int(rng.integers(g.m)), float(rng.random()))
        assert metric.d0(g, x, y) == pytest.approx(split_oracle(g, x, y), rel=1e-12, abs=1e-14)


def test_vectorised_pairs_agree(hex7_d3):
    g = hex7_d3[2]
    rng = np.random.default_rng(2)
    ex, ey = rng.integers(g.m, size=50), rng.integers(g.m, size=50)
    tx, ty = rng.random(50), rng.random(50)
    vec = metric.d0_pairs(g, ex, tx, ey, ty)
    one = [metric.d0(g, CablePoint(int(a), s), CablePoint(int(b), t)) for a, s, b, t in zip(ex, tx, ey, ty)]
    assert np.allclose(vec, one, rtol=1e-13)


edge_param = st.tuples(st.integers(0, 10_000), st.floats(0, 1))


@given(edge_param, edge_param, edge_param)
def test_metric_axioms(hex7_d3, p, q, r):
    g = hex7_d3[2]
    x, y, z = (CablePoint(e % g.m, t) for e, t in (p, q, r))
    dxy, dyx = metric.d0(g, x, y), metric.d0(g, y, x)
    assert dxy == pytest.approx(dyx, abs=1e-14)
    assert metric.d0(g, x, z) <= dxy + metric.d0(g, y, z) + 1e-12
    assert dxy >= np.hypot(*(x.xy(g) - y.xy(g))) - 1e-12


def test_bilipschitz_tri3_at_most_two(tri3):
    c = metric.bilipschitz_constant(tri3, 4000, 0)
    assert 1.5 < c <= 2 + 1e-12


def test_bilipschitz_stable(hex7_d4):
    g = hex7_d4[2]
    a, b = metric.bilipschitz_constant(g, 10_000, 1), metric.bilipschitz_constant(g, 20_000, 1)
    assert abs(a - b) / a <= 0.10


def test_ball_measure_tri3(tri3):
    x = metric.at_vertex(tri3, 0)
    assert metric.ball_d0(tri3, x, 0.5).measure == pytest.approx(1.0)
    assert metric.ball_d0(tri3, x, 0.0).measure == 0.0


def test_ball_measure_matches_discretisation(hex7_d3):
    g = hex7_d3[2]
    dv = vertex_oracle(g)
    rng = np.random.default_rng(5)
    t = (np.arange(1000) + 0.5) / 1000
    for _ in range(5):
        x = CablePoint(int(rng.integers(g.m)), float(rng.random()))
        r = float(rng.uniform(0.05, 0.4))
        exact = metric.ball_d0(g, x, r).measure
        approx = sum(g.edge_lengths[e] ** 2 * np.mean(point_distance(g, dv, x, e, t) < r) for e in range(g.m))
        assert exact == pytest.approx(approx, rel=5e-3, abs=1e-6)


@given(edge_param, st.floats(0.01, 0.3), st.floats(0.01, 0.3))
def test_ball_monotone_in_radius(hex7_d3, p, r1, r2):
    g = hex7_d3[2]
    x = CablePoint(p[0] % g.m, p[1])
    lo, hi = sorted((r1, r2))
    assert metric.ball_d0(g, x, lo).measure <= metric.ball_d0(g, x, hi).measure + 1e-15


def test_doubling_small_radius_is_two(hex7_d4):
    g = hex7_d4[2]
    x = metric.at_vertex(g, 0)
    r = 0.1 * g.isolation_radii[0]
    assert metric.doubling_ratio(g, x, r) == pytest.approx(2.0)


def test_doubling_lattice_area_scaling():
    g = generators.triangular_lattice(30)
    q = metric.doubling_ratio(g, metric.at_vertex(g, 0), 8.0)
    assert q == pytest.approx(4.0, rel=0.1)


def test_doubling_refuses_escaping_ball(tri3):
    with pytest.raises(BallEscapesCarrier):
        metric.doubling_ratio(tri3, metric.at_vertex(tri3, 0), 1.0)


def euclidean_clip(g, u, r):
    """Sum of |e|^2 times the parameter length of e inside the disc B(u, r)."""
    total = 0.0
    c = g.pos[u]
    for e, (a, b) in enumerate(g.edges):
        p, d = g.pos[a] - c, g.pos[b] - g.pos[a]
        qa, qb, qc = d @ d, 2 * p @ d, p @ p - r * r
        disc = qb * qb - 4 * qa * qc
        if disc <= 0:
            continue
        lo = max((-qb - math.sqrt(disc)) / (2 * qa), 0.0)
        hi = min((-qb + math.sqrt(disc)) / (2 * qa), 1.0)
        total += max(hi - lo, 0.0) * g.edge_lengths[e] ** 2
    return total


def test_full_cone_is_ball_clip(hex7_d4):
    g = hex7_d4[2]
    for u in (0, 3, 12):
        m = metric.cone(g, u, 0.3, (0.0, 2 * math.pi)).measure
        assert m == pytest.approx(euclidean_clip(g, u, 0.3), rel=1e-12)


def test_narrow_cone_on_triangle(tri3):
    # the wedge of half-width 0.1 about angle 0 holds edge 0-1 and a sliver of edge 1-2
    c = metric.cone(tri3, 0, 2.0, (-0.1, 0.2))
    sliver = 0.1 * math.tan(0.1) / (math.sqrt(3) / 2 + 0.5 * math.tan(0.1)) / 0.1
    pieces = {tri3.edge_id(*tri3.edges[e]): (lo, hi) for e, lo, hi in c.pieces}
    assert pieces[tri3.edge_id(0, 1)] == pytest.approx((0.0, 1.0))
    assert pieces[tri3.edge_id(1, 2)][1] == pytest.approx(sliver, rel=1e-9)
    assert tri3.edge_id(0, 2) not in pieces


def test_poincare_single_edge():
    L = 1.0
    g = build([(0.0, 0.0), (L, 0.0)], [(0, 1, 1.0)])
    r = L / 2
    k = metric.poincare_constant(g, CablePoint(0, 0.5), r, blowup=1.0, h=L / 64, check=False)
    assert k * r * r == pytest.approx(L * L / math.pi ** 2, rel=0.01)


def test_poincare_finite_on_packing(hex7_d4):
    g = hex7_d4[2]
    k = metric.poincare_constant(g, metric.at_vertex(g, 0), 0.05)
    assert 0 < k < math.inf


def test_inner_curve_antipodal(hex7_d4):
    g = hex7_d4[2]
    rep = metric.inner_uniform_curve(g, 0.0, math.pi)
    assert math.isfinite(rep.C_len) and rep.c_depth > 0
    # passes through a face at the root
    assert np.hypot(*rep.points.T).min() < np.hypot(*g.pos[g.neighbors(0)].T).max()


def test_inner_curve_uniform_constant(hex7_d4):
    g = hex7_d4[2]
    far = metric.inner_uniform_curve(g, 0.0, math.pi).C_euc
    near = metric.inner_uniform_curve(g, 0.0, 0.3).C_euc
    assert near <= 2 * far
