import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from carrier_lab import generators, potential, walk
from carrier_lab.errors import EmptyLiveSet, PolesTooClose
from carrier_lab.graph import build


def path_graph(k, weights=None):
    w = weights or [1.0] * k
    return build([(float(i), 0.0) for i in range(k + 1)], [(i, i + 1, w[i]) for i in range(k)])


def weighted_delaunay(n, seed):
    rng = np.random.default_rng(seed)
    g0 = generators.generate_delaunay(n, seed)
    w = rng.uniform(0.5, 2.0, size=g0.m)
    return build(g0.pos, [(int(u), int(v), float(x)) for (u, v), x in zip(g0.edges, w)])


def dense_matrices(g):
    A = np.zeros((g.n, g.n))
    A[g.edges[:, 0], g.edges[:, 1]] = g.weights
    A[g.edges[:, 1], g.edges[:, 0]] = g.weights
    return A, A.sum(1)


def dense_green(g, live):
    """Expected visit counts ``(I - P_live)^-1`` by dense inversion."""
    A, w = dense_matrices(g)
    P = (A / w[:, None])[np.ix_(live, live)]
    return np.linalg.inv(np.eye(len(live)) - P)


def dense_resistance(g, a, z):
    A, w = dense_matrices(g)
    Lp = np.linalg.pinv(np.diag(w) - A)
    e = np.zeros(g.n)
    e[a], e[z] = 1, -1
    return float(e @ Lp @ e)


@pytest.fixture(scope="module")
def network():
    g = weighted_delaunay(120, 8)
    live = np.setdiff1d(np.arange(g.n), g.boundary_vertices)
    return g, live, potential.AbsorbingSystem(g, live)


@pytest.fixture(scope="module")
def hex_ex(hex7_d6):
    return potential.exhaust(hex7_d6[2], 0.05)


def test_path_green_values():
    sysm = potential.AbsorbingSystem(path_graph(3), [1, 2])
    G = sysm.expand(sysm.green_live(1))
    assert G[1] == pytest.approx(4 / 3, rel=1e-14)
    assert G[2] == pytest.approx(2 / 3, rel=1e-14)
    assert G[0] == G[3] == 0.0


def test_single_live_vertex():
    sysm = potential.AbsorbingSystem(path_graph(2), [1])
    assert sysm.green_live(1)[0] == pytest.approx(1.0)


def test_green_matches_dense(network):
    g, live, sysm = network
    G = dense_green(g, live)
    for k in (0, 7, 31, len(live) - 1):
        col = sysm.green_live(int(live[k]))
        assert np.abs(col - G[:, k]).max() <= 1e-8 * np.abs(G[:, k]).max()


def test_martin_matches_dense(network):
    g, live, sysm = network
    G = dense_green(g, live)
    ex = potential.Exhaustion(g, 0.0, live, np.asarray(g.boundary_vertices), sysm)
    x0 = int(live[0])
    for k in (3, 17):
        m = potential.martin_kernel(ex, x0, int(live[k])).values[live]
        ref = G[:, k] / G[0, k]
        assert np.abs(m - ref).max() <= 1e-8 * np.abs(ref).max()


def test_martin_at_root_pole(network):
    g, live, sysm = network
    ex = potential.Exhaustion(g, 0.0, live, np.asarray(g.boundary_vertices), sysm)
    x0 = int(live[4])
    col = potential.green(ex, x0).values
    assert np.allclose(potential.martin_kernel(ex, x0, x0).values, col / col[x0], rtol=1e-14)


def test_weighted_reversibility(network):
    g, live, sysm = network
    ys = live[[2, 9, 40]]
    cols = {int(y): sysm.expand(sysm.green_live(int(y))) for y in ys}
    w = g.vertex_weight
    for a in ys:
        for b in ys:
            lhs, rhs = w[a] * cols[int(b)][a], w[b] * cols[int(a)][b]
            assert abs(lhs - rhs) <= 1e-10 * max(lhs, rhs)


def test_exit_distribution_is_probability(network):
    g, live, sysm = network
    d = sysm.exit_distribution(int(live[5]))
    assert d.sum() == pytest.approx(1.0, abs=1e-12)
    assert (d >= -1e-15).all()
    assert d[live].max() == 0.0


def test_exhaustion_limits(hex7_d4):
    g = hex7_d4[2]
    ex = potential.exhaust(g, 1e-9)
    assert set(ex.live.tolist()) == set(range(g.n)) - set(g.boundary_vertices.tolist())
    r = np.hypot(*g.pos.T)
    closest = np.sort(r)[0]
    with pytest.raises(EmptyLiveSet):
        potential.exhaust(g, 1 - closest + 1e-3)


def test_exhaustion_shrinks_and_connects():
    t = generators.generate_hyperbolic(7, 5)
    from carrier_lab import packing

    g = packing.to_embedded_graph(packing.pack_maximal(t), t)
    ex = potential.exhaust(g, 0.2)
    assert 0 < len(ex.live) < len(t.interior)


def test_constant_martin_sequence(hex7_d6):
    g = hex7_d6[2]
    ex = potential.exhaust(g, 0.05)
    rep = potential.martin_convergence([ex, ex, ex, ex], potential.root_vertex(g), 0.3)
    assert rep.successive == [0.0, 0.0, 0.0]


def test_dirichlet_constant(hex_ex):
    h = potential.dirichlet_solve(hex_ex, np.ones(hex_ex.base.n))
    assert np.abs(h - 1).max() < 1e-12


def test_dirichlet_hitting_probability_mc(network):
    g, live, sysm = network
    target = int(g.boundary_vertices[3])
    data = np.zeros(g.n)
    data[target] = 1.0
    h = sysm.dirichlet(data)
    start = int(live[np.argmin(np.hypot(*(g.pos[live] - g.pos[target]).T))])
    stop = np.ones(g.n, dtype=bool)
    stop[live] = False
    final, *_ = walk.run_batch(g, start, stop, walk.WalkConfig(seed=2, samples=50_000))
    p, ci = walk.proportion(final == target)
    assert abs(p - h[start]) <= 2 * ci


@given(st.lists(st.floats(-5, 5), min_size=200, max_size=200))
def test_maximum_principle(network, data):
    g, live, sysm = network
    vals = np.zeros(g.n)
    bd = np.setdiff1d(np.arange(g.n), live)
    vals[bd] = np.resize(np.array(data), len(bd))
    h = sysm.dirichlet(vals)
    lo, hi = vals[bd].min(), vals[bd].max()
    assert h[live].min() >= lo - 1e-10 and h[live].max() <= hi + 1e-10
    assert sysm.harmonicity_residual(h) <= 1e-10 * max(1.0, abs(lo), abs(hi))


def test_harmonic_check_constant(hex_ex):
    hc = potential.harmonic_extension_check(hex_ex, lambda th: np.full(np.shape(th), 0.7),
                                            walk.WalkConfig(seed=1, samples=2000))
    assert hc.solve[0] == pytest.approx(0.7, abs=1e-12)
    assert hc.monte_carlo[0] == pytest.approx(0.7, abs=1e-15)


def test_harmonic_check_half_circle_symmetry():
    g = generators.triangular_lattice(8, 0.11)
    ex = potential.exhaust(g, 0.05)

    def left_half(th):
        c = np.cos(th)
        return np.where(np.abs(c) < 1e-9, 0.5, (c < 0).astype(float))

    hc = potential.harmonic_extension_check(ex, left_half, walk.WalkConfig(seed=3, samples=20_000), [0])
    assert hc.solve[0] == pytest.approx(0.5, abs=1e-12)
    assert abs(hc.monte_carlo[0] - 0.5) <= 2 * hc.ci[0]


def test_triangle_resistance(tri3):
    assert potential.effective_resistance(tri3, [0], [1]).value == pytest.approx(2 / 3)


@pytest.mark.parametrize("k", [1, 2, 5, 9])
def test_series_path(k):
    assert potential.effective_resistance(path_graph(k), [0], [k]).value == pytest.approx(k)


def test_resistance_matches_pseudoinverse():
    g = weighted_delaunay(90, 4)
    rng = np.random.default_rng(1)
    for _ in range(5):
        a, z = rng.choice(g.n, size=2, replace=False)
        val = potential.effective_resistance(g, [int(a)], [int(z)]).value
        assert val == pytest.approx(dense_resistance(g, a, z), rel=1e-9)


@given(st.integers(0, 10_000), st.floats(1.0, 5.0))
def test_rayleigh_monotonicity(e, factor):
    g = weighted_delaunay(40, 5)
    e %= g.m
    w = g.weights.copy()
    w[e] *= factor
    h = build(g.pos, [(int(u), int(v), float(x)) for (u, v), x in zip(g.edges, w)])
    a, z = 0, g.n - 1
    assert potential.effective_resistance(h, [a], [z]).value <= potential.effective_resistance(g, [a], [z]).value + 1e-12


def test_shorting_gives_lower_bound():
    g = weighted_delaunay(80, 6)
    r = np.hypot(*(g.pos - g.pos[0]).T)
    groups = [np.flatnonzero((r > lo) & (r <= lo + 0.1)) for lo in np.arange(0.1, 0.6, 0.2)]
    Z = np.flatnonzero(r > 0.8)
    full = potential.effective_resistance(g, [0], Z).value
    assert potential.contracted_resistance(g, groups, [0], Z) <= full + 1e-12


def test_annulus_bounds(hex7_d6):
    ex = potential.exhaust(hex7_d6[2], 0.01)
    for xi in (0.0, 2.0):
        R, low = potential.resistance_annulus_bound(ex, xi, 0.1)
        assert R >= low > 0
    lg = potential.resistance_log_growth(ex, 0.5, 0.06)
    assert lg.nondecreasing


def test_harnack_constant_function(hex7_d4):
    g = hex7_d4[2]
    assert potential.harnack_ratio(g, 0, 0.2, np.full(g.n, 3.0)) == pytest.approx(1.0)


def test_green_harnack_bounded(hex_ex):
    ratio, pole = potential.green_harnack_max(hex_ex, 0, 0.1)
    assert 1 <= ratio < 10
    assert hex_ex.live_mask[pole]


def test_boundary_harnack_same_pole(hex7_d6):
    ex = potential.exhaust(hex7_d6[2], 0.02)
    x0 = potential.root_vertex(ex.base)
    assert potential.boundary_harnack_ratio(ex, 0.0, 0.1, x0=x0, x=x0) == pytest.approx(1.0)


def test_boundary_harnack_swap(hex7_d6):
    ex = potential.exhaust(hex7_d6[2], 0.02)
    x0 = potential.root_vertex(ex.base)
    x = potential.nearest_live(ex, math.pi / 2, 40)
    a = potential.boundary_harnack_ratio(ex, 0.0, 0.1, x0=x0, x=x)
    b = potential.boundary_harnack_ratio(ex, 0.0, 0.1, x0=x, x=x0)
    assert a == pytest.approx(b, rel=1e-12)


def test_boundary_harnack_pole_guard(hex_ex):
    near = potential.nearest_live(hex_ex, 0.0)
    with pytest.raises(PolesTooClose):
        potential.boundary_harnack_ratio(hex_ex, 0.0, 0.1, x=near)
