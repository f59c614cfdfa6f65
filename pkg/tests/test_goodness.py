import math

import numpy as np
import pytest

from carrier_lab import goodness, packing
from carrier_lab.graph import build


def angle_oracle(g):
    """Largest inner angle over bounded faces, via arccos of normalised edge vectors."""
    worst = 0.0
    for f in g.bounded_faces:
        cyc = list(f.boundary)
        k = len(cyc)
        for i in range(k):
            p, a, b = g.pos[cyc[i]], g.pos[cyc[(i + 1) % k]], g.pos[cyc[i - 1]]
            u, v = a - p, b - p
            worst = max(worst, math.acos(np.clip(u @ v / np.hypot(*u) / np.hypot(*v), -1, 1)))
    return worst


def ratio_oracle(g):
    worst = 1.0
    for v in range(g.n):
        L = [math.dist(g.pos[v], g.pos[w]) for w in g.neighbors(v)]
        if len(L) > 1:
            worst = max(worst, max(L) / min(L))
    return worst


def test_tightest_trivial(tri3, grid3):
    assert goodness.tightest_parameters(tri3) == pytest.approx((1.0, 2 * math.pi / 3))
    assert goodness.tightest_parameters(grid3) == pytest.approx((1.0, math.pi / 2))


def test_tightest_matches_scan(hex7_d4):
    g = hex7_d4[2]
    D, eta = goodness.tightest_parameters(g)
    assert D == pytest.approx(ratio_oracle(g), rel=1e-12)
    assert eta == pytest.approx(math.pi - angle_oracle(g), rel=1e-10)


def test_validate_equilateral(tri3):
    assert goodness.validate(tri3, 2.0, math.pi / 3).passed
    assert goodness.validate(tri3, 2.0, 0.6 * math.pi).passed
    rep = goodness.validate(tri3, 2.0, 0.7 * math.pi)
    assert not rep.passed
    assert rep.violations[0][0] == "angle"


def test_validate_ratio_witness():
    g = build([(0, 0), (1, 0), (10, 0.1)], [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)])
    rep = goodness.validate(g, 2.0, 0.01)
    ratios = [w for k, w in rep.violations if k == "ratio"]
    assert ratios
    assert max(w[-1] for w in ratios) == pytest.approx(math.hypot(10, 0.1), rel=1e-12)


def test_min_adjacent_angle(tri3, grid3, hex7_d4):
    assert goodness.min_adjacent_angle(tri3) == pytest.approx(math.pi / 3)
    assert goodness.min_adjacent_angle(grid3) == pytest.approx(math.pi / 2)
    g = hex7_d4[2]
    D, eta = goodness.tightest_parameters(g)
    assert goodness.min_adjacent_angle(g) >= math.sin(eta / 2) / D


def test_sausage_constant(tri3, grid3, hex7_d3):
    assert goodness.sausage_constant(tri3) == math.inf
    assert goodness.sausage_constant(grid3) == pytest.approx(1.0)
    g = hex7_d3[2]
    fast = goodness.sausage_constant(g)
    assert fast > 0
    assert fast == pytest.approx(goodness.sausage_constant_bruteforce(g), rel=1e-12)


def test_face_diameter_constant(tri3, grid3):
    assert goodness.face_diameter_constant(tri3) == pytest.approx((1.0, 4 / math.sqrt(3)))
    assert goodness.face_diameter_constant(grid3) == pytest.approx((math.sqrt(2), 1.0))


def test_face_constants_stable_across_depths():
    from carrier_lab import generators

    vals = []
    for depth in (2, 3, 4):
        t = generators.generate_hyperbolic(7, depth)
        vals.append(goodness.face_diameter_constant(packing.to_embedded_graph(packing.pack_maximal(t), t)))
    vals = np.array(vals)
    assert np.isfinite(vals).all()
    assert vals.max(0).max() / vals.min(0).min() < 10


def test_report_serialises(hex7_d3):
    d = goodness.validate_tightest(hex7_d3[2]).to_dict()
    assert d["passed"] and d["violations"] == []
