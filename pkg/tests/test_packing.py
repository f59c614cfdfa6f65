import math

import numpy as np
import pytest
from scipy.optimize import brentq

from carrier_lab import generators, goodness, packing


def k4_oracle():
    """Radii from the symmetric tangency equations, solved numerically."""
    # three equal circles tangent to each other and internally tangent to the unit circle
    rho = brentq(lambda r: (1 - r) * math.sqrt(3) - 2 * r, 1e-6, 0.999)
    return rho, (1 - rho) - rho


def test_k4_closed_form(k4):
    _, p = k4
    rho, rc = k4_oracle()
    assert rho == pytest.approx(2 * math.sqrt(3) - 3, abs=1e-12)
    assert rc == pytest.approx(7 - 4 * math.sqrt(3), abs=1e-12)
    assert np.abs(p.radius[1:] - rho).max() < 1e-8
    assert abs(p.radius[0] - rc) < 1e-8
    assert np.hypot(*p.center[0]) < 1e-12


def test_wheel_symmetry():
    t = generators.generate_hyperbolic(7, 1)
    p = packing.pack_maximal(t)
    b = p.radius[list(t.boundary)]
    assert np.ptp(b) < 1e-10
    assert packing.angle_sum(t, p.radius, 0) == pytest.approx(2 * math.pi, abs=1e-9)
    assert packing.ring_constant(p, t).boundary == pytest.approx(1.0, abs=1e-10)


def test_k4_ring_ratio(k4):
    t, p = k4
    rho, rc = k4_oracle()
    assert packing.ring_constant(p, t).overall == pytest.approx(rho / rc, rel=1e-8)


def test_depth_four_residuals(hex7_d4):
    _, p, _ = hex7_d4
    assert p.angle_residual <= 1e-9
    assert p.tangency_residual <= 1e-8
    assert p.boundary_residual <= 1e-8


def test_angle_sum_equal_radii():
    assert packing.angle_sum(generators.wheel(6), np.ones(7), 0) == pytest.approx(2 * math.pi)
    assert packing.angle_sum(generators.wheel(7), np.ones(8), 0) == pytest.approx(7 * math.pi / 3)


def test_angle_sum_random_radii():
    t = generators.wheel(5)
    r = np.random.default_rng(0).uniform(0.2, 2.0, size=6)
    total = 0.0
    fl = t.flower(0)
    for a, b in zip(fl, fl[1:] + fl[:1]):
        x, y, z = r[0] + r[a], r[0] + r[b], r[a] + r[b]
        total += math.acos((x * x + y * y - z * z) / (2 * x * y))
    assert packing.angle_sum(t, r, 0) == pytest.approx(total, rel=1e-13)


def test_embedded_k4(k4):
    t, p = k4
    g = packing.to_embedded_graph(p, t)
    # V - E + F = 2 gives four faces, one of them the outer one
    assert len(g.faces) == 4
    assert len(g.bounded_faces) == 3


def test_embedded_depth_four_is_good(hex7_d4):
    rep = goodness.validate_tightest(hex7_d4[2])
    assert rep.passed


def test_ring_interior_constant_finite(hex7_d4):
    t, p, _ = hex7_d4
    assert math.isfinite(packing.ring_constant(p, t).interior)
