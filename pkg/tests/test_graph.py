import math

import numpy as np
import pytest

from carrier_lab import generators, packing
from carrier_lab.errors import DuplicatePosition, EdgeCrossing
from carrier_lab.graph import (build, euclidean_ball_vertices, graph_distances, induced_edges,
                               segment_distance, vertex_boundary)


def euler_faces(g):
    return 2 - g.n + g.m


def test_tri3_has_one_bounded_face(tri3):
    assert len(tri3.faces) == 2
    assert len(tri3.bounded_faces) == 1
    assert tri3.bounded_faces[0].area == pytest.approx(math.sqrt(3) / 4, rel=1e-12)


def test_crossing_chord_rejected():
    pos = [(0, 0), (1, 0), (0.5, math.sqrt(3) / 2), (0.5, -0.5)]
    edges = [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0), (2, 3, 1.0)]
    with pytest.raises(EdgeCrossing):
        build(pos, edges)


def test_duplicate_position_rejected():
    with pytest.raises(DuplicatePosition):
        build([(0, 0), (0, 0), (1, 0)], [(0, 2, 1.0), (1, 2, 1.0)])


def test_grid_faces_match_euler(grid3):
    assert len(grid3.faces) == euler_faces(grid3) == 5
    for f in grid3.bounded_faces:
        assert f.area == pytest.approx(1.0)
        assert f.diameter == pytest.approx(math.sqrt(2))


@pytest.mark.parametrize("depth", [2, 3])
def test_hyperbolic_faces_match_euler(depth):
    t = generators.generate_hyperbolic(7, depth)
    g = packing.to_embedded_graph(packing.pack_maximal(t), t)
    assert len(g.faces) == euler_faces(g)


def test_outer_face_is_unbounded(grid3):
    outer = grid3.outer_face
    assert not outer.bounded
    assert set(outer.boundary) == {0, 1, 2, 3, 5, 6, 7, 8}


def test_isolation_radius_trivial_cases(tri3, grid3):
    assert np.allclose(tri3.isolation_radii, 1.0)
    assert grid3.isolation_radii[0] == pytest.approx(1.0)


def test_isolation_radius_matches_scan(hex7_d4):
    g = hex7_d4[2]
    rng = np.random.default_rng(3)
    for u in rng.choice(g.n, size=20, replace=False):
        d = np.hypot(*(g.pos - g.pos[u]).T)
        d[u] = np.inf
        assert g.isolation_radii[u] == pytest.approx(d.min(), rel=1e-14)


def test_euclidean_ball(tri3, grid3):
    assert list(euclidean_ball_vertices(tri3, (0, 0), 0.5)) == [0]
    assert sorted(euclidean_ball_vertices(tri3, (0, 0), 1.0)) == [0, 1, 2]
    assert sorted(euclidean_ball_vertices(grid3, (1, 1), 1.0)) == [1, 3, 4, 5, 7]


def test_vertex_boundary(grid3, hex7_d4):
    assert len(vertex_boundary(grid3, np.arange(9))) == 0
    assert sorted(vertex_boundary(grid3, [4])) == [1, 3, 5, 7]
    g = hex7_d4[2]
    S = set(euclidean_ball_vertices(g, (0.1, 0.0), 0.5).tolist())
    scan = {int(b) for u, v in g.edges for a, b in ((u, v), (v, u)) if a in S and b not in S}
    assert set(vertex_boundary(g, sorted(S)).tolist()) == scan


def test_induced_edges(grid3):
    assert len(induced_edges(grid3, [0, 1, 3, 4])) == 4


def test_segment_distance():
    assert segment_distance(np.array([0.0, 0.0]), np.array([1.0, 0.0]),
                            np.array([0.0, 1.0]), np.array([1.0, 1.0])) == pytest.approx(1.0)
    assert segment_distance(np.array([0.0, 0.0]), np.array([1.0, 1.0]),
                            np.array([0.0, 1.0]), np.array([1.0, 0.0])) == 0.0


def test_hop_distances(grid3):
    assert list(graph_distances(grid3, [0])) == [0, 1, 2, 1, 2, 3, 2, 3, 4]


def test_carrier_contains_disc(grid3):
    assert grid3.carrier_contains_disc((1, 1), 1.0)
    assert not grid3.carrier_contains_disc((1, 1), 1.01)
