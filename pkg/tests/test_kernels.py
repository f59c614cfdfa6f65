import numpy as np
import pytest

from carrier_lab import _kernels, generators, walk

needs_numba = pytest.mark.skipif(not _kernels.HAVE_NUMBA, reason="numba not installed")


def test_uniforms_in_unit_interval():
    keys = _kernels.stream_keys(5, 0, 1000)
    u = np.array([_kernels.uniforms_np(keys, np.uint64(c)) for c in range(20)])
    assert (u >= 0).all() and (u < 1).all()
    assert abs(u.mean() - 0.5) < 0.01


def test_stream_keys_depend_on_seed_and_index():
    a = _kernels.stream_keys(1, 0, 10)
    assert len(set(a.tolist())) == 10
    assert not np.array_equal(a, _kernels.stream_keys(2, 0, 10))
    assert np.array_equal(a[5:], _kernels.stream_keys(1, 5, 5))


@needs_numba
def test_walk_paths_identical():
    g = generators.triangular_lattice(8)
    stop = np.hypot(*g.pos.T) > 5
    cost = np.hypot(*g.pos.T)
    outs = [walk.run_batch(g, 0, stop, walk.WalkConfig(seed=4, samples=3000, jit=j), cost=cost, score=cost)
            for j in (True, False)]
    for a, b in zip(*outs):
        assert np.array_equal(a, b)


@needs_numba
def test_walk_truncation_identical():
    g = generators.triangular_lattice(8)
    stop = np.hypot(*g.pos.T) > 7
    outs = [walk.run_batch(g, 0, stop, walk.WalkConfig(seed=1, samples=500, max_steps=20, jit=j))
            for j in (True, False)]
    assert outs[0][4].any()
    for a, b in zip(*outs):
        assert np.array_equal(a, b)


@needs_numba
def test_radius_sweeps_agree():
    t = generators.generate_hyperbolic(7, 3)
    tri = np.asarray(t.triangles, dtype=np.int64)
    interior = t.interior
    k = np.array([t.degree(v) for v in interior], dtype=float)
    s = np.zeros(t.n)
    s[interior] = 0.5
    args = (s, tri, interior, k, np.sin(np.pi / k), 200, 1e-6)
    sj, nj, rj = _kernels.unm_sweeps(*args, jit=True)
    sn, nn, rn = _kernels.unm_sweeps(*args, jit=False)
    assert nj == nn
    assert np.allclose(sj, sn, rtol=1e-12, atol=1e-14)
    assert np.allclose(_kernels.angle_sums(sj, tri, t.n, jit=True), _kernels.angle_sums(sj, tri, t.n, jit=False))
