"""Compare the numba kernels with their numpy fallbacks.

    python3 benchmarks/bench_kernels.py [--samples N] [--repeat R]

The first compiled call is excluded (warm-up); each row reports the best of
``--repeat`` timings and checks that both paths return the same numbers.
"""
import argparse
import time

import numpy as np

from carrier_lab import _kernels, generate_hyperbolic, pack_maximal
from carrier_lab.generators import triangular_lattice
from carrier_lab.walk import transition_table


def best_of(fn, repeat):
    fn()
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def bench_walks(samples, repeat):
    g = triangular_lattice(30, 1.0)
    stop = np.linalg.norm(g.pos, axis=1) >= 25.0
    start = int(np.argmin(np.linalg.norm(g.pos, axis=1)))
    table = transition_table(g)
    keys = _kernels.stream_keys(1, 0, samples)
    cost = np.ones(g.n)
    score = np.zeros(g.n)

    def call(jit):
        return lambda: _kernels.walk_batch(g.adj_ptr, g.adj_idx, table, start, stop, cost, score,
                                           keys, 10**6, jit=jit)
    return call


def bench_radii(depth):
    t = generate_hyperbolic(7, depth)
    tri = np.asarray(t.triangles, dtype=np.int64)
    interior = t.interior
    k_deg = np.array([t.degree(v) for v in interior], dtype=float)
    target = np.sin(np.pi / k_deg)
    s = np.zeros(t.n)
    s[interior] = 0.5

    def call(jit):
        return lambda: _kernels.unm_sweeps(s, tri, interior, k_deg, target, 2000, 0.0, jit=jit)
    return call


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--samples", type=int, default=20000)
    ap.add_argument("--depth", type=int, default=5)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if not _kernels.HAVE_NUMBA:
        raise SystemExit("numba is unavailable (or CARRIER_LAB_NO_JIT is set); nothing to compare")

    rows = []
    for name, make in ((f"walk_batch ({args.samples} walks)", bench_walks(args.samples, args.repeat)),
                       (f"unm_sweeps (depth {args.depth}, 2000 sweeps)", bench_radii(args.depth))):
        t_np, out_np = best_of(make(False), args.repeat)
        t_jit, out_jit = best_of(make(True), args.repeat)
        same = all(np.allclose(a, b, rtol=1e-12, atol=1e-12) for a, b in zip(out_np, out_jit))
        rows.append((name, t_np, t_jit, same))

    print(f"{'kernel':<40}{'numpy s':>10}{'numba s':>10}{'speedup':>9}  agree")
    for name, t_np, t_jit, same in rows:
        print(f"{name:<40}{t_np:>10.4f}{t_jit:>10.4f}{t_np / t_jit:>8.1f}x  {same}")


if __name__ == "__main__":
    main()
