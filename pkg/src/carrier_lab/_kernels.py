"""Hot inner loops: radius iteration and random-walk batches.

Every kernel has a numba implementation and a pure-numpy one computing the
same thing. Set ``CARRIER_LAB_NO_JIT=1`` to force the numpy path (useful when
numba is missing or for debugging); both paths draw identical random numbers.
"""
from __future__ import annotations

import os
import warnings

import numpy as np

_DISABLED = os.environ.get("CARRIER_LAB_NO_JIT", "").lower() in ("1", "true", "yes")

try:
    if _DISABLED:
        raise ImportError
    import numba
    from numba import njit, prange

    HAVE_NUMBA = True
    # an outdated system TBB only means numba picks another threading layer
    warnings.filterwarnings("ignore", message="The TBB threading layer")
except ImportError:  # pragma: no cover - exercised via the env flag
    HAVE_NUMBA = False

USE_JIT = HAVE_NUMBA

GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_S30, _S27, _S31, _S11 = np.uint64(30), np.uint64(27), np.uint64(31), np.uint64(11)
_INV53 = 1.0 / 9007199254740992.0


def set_threads(n: int | None) -> None:
    if USE_JIT and n:
        numba.set_num_threads(max(1, min(int(n), numba.config.NUMBA_NUM_THREADS)))


# --------------------------------------------------------------------------
# counter-based random numbers (splitmix64 finaliser over (key, counter))
# --------------------------------------------------------------------------

def _mix_np(z):
    z = (z ^ (z >> _S30)) * _M1
    z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


def stream_keys(seed: int, first: int, count: int) -> np.ndarray:
    """Per-sample stream keys; sample ``i`` depends only on ``(seed, i)``."""
    idx = np.arange(first, first + count, dtype=np.uint64)
    s = np.uint64(seed & 0xFFFFFFFFFFFFFFFF)
    with np.errstate(over="ignore"):
        return _mix_np(s ^ _mix_np(idx * GOLDEN + GOLDEN))


def uniforms_np(keys, ctr):
    """k-th uniform in [0,1) of each stream; ``ctr`` is a scalar or array."""
    c = np.asarray(ctr, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = _mix_np(keys + (c + np.uint64(1)) * GOLDEN)
    return (z >> _S11).astype(np.float64) * _INV53


# --------------------------------------------------------------------------
# hyperbolic triangle angles in s-radii (s = exp(-h); horocycle s = 0)
# --------------------------------------------------------------------------

def tri_angle_np(s0, s1, s2):
    """Angle at the first circle of a triple of mutually tangent circles."""
    a, b, c = s0 * s0, s1 * s1, s2 * s2
    q = a * (1 - b) * (1 - c) / ((1 - a * b) * (1 - a * c))
    return 2.0 * np.arcsin(np.sqrt(np.clip(q, 0.0, 1.0)))


def angle_sums_np(s, tri, n):
    out = np.zeros(n)
    s0, s1, s2 = s[tri[:, 0]], s[tri[:, 1]], s[tri[:, 2]]
    np.add.at(out, tri[:, 0], tri_angle_np(s0, s1, s2))
    np.add.at(out, tri[:, 1], tri_angle_np(s1, s2, s0))
    np.add.at(out, tri[:, 2], tri_angle_np(s2, s0, s1))
    return out


def unm_sweeps_np(s, tri, interior, k_deg, target_t, sweeps, tol):
    """Jacobi uniform-neighbour updates; returns (s, sweeps_done, residual)."""
    s = s.copy()
    n = len(s)
    res = np.inf
    done = 0
    for it in range(sweeps):
        theta = angle_sums_np(s, tri, n)[interior]
        res = float(np.max(np.abs(theta - 2 * np.pi)))
        if res <= tol:
            return s, done, res
        s0 = s[interior]
        t = np.sin(theta / (2 * k_deg))
        sb2 = np.clip((s0 - t) / (s0 * (1 - t * s0)), 0.0, 1.0)
        tp = target_t
        s[interior] = 2 * tp / ((1 - sb2) + np.sqrt((1 - sb2) ** 2 + 4 * tp * tp * sb2))
        done += 1
    theta = angle_sums_np(s, tri, n)[interior]
    res = float(np.max(np.abs(theta - 2 * np.pi)))
    return s, done, res


# --------------------------------------------------------------------------
# random walks
# --------------------------------------------------------------------------

def walk_batch_np(indptr, indices, cumprob, start, stop, cost, score, keys, max_steps):
    n = len(keys)
    v = np.full(n, start, dtype=np.int64)
    total = np.full(n, cost[start], dtype=np.float64)
    best = np.full(n, score[start], dtype=np.float64)
    steps = np.zeros(n, dtype=np.int64)
    active = ~stop[v]
    maxdeg = int(np.max(np.diff(indptr))) if len(indptr) > 1 else 0
    while active.any():
        idx = np.flatnonzero(active)
        u = uniforms_np(keys[idx], steps[idx])
        cur = v[idx]
        j = indptr[cur].copy()
        hi = indptr[cur + 1]
        for _ in range(maxdeg):
            adv = (j < hi - 1) & (cumprob[j] < u)
            if not adv.any():
                break
            j[adv] += 1
        nv = indices[j]
        v[idx] = nv
        total[idx] += cost[nv]
        best[idx] = np.minimum(best[idx], score[nv])
        steps[idx] += 1
        active[idx] = ~stop[nv] & (steps[idx] < max_steps)
    trunc = ~stop[v]
    return v, steps, total, best, trunc


if HAVE_NUMBA:

    @njit(cache=True)
    def _mix(z):
        z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
        return z ^ (z >> np.uint64(31))

    @njit(cache=True)
    def _uniform(key, ctr):
        z = _mix(key + (np.uint64(ctr) + np.uint64(1)) * np.uint64(0x9E3779B97F4A7C15))
        return np.float64(z >> np.uint64(11)) * (1.0 / 9007199254740992.0)

    @njit(parallel=True, cache=True)
    def _walk_batch_jit(indptr, indices, cumprob, start, stop, cost, score, keys, max_steps,
                        final, steps, total, best):
        for i in prange(len(keys)):
            key = keys[i]
            v = start
            acc = cost[v]
            low = score[v]
            k = 0
            while (not stop[v]) and k < max_steps:
                u = _uniform(key, k)
                j = indptr[v]
                hi = indptr[v + 1]
                while j < hi - 1 and cumprob[j] < u:
                    j += 1
                v = indices[j]
                acc += cost[v]
                if score[v] < low:
                    low = score[v]
                k += 1
            final[i] = v
            steps[i] = k
            total[i] = acc
            best[i] = low

    @njit(cache=True)
    def _tri_angle(s0, s1, s2):
        a = s0 * s0
        b = s1 * s1
        c = s2 * s2
        q = a * (1 - b) * (1 - c) / ((1 - a * b) * (1 - a * c))
        if q < 0.0:
            q = 0.0
        elif q > 1.0:
            q = 1.0
        return 2.0 * np.arcsin(np.sqrt(q))

    @njit(cache=True)
    def _angle_sums_jit(s, tri, n):
        out = np.zeros(n)
        for k in range(tri.shape[0]):
            a, b, c = tri[k, 0], tri[k, 1], tri[k, 2]
            out[a] += _tri_angle(s[a], s[b], s[c])
            out[b] += _tri_angle(s[b], s[c], s[a])
            out[c] += _tri_angle(s[c], s[a], s[b])
        return out

    @njit(cache=True)
    def _unm_sweeps_jit(s, tri, interior, k_deg, target_t, sweeps, tol):
        s = s.copy()
        n = len(s)
        res = np.inf
        done = 0
        for it in range(sweeps):
            theta = _angle_sums_jit(s, tri, n)
            res = 0.0
            for idx in range(len(interior)):
                d = abs(theta[interior[idx]] - 2 * np.pi)
                if d > res:
                    res = d
            if res <= tol:
                return s, done, res
            new = np.empty(len(interior))
            for idx in range(len(interior)):
                v = interior[idx]
                s0 = s[v]
                t = np.sin(theta[v] / (2 * k_deg[idx]))
                sb2 = (s0 - t) / (s0 * (1 - t * s0))
                sb2 = min(max(sb2, 0.0), 1.0)
                tp = target_t[idx]
                new[idx] = 2 * tp / ((1 - sb2) + np.sqrt((1 - sb2) ** 2 + 4 * tp * tp * sb2))
            for idx in range(len(interior)):
                s[interior[idx]] = new[idx]
            done += 1
        theta = _angle_sums_jit(s, tri, n)
        res = 0.0
        for idx in range(len(interior)):
            d = abs(theta[interior[idx]] - 2 * np.pi)
            if d > res:
                res = d
        return s, done, res


def _use(jit):
    return USE_JIT if jit is None else (jit and HAVE_NUMBA)


def angle_sums(s, tri, n, jit=None):
    if _use(jit):
        return _angle_sums_jit(np.ascontiguousarray(s, dtype=np.float64), np.ascontiguousarray(tri, dtype=np.int64), n)
    return angle_sums_np(s, tri, n)


def unm_sweeps(s, tri, interior, k_deg, target_t, sweeps, tol, jit=None):
    if _use(jit):
        return _unm_sweeps_jit(np.asarray(s, dtype=np.float64), np.asarray(tri, dtype=np.int64),
                               np.asarray(interior, dtype=np.int64), np.asarray(k_deg, dtype=np.float64),
                               np.asarray(target_t, dtype=np.float64), int(sweeps), float(tol))
    return unm_sweeps_np(s, tri, interior, k_deg, target_t, sweeps, tol)


def walk_batch(indptr, indices, cumprob, start, stop, cost, score, keys, max_steps, jit=None):
    """Run ``len(keys)`` walks from ``start`` until ``stop[v]`` or ``max_steps``.

    Returns ``(final, steps, cost_sum, min_score, truncated)``; ``cost_sum``
    and ``min_score`` include both the start and the final vertex.
    """
    if _use(jit):
        n = len(keys)
        final = np.empty(n, dtype=np.int64)
        steps = np.empty(n, dtype=np.int64)
        total = np.empty(n)
        best = np.empty(n)
        _walk_batch_jit(indptr, indices, cumprob, np.int64(start), stop, cost, score, keys,
                        np.int64(max_steps), final, steps, total, best)
        return final, steps, total, best, ~stop[final]
    return walk_batch_np(indptr, indices, cumprob, int(start), stop, cost, score, keys, int(max_steps))
