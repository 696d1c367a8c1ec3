"""Hot numeric kernels with two interchangeable backends.

Backend selection is by the environment variable CMLOOPS_BACKEND:

* ``numba``: compile the per-replicate loops with numba @njit (cached);
* ``numpy``: no numba import; the pairing walk runs as a scalar loop and the
  edge-count reduction is vectorized numpy over the whole batch;
* unset/``auto``: numba if importable, else numpy.

Both backends execute the same sampling algorithm (sequential pairing: the
lowest unmatched half-edge is paired with a uniform choice among the remaining
ones) on the same per-replicate uniforms, so for a fixed seed they produce
byte-identical statistics.  Exactness note: enumeration kernels count in
int64; every count is bounded by 15!! = 2,027,025 and every sum by a small
multiple of it, so int64 arithmetic is exact.
"""

from __future__ import annotations

import os

import numpy as np

_env = os.environ.get("CMLOOPS_BACKEND", "").strip().lower()
if _env in ("", "auto"):
    try:
        import numba  # noqa: F401

        BACKEND = "numba"
    except ImportError:
        BACKEND = "numpy"
elif _env == "numba":
    import numba  # noqa: F401

    BACKEND = "numba"
elif _env == "numpy":
    BACKEND = "numpy"
else:
    raise ValueError(
        f"CMLOOPS_BACKEND={_env!r} not understood; use 'numba', 'numpy', or 'auto'"
    )


def current_backend() -> str:
    return BACKEND


if BACKEND == "numba":
    from numba import njit

    _jit = njit(cache=True, nogil=True)
else:

    def _jit(fn):
        return fn


# ---------------------------------------------------------------------------
# sampling cores (shared verbatim by both backends)
# ---------------------------------------------------------------------------


@_jit
def _pair_sequential(u, pool, pos, partner):
    """Sequential pairing of ell half-edges using ell/2 uniforms from u.

    Repeatedly takes the lowest unmatched half-edge and pairs it with a
    uniform choice among the remaining unmatched ones (swap-removal pool,
    O(ell) total).  partner[i] = j <-> partner[j] = i.
    """
    ell = partner.shape[0]
    for t in range(ell):
        pool[t] = t
        pos[t] = t
        partner[t] = -1
    size = ell
    q = 0
    for i in range(ell):
        if partner[i] >= 0:
            continue
        # remove i itself from the pool
        pi = pos[i]
        last = pool[size - 1]
        pool[pi] = last
        pos[last] = pi
        size -= 1
        # uniform choice among the remaining unmatched half-edges
        k = int(u[q] * size)
        q += 1
        j = pool[k]
        last = pool[size - 1]
        pool[k] = last
        pos[last] = k
        size -= 1
        partner[i] = j
        partner[j] = i


@_jit
def _assign_sequential(u, pool, assign):
    """Uniform bijection: level-side half-edge k gets a uniform unused choice."""
    ell = assign.shape[0]
    for t in range(ell):
        pool[t] = t
    size = ell
    for k in range(ell):
        idx = int(u[k] * size)
        o = pool[idx]
        size -= 1
        pool[idx] = pool[size]
        assign[k] = o


# ---------------------------------------------------------------------------
# per-batch statistics, numba path (row-at-a-time loops)
# ---------------------------------------------------------------------------


@_jit
def _cm_batch_rows(u, vertex_of, n, small, out):
    """Pair each row of uniforms and tally loop/multi-edge statistics.

    out columns: 0=s, 1=m, 2=m_tilde, 3=s_ind, 4=m_ind, 5=removed, 6=m_trunc.
    """
    B = u.shape[0]
    ell = vertex_of.shape[0]
    half = ell // 2
    pool = np.empty(ell, np.int64)
    pos = np.empty(ell, np.int64)
    partner = np.empty(ell, np.int64)
    keys = np.empty(half, np.int64)
    for b in range(B):
        _pair_sequential(u[b], pool, pos, partner)
        q = 0
        for i in range(ell):
            j = partner[i]
            if j > i:
                va = vertex_of[i]
                vb = vertex_of[j]
                if va <= vb:
                    keys[q] = va * n + vb
                else:
                    keys[q] = vb * n + va
                q += 1
        ks = np.sort(keys)
        s = 0
        m = 0
        mt = 0
        si = 0
        mi = 0
        mc = 0
        run = 1
        for k in range(half):
            key = ks[k]
            if k > 0 and key == ks[k - 1]:
                run += 1
            else:
                run = 1
            i2 = key // n
            j2 = key - i2 * n
            if i2 == j2:
                s += 1
                if run == 1:
                    si += 1
            else:
                m += run - 1
                if run == 2:
                    mi += 1
                if run >= 2:
                    mt += 1
                if small[i2] and small[j2]:
                    mc += run - 1
        out[b, 0] = s
        out[b, 1] = m
        out[b, 2] = mt
        out[b, 3] = si
        out[b, 4] = mi
        out[b, 5] = s + mt
        out[b, 6] = mc


@_jit
def _bij_batch_rows(u, v_level, v_choice, ncols, diag_loop, out):
    """Bijection sampling per row; out columns: 0=s, 1=m."""
    B = u.shape[0]
    ell = v_level.shape[0]
    pool = np.empty(ell, np.int64)
    assign = np.empty(ell, np.int64)
    keys = np.empty(ell, np.int64)
    for b in range(B):
        _assign_sequential(u[b], pool, assign)
        s = 0
        q = 0
        for k in range(ell):
            row = v_choice[assign[k]]
            col = v_level[k]
            if diag_loop and row == col:
                s += 1
            else:
                keys[q] = row * ncols + col
                q += 1
        ks = np.sort(keys[:q])
        m = 0
        run = 1
        for k in range(q):
            if k > 0 and ks[k] == ks[k - 1]:
                run += 1
            else:
                run = 1
            m += run - 1
        out[b, 0] = s
        out[b, 1] = m


# ---------------------------------------------------------------------------
# per-batch statistics, numpy path (vectorized reductions)
# ---------------------------------------------------------------------------


def _run_positions(keys):
    """Per-row position-within-run for row-sorted key matrices."""
    B, width = keys.shape
    newrun = np.ones((B, width), dtype=bool)
    newrun[:, 1:] = keys[:, 1:] != keys[:, :-1]
    idx = np.arange(width, dtype=np.int64)
    start = np.maximum.accumulate(np.where(newrun, idx[None, :], 0), axis=1)
    return newrun, idx[None, :] - start


def _cm_batch_numpy(u, vertex_of, n, small):
    B = u.shape[0]
    ell = vertex_of.shape[0]
    half = ell // 2
    partner = np.empty((B, ell), dtype=np.int64)
    pool = np.empty(ell, np.int64)
    pos = np.empty(ell, np.int64)
    for b in range(B):
        _pair_sequential(u[b], pool, pos, partner[b])
    vi = np.broadcast_to(vertex_of[None, :], (B, ell))
    vj = vertex_of[partner]
    lo = np.minimum(vi, vj)
    hi = np.maximum(vi, vj)
    keys_full = lo * np.int64(n) + hi
    mask = partner > np.arange(ell, dtype=np.int64)[None, :]
    keys = np.sort(keys_full[mask].reshape(B, half), axis=1)
    i2 = keys // n
    j2 = keys - i2 * n
    loop = i2 == j2
    newrun, rho = _run_positions(keys)
    nonloop = ~loop
    out = np.empty((B, 7), dtype=np.int64)
    out[:, 0] = loop.sum(axis=1)
    out[:, 1] = np.where(nonloop, rho, 0).sum(axis=1)
    out[:, 2] = (nonloop & ~newrun).sum(axis=1)
    out[:, 3] = (loop & newrun).sum(axis=1)
    out[:, 4] = (nonloop & (rho == 1)).sum(axis=1)
    out[:, 5] = out[:, 0] + out[:, 2]
    out[:, 6] = np.where(nonloop & small[i2] & small[j2], rho, 0).sum(axis=1)
    return out


def _bij_batch_numpy(u, v_level, v_choice, ncols, diag_loop):
    B = u.shape[0]
    ell = v_level.shape[0]
    assign = np.empty((B, ell), dtype=np.int64)
    pool = np.empty(ell, np.int64)
    for b in range(B):
        _assign_sequential(u[b], pool, assign[b])
    rows = v_choice[assign]
    cols = np.broadcast_to(v_level[None, :], (B, ell))
    keys = rows * np.int64(ncols) + cols
    out = np.empty((B, 2), dtype=np.int64)
    if diag_loop:
        loop = rows == cols
        out[:, 0] = loop.sum(axis=1)
        # park loop positions on unique sentinel keys so they form no runs
        sentinel = np.int64(ncols) * np.int64(ncols) + np.arange(ell, dtype=np.int64)
        keys = np.where(loop, sentinel[None, :], keys)
    else:
        out[:, 0] = 0
    keys = np.sort(keys, axis=1)
    _, rho = _run_positions(keys)
    out[:, 1] = rho.sum(axis=1)
    return out


# ---------------------------------------------------------------------------
# exhaustive enumeration cores (exact integer tallies)
# ---------------------------------------------------------------------------


@_jit
def _enum_cm_core(vertex_of, n, joint, sums):
    """Depth-first walk over all perfect pairings with incremental tallies.

    joint[s, m] counts matchings by statistic pair; sums = [matchings,
    sum of s, sum of m, simple count].
    """
    ell = vertex_of.shape[0]
    half = ell // 2
    partner = np.full(ell, -1, np.int64)
    X = np.zeros((n, n), np.int64)
    lev_i = np.empty(half, np.int64)
    lev_j = np.empty(half, np.int64)
    s = 0
    m = 0
    level = 0
    fresh = True
    while level >= 0:
        if fresh:
            i = -1
            for t in range(ell):
                if partner[t] < 0:
                    i = t
                    break
            if i < 0:
                sums[0] += 1
                sums[1] += s
                sums[2] += m
                joint[s, m] += 1
                if s == 0 and m == 0:
                    sums[3] += 1
                level -= 1
                fresh = False
                continue
            lev_i[level] = i
            lev_j[level] = i
        else:
            i = lev_i[level]
            j = lev_j[level]
            partner[i] = -1
            partner[j] = -1
            vi = vertex_of[i]
            vj = vertex_of[j]
            if vi == vj:
                s -= 1
            else:
                if vi <= vj:
                    lo, hi = vi, vj
                else:
                    lo, hi = vj, vi
                m -= X[lo, hi] - 1
                X[lo, hi] -= 1
        i = lev_i[level]
        nxt = -1
        for t in range(lev_j[level] + 1, ell):
            if partner[t] < 0 and t != i:
                nxt = t
                break
        if nxt < 0:
            level -= 1
            fresh = False
            continue
        lev_j[level] = nxt
        partner[i] = nxt
        partner[nxt] = i
        vi = vertex_of[i]
        vn = vertex_of[nxt]
        if vi == vn:
            s += 1
        else:
            if vi <= vn:
                lo, hi = vi, vn
            else:
                lo, hi = vn, vi
            X[lo, hi] += 1
            m += X[lo, hi] - 1
        level += 1
        fresh = True


@_jit
def _enum_bij_core(v_level, v_choice, nrows, ncols, diag_loop, joint, sums):
    """Depth-first walk over all bijections with incremental tallies."""
    ell = v_level.shape[0]
    used = np.zeros(ell, np.int64)
    X = np.zeros((nrows, ncols), np.int64)
    lev_o = np.empty(ell, np.int64)
    s = 0
    m = 0
    level = 0
    fresh = True
    while level >= 0:
        if fresh:
            if level == ell:
                sums[0] += 1
                sums[1] += s
                sums[2] += m
                joint[s, m] += 1
                if s == 0 and m == 0:
                    sums[3] += 1
                level -= 1
                fresh = False
                continue
            lev_o[level] = -1
        else:
            o = lev_o[level]
            used[o] = 0
            row = v_choice[o]
            col = v_level[level]
            if diag_loop and row == col:
                s -= 1
            else:
                m -= X[row, col] - 1
                X[row, col] -= 1
        nxt = -1
        for t in range(lev_o[level] + 1, ell):
            if used[t] == 0:
                nxt = t
                break
        if nxt < 0:
            level -= 1
            fresh = False
            continue
        lev_o[level] = nxt
        used[nxt] = 1
        row = v_choice[nxt]
        col = v_level[level]
        if diag_loop and row == col:
            s += 1
        else:
            X[row, col] += 1
            m += X[row, col] - 1
        level += 1
        fresh = True


# ---------------------------------------------------------------------------
# public dispatchers
# ---------------------------------------------------------------------------


def pair_sequential(u: np.ndarray) -> np.ndarray:
    """Partner array for one replicate from ell/2 uniforms."""
    ell = 2 * u.shape[0]
    pool = np.empty(ell, np.int64)
    pos = np.empty(ell, np.int64)
    partner = np.empty(ell, np.int64)
    _pair_sequential(u, pool, pos, partner)
    return partner


def assign_sequential(u: np.ndarray) -> np.ndarray:
    """Bijection array (level -> choice) for one replicate from ell uniforms."""
    ell = u.shape[0]
    pool = np.empty(ell, np.int64)
    assign = np.empty(ell, np.int64)
    _assign_sequential(u, pool, assign)
    return assign


def cm_batch(u: np.ndarray, vertex_of: np.ndarray, n: int, small: np.ndarray) -> np.ndarray:
    """Batch statistics for undirected pairing.

    u: (B, ell/2) uniforms; returns int64 (B, 7) columns
    s, m, m_tilde, s_ind, m_ind, removed, m_trunc.
    """
    if BACKEND == "numba":
        out = np.empty((u.shape[0], 7), dtype=np.int64)
        _cm_batch_rows(u, vertex_of, np.int64(n), small, out)
        return out
    return _cm_batch_numpy(u, vertex_of, n, small)


def bij_batch(
    u: np.ndarray,
    v_level: np.ndarray,
    v_choice: np.ndarray,
    ncols: int,
    diag_loop: bool,
) -> np.ndarray:
    """Batch statistics for bijection pairing (directed/bipartite).

    u: (B, ell) uniforms; returns int64 (B, 2) columns s, m.
    """
    if BACKEND == "numba":
        out = np.empty((u.shape[0], 2), dtype=np.int64)
        _bij_batch_rows(u, v_level, v_choice, np.int64(ncols), diag_loop, out)
        return out
    return _bij_batch_numpy(u, v_level, v_choice, ncols, diag_loop)


def enum_cm_joint(vertex_of: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Exact joint (s, m) tallies over all pairings.

    Returns (joint counts, sums) with sums = [matchings, sum s, sum m, simple].
    """
    ell = vertex_of.shape[0]
    half = ell // 2
    joint = np.zeros((half + 1, half * (half - 1) // 2 + 2), dtype=np.int64)
    sums = np.zeros(4, dtype=np.int64)
    _enum_cm_core(vertex_of, np.int64(n), joint, sums)
    return joint, sums


def enum_bij_joint(
    v_level: np.ndarray,
    v_choice: np.ndarray,
    nrows: int,
    ncols: int,
    diag_loop: bool,
) -> tuple[np.ndarray, np.ndarray]:
    """Exact joint (s, m) tallies over all bijections."""
    ell = v_level.shape[0]
    joint = np.zeros((ell + 1, ell * (ell - 1) // 2 + 2), dtype=np.int64)
    sums = np.zeros(4, dtype=np.int64)
    _enum_bij_core(v_level, v_choice, np.int64(nrows), np.int64(ncols), diag_loop, joint, sums)
    return joint, sums
