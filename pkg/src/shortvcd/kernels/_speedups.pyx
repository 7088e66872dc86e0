# cython: language_level=3
"""Compiled alignment kernels.

Must stay behavior-identical to shortvcd.kernels._pure; parity is enforced
by tests. Matrix convention everywhere: rows index reference frames,
columns index query frames.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport INFINITY

cnp.import_array()


def dp_local_runs(const double[:, ::1] sim, double gate, double penalty):
    """Local-alignment scan (diagonal/down/right moves, reset at zero).

    score(i, j) = max(0, best_predecessor + sim[i, j] - gate) where the
    predecessor candidates are score(i-1, j-1), score(i-1, j) - penalty,
    score(i, j-1) - penalty and a fresh start at 0. Cells are traced back
    in score order; a path that runs into an already-consumed cell is
    discarded. Returns [(qs, qe, rs, re, score), ...].
    """
    cdef Py_ssize_t n = sim.shape[0]
    cdef Py_ssize_t m = sim.shape[1]
    h_arr = np.zeros((n, m), dtype=np.float64)
    mv_arr = np.zeros((n, m), dtype=np.uint8)
    cdef double[:, ::1] h = h_arr
    cdef unsigned char[:, ::1] mv = mv_arr
    cdef Py_ssize_t i, j
    cdef double best, cand, v
    cdef unsigned char move

    for i in range(n):
        for j in range(m):
            best = 0.0
            move = 0
            if i > 0 and j > 0:
                cand = h[i - 1, j - 1]
                if cand > best:
                    best = cand
                    move = 1
            if i > 0:
                cand = h[i - 1, j] - penalty
                if cand > best:
                    best = cand
                    move = 2
            if j > 0:
                cand = h[i, j - 1] - penalty
                if cand > best:
                    best = cand
                    move = 3
            v = best + sim[i, j] - gate
            if v > 0.0:
                h[i, j] = v
                mv[i, j] = move

    flat = h_arr.ravel()
    pos = np.flatnonzero(flat > 0.0)
    if pos.size == 0:
        return []
    order_arr = pos[np.argsort(-flat[pos], kind="stable")]
    cdef long long[::1] order = np.ascontiguousarray(order_arr, dtype=np.int64)

    used_arr = np.zeros((n, m), dtype=np.uint8)
    cdef unsigned char[:, ::1] used = used_arr
    cdef list out = []
    cdef Py_ssize_t k, ci, cj, min_i, max_i, min_j, max_j
    cdef unsigned char d
    cdef bint broken
    cdef double score

    for k in range(order.shape[0]):
        ci = order[k] // m
        cj = order[k] % m
        if used[ci, cj]:
            continue
        score = h[ci, cj]
        min_i = max_i = ci
        min_j = max_j = cj
        broken = False
        while True:
            used[ci, cj] = 1
            if ci < min_i:
                min_i = ci
            if ci > max_i:
                max_i = ci
            if cj < min_j:
                min_j = cj
            if cj > max_j:
                max_j = cj
            d = mv[ci, cj]
            if d == 0:
                break
            if d == 1:
                ci -= 1
                cj -= 1
            elif d == 2:
                ci -= 1
            else:
                cj -= 1
            if used[ci, cj]:
                broken = True
                break
        if not broken:
            out.append((min_j, max_j + 1, min_i, max_i + 1, score))
    return out


def tn_extract(
    long long[::1] ii,
    long long[::1] jj,
    double[::1] ss,
    Py_ssize_t n,
    Py_ssize_t m,
    int max_gap,
    double stop_weight,
    int max_chains,
):
    """Greedy max-weight chain extraction over above-threshold cells.

    Nodes (ii[k], jj[k]) must be sorted by (ii, jj). Edges go from a node to
    any node offset by 1..max_gap on both axes. Repeatedly finds the
    max-weight chain (node weights ss), removes its nodes, and repeats until
    the best chain weight drops below stop_weight or max_chains chains were
    emitted. Returns [(qs, qe, rs, re, weight, n_cells), ...] in extraction
    order.
    """
    cdef Py_ssize_t count = ii.shape[0]
    if count == 0:
        return []
    grid_arr = np.full((n, m), -1, dtype=np.int64)
    cdef long long[:, ::1] grid = grid_arr
    cdef Py_ssize_t k
    for k in range(count):
        grid[ii[k], jj[k]] = k

    alive_arr = np.ones(count, dtype=np.uint8)
    best_arr = np.zeros(count, dtype=np.float64)
    pred_arr = np.full(count, -1, dtype=np.int64)
    cdef unsigned char[::1] alive = alive_arr
    cdef double[::1] best = best_arr
    cdef long long[::1] pred = pred_arr

    cdef list out = []
    cdef Py_ssize_t i, j, di, dj, q, best_k, cur
    cdef double b, best_w
    cdef long long p
    cdef Py_ssize_t min_i, max_i, min_j, max_j, n_cells

    while len(out) < max_chains:
        best_w = -INFINITY
        best_k = -1
        for k in range(count):
            if not alive[k]:
                continue
            i = ii[k]
            j = jj[k]
            b = 0.0
            p = -1
            for di in range(1, max_gap + 1):
                if di > i:
                    break
                for dj in range(1, max_gap + 1):
                    if dj > j:
                        break
                    q = grid[i - di, j - dj]
                    if q >= 0 and alive[q] and best[q] > b:
                        b = best[q]
                        p = q
            best[k] = b + ss[k]
            pred[k] = p
            if best[k] > best_w:
                best_w = best[k]
                best_k = k
        if best_k < 0 or best_w < stop_weight:
            break
        cur = best_k
        min_i = max_i = ii[cur]
        min_j = max_j = jj[cur]
        n_cells = 0
        while cur >= 0:
            alive[cur] = 0
            n_cells += 1
            i = ii[cur]
            j = jj[cur]
            if i < min_i:
                min_i = i
            if i > max_i:
                max_i = i
            if j < min_j:
                min_j = j
            if j > max_j:
                max_j = j
            cur = pred[cur]
        out.append((min_j, max_j + 1, min_i, max_i + 1, best_w, n_cells))
    return out


def dtw_path(const double[:, ::1] sim, int band_radius):
    """Banded DTW over cost 1 - sim; returns the global warp path.

    band_radius < 0 means unbounded; otherwise the effective radius is
    max(band_radius, |n - m|) so the corner stays reachable. Returns
    (path_rows, path_cols) int64 arrays from (0, 0) to (n-1, m-1).
    """
    cdef Py_ssize_t n = sim.shape[0]
    cdef Py_ssize_t m = sim.shape[1]
    cdef Py_ssize_t r
    cdef bint banded = band_radius >= 0
    if banded:
        r = band_radius
        if n - m > r:
            r = n - m
        if m - n > r:
            r = m - n

    d_arr = np.full((n, m), np.inf, dtype=np.float64)
    mv_arr = np.zeros((n, m), dtype=np.uint8)
    cdef double[:, ::1] d = d_arr
    cdef unsigned char[:, ::1] mv = mv_arr
    cdef Py_ssize_t i, j, jlo, jhi
    cdef double lo, cand
    cdef unsigned char move

    for i in range(n):
        if banded:
            jlo = i - r if i - r > 0 else 0
            jhi = i + r if i + r < m - 1 else m - 1
        else:
            jlo = 0
            jhi = m - 1
        for j in range(jlo, jhi + 1):
            if i == 0 and j == 0:
                d[0, 0] = 1.0 - sim[0, 0]
                mv[0, 0] = 0
                continue
            lo = INFINITY
            move = 0
            if i > 0 and j > 0:
                cand = d[i - 1, j - 1]
                if cand < lo:
                    lo = cand
                    move = 1
            if i > 0:
                cand = d[i - 1, j]
                if cand < lo:
                    lo = cand
                    move = 2
            if j > 0:
                cand = d[i, j - 1]
                if cand < lo:
                    lo = cand
                    move = 3
            if move == 0:
                continue
            d[i, j] = lo + (1.0 - sim[i, j])
            mv[i, j] = move

    cdef list ri = []
    cdef list rj = []
    i = n - 1
    j = m - 1
    while True:
        ri.append(i)
        rj.append(j)
        move = mv[i, j]
        if i == 0 and j == 0:
            break
        if move == 1:
            i -= 1
            j -= 1
        elif move == 2:
            i -= 1
        else:
            j -= 1
    ri.reverse()
    rj.reverse()
    return np.asarray(ri, dtype=np.int64), np.asarray(rj, dtype=np.int64)
