"""Pure-Python/numpy fallback kernels.

Behavior-identical to the compiled module (see _speedups.pyx for the
algorithm descriptions); parity is enforced by tests. These are plain loops
and run orders of magnitude slower — see benchmarks/bench_kernels.py.
"""

from __future__ import annotations

import numpy as np


def dp_local_runs(sim: np.ndarray, gate: float, penalty: float) -> list[tuple]:
    sim = np.asarray(sim, dtype=np.float64)
    n, m = sim.shape
    h = np.zeros((n, m))
    mv = np.zeros((n, m), dtype=np.uint8)
    for i in range(n):
        for j in range(m):
            best, move = 0.0, 0
            if i > 0 and j > 0 and h[i - 1, j - 1] > best:
                best, move = h[i - 1, j - 1], 1
            if i > 0 and h[i - 1, j] - penalty > best:
                best, move = h[i - 1, j] - penalty, 2
            if j > 0 and h[i, j - 1] - penalty > best:
                best, move = h[i, j - 1] - penalty, 3
            v = best + sim[i, j] - gate
            if v > 0.0:
                h[i, j] = v
                mv[i, j] = move

    flat = h.ravel()
    pos = np.flatnonzero(flat > 0.0)
    if pos.size == 0:
        return []
    order = pos[np.argsort(-flat[pos], kind="stable")]
    used = np.zeros((n, m), dtype=bool)
    out = []
    for idx in order:
        ci, cj = divmod(int(idx), m)
        if used[ci, cj]:
            continue
        score = float(h[ci, cj])
        min_i = max_i = ci
        min_j = max_j = cj
        broken = False
        while True:
            used[ci, cj] = True
            min_i, max_i = min(min_i, ci), max(max_i, ci)
            min_j, max_j = min(min_j, cj), max(max_j, cj)
            d = mv[ci, cj]
            if d == 0:
                break
            if d == 1:
                ci, cj = ci - 1, cj - 1
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
    ii: np.ndarray,
    jj: np.ndarray,
    ss: np.ndarray,
    n: int,
    m: int,
    max_gap: int,
    stop_weight: float,
    max_chains: int,
) -> list[tuple]:
    count = len(ii)
    if count == 0:
        return []
    grid = np.full((n, m), -1, dtype=np.int64)
    grid[ii, jj] = np.arange(count)
    alive = np.ones(count, dtype=bool)
    best = np.zeros(count)
    pred = np.full(count, -1, dtype=np.int64)

    out = []
    while len(out) < max_chains:
        best_w, best_k = -np.inf, -1
        for k in range(count):
            if not alive[k]:
                continue
            i, j = int(ii[k]), int(jj[k])
            b, p = 0.0, -1
            for di in range(1, max_gap + 1):
                if di > i:
                    break
                for dj in range(1, max_gap + 1):
                    if dj > j:
                        break
                    q = grid[i - di, j - dj]
                    if q >= 0 and alive[q] and best[q] > b:
                        b, p = float(best[q]), int(q)
            best[k] = b + ss[k]
            pred[k] = p
            if best[k] > best_w:
                best_w, best_k = float(best[k]), k
        if best_k < 0 or best_w < stop_weight:
            break
        cur = best_k
        min_i = max_i = int(ii[cur])
        min_j = max_j = int(jj[cur])
        n_cells = 0
        while cur >= 0:
            alive[cur] = False
            n_cells += 1
            i, j = int(ii[cur]), int(jj[cur])
            min_i, max_i = min(min_i, i), max(max_i, i)
            min_j, max_j = min(min_j, j), max(max_j, j)
            cur = int(pred[cur])
        out.append((min_j, max_j + 1, min_i, max_i + 1, best_w, n_cells))
    return out


def dtw_path(sim: np.ndarray, band_radius: int) -> tuple[np.ndarray, np.ndarray]:
    sim = np.asarray(sim, dtype=np.float64)
    n, m = sim.shape
    banded = band_radius >= 0
    r = max(band_radius, abs(n - m)) if banded else 0

    d = np.full((n, m), np.inf)
    mv = np.zeros((n, m), dtype=np.uint8)
    for i in range(n):
        jlo, jhi = (max(0, i - r), min(m - 1, i + r)) if banded else (0, m - 1)
        for j in range(jlo, jhi + 1):
            if i == 0 and j == 0:
                d[0, 0] = 1.0 - sim[0, 0]
                continue
            lo, move = np.inf, 0
            if i > 0 and j > 0 and d[i - 1, j - 1] < lo:
                lo, move = d[i - 1, j - 1], 1
            if i > 0 and d[i - 1, j] < lo:
                lo, move = d[i - 1, j], 2
            if j > 0 and d[i, j - 1] < lo:
                lo, move = d[i, j - 1], 3
            if move == 0:
                continue
            d[i, j] = lo + (1.0 - sim[i, j])
            mv[i, j] = move

    ri, rj = [], []
    i, j = n - 1, m - 1
    while True:
        ri.append(i)
        rj.append(j)
        move = mv[i, j]
        if i == 0 and j == 0:
            break
        if move == 1:
            i, j = i - 1, j - 1
        elif move == 2:
            i -= 1
        else:
            j -= 1
    ri.reverse()
    rj.reverse()
    return np.asarray(ri, dtype=np.int64), np.asarray(rj, dtype=np.int64)
