"""Independent brute-force reference implementations used only by tests.

Everything here is deliberately written the naive way (python loops, frame
sets, math.fsum) and shares no code with the package, so agreement is
meaningful evidence of correctness.
"""

from __future__ import annotations

import math


# ---------------------------------------------------------------- metrics


def _axis_frames(segments, axis: int) -> set[int]:
    out: set[int] = set()
    for seg in segments:
        out |= set(range(seg[2 * axis], seg[2 * axis + 1]))
    return out


def seg_overlap(a, b) -> bool:
    return bool(
        set(range(a[0], a[1])) & set(range(b[0], b[1]))
    ) and bool(set(range(a[2], a[3])) & set(range(b[2], b[3])))


def _f1(p: float, r: float) -> float:
    return 2 * p * r / (p + r) if p + r else 0.0


def oracle_segment_prf(truth: dict, dets: dict):
    """(SR, SP, SF1) with truth/dets as {pair_key: [(qs,qe,rs,re), ...]}."""
    n_gt = hit_gt = n_det = correct = 0
    for key, gsegs in truth.items():
        dsegs = dets.get(key, [])
        n_gt += len(gsegs)
        n_det += len(dsegs)
        hit_gt += sum(1 for g in gsegs if any(seg_overlap(g, d) for d in dsegs))
        correct += sum(1 for d in dsegs if any(seg_overlap(d, g) for g in gsegs))
    sr = hit_gt / n_gt if n_gt else 0.0
    sp = correct / n_det if n_det else 0.0
    return sr, sp, _f1(sp, sr)


def _pair_frame_sets(gsegs, dsegs):
    gq, gr = _axis_frames(gsegs, 0), _axis_frames(gsegs, 1)
    dq, dr = _axis_frames(dsegs, 0), _axis_frames(dsegs, 1)
    return gq, gr, dq, dr, gq & dq, gr & dr


def oracle_macro(truth: dict, dets: dict, aggregation: str = "pooled"):
    """(mSR, mSP, mSF1) via explicit frame sets."""

    def ratio(num, den):
        return num / den if den else 0.0

    if aggregation == "pooled":
        sums = [0] * 6
        for key, gsegs in truth.items():
            sets = _pair_frame_sets(gsegs, dets.get(key, []))
            for k, s in enumerate(sets):
                sums[k] += len(s)
        gq, gr, dq, dr, cq, cr = sums
        msr = ratio(cq, gq) * ratio(cr, gr)
        msp = ratio(cq, dq) * ratio(cr, dr)
        return msr, msp, _f1(msp, msr)
    msrs, msps = [], []
    for key, gsegs in truth.items():
        gq, gr, dq, dr, cq, cr = (len(s) for s in _pair_frame_sets(gsegs, dets.get(key, [])))
        msrs.append(ratio(cq, gq) * ratio(cr, gr))
        msps.append(ratio(cq, dq) * ratio(cr, dr))
    if not msrs:
        return 0.0, 0.0, 0.0
    msr = sum(msrs) / len(msrs)
    msp = sum(msps) / len(msps)
    return msr, msp, _f1(msp, msr)


def oracle_ap(items) -> float:
    """AP from [(pair_id, score, is_positive), ...]."""
    order = sorted(items, key=lambda x: (-x[1], x[0]))
    positives = sum(1 for _, _, label in order if label)
    hits = 0
    total = 0.0
    for rank, (_, _, label) in enumerate(order, start=1):
        if label:
            hits += 1
            total += hits / rank
    return total / positives


# ------------------------------------------------------------- similarity


def oracle_cosine(u, v) -> float:
    dot = math.fsum(float(a) * float(b) for a, b in zip(u, v))
    nu = math.sqrt(math.fsum(float(a) ** 2 for a in u))
    nv = math.sqrt(math.fsum(float(b) ** 2 for b in v))
    return dot / (nu * nv)


# -------------------------------------------------------------- alignment


def oracle_hv_segments(values, threshold, max_gap, min_length):
    """Exhaustive single-offset diagonal scan (bin width 1, no neighbor
    bins); valid as ground truth when matches sit on isolated offsets."""
    n, m = values.shape
    segments = []
    for delta in range(-(m - 1), n):
        cols = [
            q for q in range(m) if 0 <= q + delta < n and values[q + delta, q] >= threshold
        ]
        run: list[int] = []
        for q in cols + [None]:
            if q is not None and (not run or q - run[-1] <= max_gap):
                run.append(q)
                continue
            if len(run) >= min_length:
                score = math.fsum(values[x + delta, x] for x in run)
                segments.append((run[0], run[-1] + 1, run[0] + delta, run[-1] + delta + 1, score))
            run = [q] if q is not None else []
    return segments


def oracle_tn_best_weight(values, threshold, max_gap) -> float:
    """Max-weight path in the gap-limited DAG of above-threshold cells."""
    nodes = [
        (i, j)
        for i in range(values.shape[0])
        for j in range(values.shape[1])
        if values[i, j] >= threshold
    ]
    node_set = set(nodes)
    memo: dict = {}

    def downstream(v):
        if v in memo:
            return memo[v]
        i, j = v
        best_succ = 0.0
        for di in range(1, max_gap + 1):
            for dj in range(1, max_gap + 1):
                u = (i + di, j + dj)
                if u in node_set:
                    best_succ = max(best_succ, downstream(u))
        memo[v] = values[i, j] + best_succ
        return memo[v]

    return max((downstream(v) for v in sorted(nodes, reverse=True)), default=0.0)


def oracle_sw_max(values, threshold, penalty) -> float:
    """Max cell of the penalized local-alignment table, plain loops."""
    n, m = values.shape
    table = [[0.0] * m for _ in range(n)]
    best = 0.0
    for i in range(n):
        for j in range(m):
            pred = 0.0
            if i > 0 and j > 0:
                pred = max(pred, table[i - 1][j - 1])
            if i > 0:
                pred = max(pred, table[i - 1][j] - penalty)
            if j > 0:
                pred = max(pred, table[i][j - 1] - penalty)
            table[i][j] = max(0.0, pred + float(values[i, j]) - threshold)
            best = max(best, table[i][j])
    return best


def oracle_dtw_cost(values, band_radius=None) -> float:
    """Textbook cumulative DTW cost over 1 - sim with an optional band."""
    n, m = values.shape
    radius = None if band_radius is None else max(band_radius, abs(n - m))
    inf = float("inf")
    table = [[inf] * m for _ in range(n)]
    for i in range(n):
        for j in range(m):
            if radius is not None and abs(i - j) > radius:
                continue
            cost = 1.0 - float(values[i, j])
            if i == 0 and j == 0:
                table[i][j] = cost
                continue
            prev = inf
            if i > 0 and j > 0:
                prev = min(prev, table[i - 1][j - 1])
            if i > 0:
                prev = min(prev, table[i - 1][j])
            if j > 0:
                prev = min(prev, table[i][j - 1])
            if prev < inf:
                table[i][j] = prev + cost
    return table[n - 1][m - 1]
