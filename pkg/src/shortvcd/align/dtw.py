"""Dynamic-time-warping alignment.

One global warp path is computed over cost 1 - sim (moves: diagonal, down,
right), optionally constrained to a fixed-radius band around the main
diagonal; the radius is widened to |n - m| when needed so the end corner
stays reachable. Copied intervals are the maximal sub-paths whose summed
(sim - sim_threshold) is positive, found with the all-maximal-scoring-
subsequences algorithm; each needs at least min_length path cells.
"""

from __future__ import annotations

import numpy as np

from ..core import ValidationError
from ..simmatrix import SimilarityMatrix
from .. import kernels
from ._segments import ScoredSegment, finalize


def warp_path(values: np.ndarray, band_radius: int | None) -> tuple[np.ndarray, np.ndarray]:
    """Global DTW path (row indices, col indices); band_radius None = unbounded."""
    return kernels.dtw_path(values, -1 if band_radius is None else int(band_radius))


def maximal_positive_runs(x: np.ndarray) -> list[tuple[int, int]]:
    """All maximal positive-sum contiguous runs of x (Ruzzo-Tompa).

    Returns half-open index ranges in left-to-right order. Every returned
    range has a strictly positive sum and cannot be extended or merged
    without visiting a prefix/suffix of non-positive contribution.
    """
    stack: list[list] = []  # [start, end, cum_before, cum_after]
    cum = 0.0
    for k, v in enumerate(x):
        left = cum
        cum += float(v)
        if v <= 0:
            continue
        cand = [k, k + 1, left, cum]
        while True:
            j = None
            for p in range(len(stack) - 1, -1, -1):
                if stack[p][2] < cand[2]:
                    j = p
                    break
            if j is None or stack[j][3] >= cand[3]:
                stack.append(cand)
                break
            cand = [stack[j][0], cand[1], stack[j][2], cand[3]]
            del stack[j:]
    return [(s, e) for s, e, _, _ in stack]


def path_runs(
    path_rows: np.ndarray,
    path_cols: np.ndarray,
    path_sims: np.ndarray,
    threshold: float,
) -> list[tuple]:
    """Above-threshold sub-paths as (qs, qe, rs, re, score, n_cells).

    The path is monotone on both axes, so a run's bounding box is read off
    its endpoints."""
    raws = []
    for a, b in maximal_positive_runs(path_sims - threshold):
        raws.append(
            (
                int(path_cols[a]),
                int(path_cols[b - 1]) + 1,
                int(path_rows[a]),
                int(path_rows[b - 1]) + 1,
                float(path_sims[a:b].sum()),
                b - a,
            )
        )
    return raws


def dtw_align(matrix: SimilarityMatrix, params) -> list[ScoredSegment]:
    """Align one pair along the global warp path."""
    if params.method != "dtw":
        raise ValidationError(f"dtw_align called with method={params.method!r}")
    rows, cols = warp_path(matrix.values, params.band_radius)
    sims = matrix.values[rows, cols]
    raws = [
        r[:5]
        for r in path_runs(rows, cols, sims, params.sim_threshold)
        if r[5] >= params.min_length
    ]
    return finalize(raws, params.min_length, cap=params.max_detections)
