"""Offset (Hough) voting alignment.

Every above-threshold cell (ref frame i, query frame j) votes for the
temporal offset delta = i - j. Offsets are binned with offset_bin_width;
bins reaching min_length votes win. Each winner collects the matches of its
own and the two adjacent bins, orders them along the query axis, and splits
them into runs wherever consecutive query indices differ by more than
max_gap. Run score is the summed similarity of its matches.
"""

from __future__ import annotations

import numpy as np

from ..core import ValidationError
from ..simmatrix import SimilarityMatrix
from ._segments import ScoredSegment, finalize

_EMPTY = {
    "votes": np.empty(0, dtype=np.int64),
    "qs": np.empty(0, dtype=np.int64),
    "qe": np.empty(0, dtype=np.int64),
    "rs": np.empty(0, dtype=np.int64),
    "re": np.empty(0, dtype=np.int64),
    "score": np.empty(0, dtype=np.float64),
}


def hv_candidates(
    values: np.ndarray,
    threshold: float,
    bin_width: int,
    max_gap: int,
    vote_floor: int,
) -> dict[str, np.ndarray]:
    """Candidate runs from all offset bins with >= vote_floor votes.

    Returns parallel arrays; ``votes`` is the vote count of the run's parent
    bin so callers can re-filter at stricter minima without re-voting.
    """
    rr, qq = np.nonzero(values >= threshold)
    if rr.size == 0:
        return _EMPTY
    bins = (rr - qq) // bin_width
    bmin = int(bins.min())
    counts = np.bincount(bins - bmin)
    winners = np.flatnonzero(counts >= vote_floor) + bmin
    if winners.size == 0:
        return _EMPTY

    order = np.argsort(bins, kind="stable")
    sorted_bins = bins[order]
    los = np.searchsorted(sorted_bins, winners - 1, side="left")
    his = np.searchsorted(sorted_bins, winners + 1, side="right")
    sizes = his - los
    group = np.repeat(np.arange(winners.size), sizes)
    starts = np.concatenate(([0], np.cumsum(sizes)[:-1]))
    flat = np.arange(sizes.sum()) - np.repeat(starts, sizes) + los[group]
    sel = order[flat]

    # order members by (query idx, ref idx) within each winner group
    member_order = np.lexsort((rr[sel], qq[sel], group))
    sel = sel[member_order]
    group = group[member_order]
    js = qq[sel]
    is_ = rr[sel]
    sims = values[is_, js]

    boundary = np.empty(sel.size, dtype=bool)
    boundary[0] = True
    boundary[1:] = (group[1:] != group[:-1]) | (js[1:] - js[:-1] > max_gap)
    run_start = np.flatnonzero(boundary)
    return {
        "votes": counts[winners[group[run_start]] - bmin],
        "qs": js[run_start],
        "qe": np.maximum.reduceat(js, run_start) + 1,
        "rs": np.minimum.reduceat(is_, run_start),
        "re": np.maximum.reduceat(is_, run_start) + 1,
        "score": np.add.reduceat(sims, run_start),
    }


def hough_voting(matrix: SimilarityMatrix, params) -> list[ScoredSegment]:
    """Align one pair by offset voting; see module docstring."""
    if params.method != "hv":
        raise ValidationError(f"hough_voting called with method={params.method!r}")
    cand = hv_candidates(
        matrix.values,
        params.sim_threshold,
        params.offset_bin_width,
        params.max_gap,
        vote_floor=params.min_length,
    )
    raws = [
        (int(q0), int(q1), int(r0), int(r1), float(s))
        for q0, q1, r0, r1, s in zip(
            cand["qs"], cand["qe"], cand["rs"], cand["re"], cand["score"]
        )
    ]
    return finalize(raws, params.min_length, cap=params.max_detections)
