"""Shared post-processing for alignment outputs.

Raw segments are plain tuples (qs, qe, rs, re, score) so the grid-search
hot path avoids object construction; the public API wraps them into
ScoredSegment at the end.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..core import CopySegmentPair


@dataclass(frozen=True)
class ScoredSegment:
    """A localized copy segment plus the score its aligner assigned."""

    segment: CopySegmentPair
    score: float


def min_span(raw: tuple) -> int:
    return min(raw[1] - raw[0], raw[3] - raw[2])


def resolve_arrays(
    qs: np.ndarray,
    qe: np.ndarray,
    rs: np.ndarray,
    re: np.ndarray,
    score: np.ndarray,
    cap: int,
) -> np.ndarray:
    """Greedy overlap suppression keeping higher-scoring segments.

    Candidates are visited by (-score, qs, qe, rs, re); one is kept when it
    overlaps no earlier keeper on both axes, stopping after ``cap`` keepers.
    Returns the kept candidate indices in visit (score-descending) order.
    """
    n = qs.shape[0]
    if n == 0:
        return np.empty(0, dtype=np.int64)
    order = np.lexsort((re, rs, qe, qs, -score))
    kq0 = np.empty(min(cap, n), dtype=np.int64)
    kq1 = np.empty_like(kq0)
    kr0 = np.empty_like(kq0)
    kr1 = np.empty_like(kq0)
    kept: list[int] = []
    k = 0
    for idx in order:
        if k == cap:
            break
        if k and bool(
            np.any(
                (np.minimum(kq1[:k], qe[idx]) > np.maximum(kq0[:k], qs[idx]))
                & (np.minimum(kr1[:k], re[idx]) > np.maximum(kr0[:k], rs[idx]))
            )
        ):
            continue
        kq0[k], kq1[k], kr0[k], kr1[k] = qs[idx], qe[idx], rs[idx], re[idx]
        kept.append(int(idx))
        k += 1
    return np.asarray(kept, dtype=np.int64)


def resolve_overlaps(raws: list[tuple], cap: int = 2**31) -> list[tuple]:
    """Tuple-list front end of resolve_arrays (same visiting order)."""
    if not raws:
        return []
    arr = np.asarray(raws, dtype=np.float64)
    kept = resolve_arrays(arr[:, 0], arr[:, 1], arr[:, 2], arr[:, 3], arr[:, 4], cap)
    return [raws[i] for i in kept]


def finalize(
    raws: list[tuple],
    min_length: int,
    cap: int,
    by_position: bool = True,
) -> list[ScoredSegment]:
    """Common output filter: drop segments spanning < min_length frames on
    either axis, resolve overlaps (keeping at most ``cap``), and order the
    survivors."""
    raws = [r for r in raws if min_span(r) >= min_length]
    kept = resolve_overlaps(raws, cap)
    if by_position:
        kept.sort(key=lambda t: (t[0], t[1], t[2], t[3]))
    return [
        ScoredSegment(CopySegmentPair(int(q0), int(q1), int(r0), int(r1)), float(s))
        for q0, q1, r0, r1, s in kept
    ]
