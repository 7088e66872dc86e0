"""Temporal-network alignment.

Above-threshold cells become nodes of a DAG; edges connect nodes whose
reference and query indices both increase by 1..max_gap. Path weight is the
sum of node similarities. The maximum-weight path is extracted, its nodes
removed, and the process repeats until the best remaining weight falls
below min_length (or max_detections paths were emitted, which bounds the
worst case at permissive thresholds).
"""

from __future__ import annotations

import numpy as np

from ..core import ValidationError
from ..simmatrix import SimilarityMatrix
from .. import kernels
from ._segments import ScoredSegment, finalize


def tn_chains(
    values: np.ndarray,
    threshold: float,
    max_gap: int,
    stop_weight: float,
    max_chains: int,
) -> list[tuple]:
    """Extracted chains as (qs, qe, rs, re, weight, n_cells), weight-descending."""
    rr, qq = np.nonzero(values >= threshold)
    if rr.size == 0:
        return []
    # np.nonzero yields row-major order, i.e. sorted by (ref, query) as the
    # kernel requires
    return kernels.tn_extract(
        rr.astype(np.int64),
        qq.astype(np.int64),
        values[rr, qq].astype(np.float64),
        values.shape[0],
        values.shape[1],
        int(max_gap),
        float(stop_weight),
        int(max_chains),
    )


def temporal_network(matrix: SimilarityMatrix, params) -> list[ScoredSegment]:
    """Align one pair by repeated max-weight chain extraction."""
    if params.method != "tn":
        raise ValidationError(f"temporal_network called with method={params.method!r}")
    chains = tn_chains(
        matrix.values,
        params.sim_threshold,
        params.max_gap,
        stop_weight=float(params.min_length),
        max_chains=params.max_detections,
    )
    raws = [(q0, q1, r0, r1, w) for q0, q1, r0, r1, w, _ in chains]
    # chains already satisfy weight >= min_length; since similarities are
    # <= 1 and chain cells strictly increase on both axes, their spans are
    # >= weight, so the common span filter never bites here
    return finalize(raws, params.min_length, cap=params.max_detections, by_position=False)
