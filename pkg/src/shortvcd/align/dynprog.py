"""Local-alignment (dynamic-programming) method.

A Smith-Waterman-style scan over the similarity matrix: each cell extends
the best of its diagonal, upper (gap, penalized) or left (gap, penalized)
predecessor by sim - sim_threshold, flooring at zero. Runs are recovered by
tracing back from high-scoring cells in score order; a traceback that
collides with an already-claimed cell is discarded so no cell is reported
twice.
"""

from __future__ import annotations

from ..core import ValidationError
from ..simmatrix import SimilarityMatrix
from .. import kernels
from ._segments import ScoredSegment, finalize


def dp_runs(values, threshold: float, penalty: float) -> list[tuple]:
    """Raw traceback runs as (qs, qe, rs, re, score)."""
    return kernels.dp_local_runs(values, float(threshold), float(penalty))


def dynamic_programming(matrix: SimilarityMatrix, params) -> list[ScoredSegment]:
    """Align one pair by penalized local alignment."""
    if params.method != "dp":
        raise ValidationError(f"dynamic_programming called with method={params.method!r}")
    raws = dp_runs(matrix.values, params.sim_threshold, params.diag_penalty)
    return finalize(raws, params.min_length, cap=params.max_detections)
