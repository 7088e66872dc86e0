"""Frame-to-frame similarity matrices and ground-truth-based modification."""

from __future__ import annotations

import csv
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .core import CopySegmentPair, FrameFeatureSequence, ValidationError

MODIFY_MODES = ("diagonal-only", "zero-outside")


class SimilarityMatrix:
    """Cosine similarities between one reference and one query video.

    ``values[i, j]`` is the similarity between reference frame i and query
    frame j (float64, read-only, each in [-1, 1]).
    """

    __slots__ = ("_values",)

    def __init__(self, values: np.ndarray):
        values = np.ascontiguousarray(values, dtype=np.float64)
        if values.ndim != 2 or values.shape[0] < 1 or values.shape[1] < 1:
            raise ValidationError(f"similarity matrix must be non-empty 2-D, got {values.shape}")
        if not np.all(np.isfinite(values)):
            raise ValidationError("similarity matrix contains non-finite values")
        if values.min() < -1.0 - 1e-9 or values.max() > 1.0 + 1e-9:
            raise ValidationError("similarity values outside [-1, 1]")
        values.setflags(write=False)
        self._values = values

    @property
    def values(self) -> np.ndarray:
        return self._values

    @property
    def n_ref(self) -> int:
        return self._values.shape[0]

    @property
    def n_query(self) -> int:
        return self._values.shape[1]

    def __repr__(self) -> str:
        return f"SimilarityMatrix(n_ref={self.n_ref}, n_query={self.n_query})"


def compute_similarity_matrix(
    reference: FrameFeatureSequence, query: FrameFeatureSequence
) -> SimilarityMatrix:
    """Pairwise cosine similarity; rows = reference frames, cols = query frames."""
    if reference.dim != query.dim:
        raise ValidationError(
            f"feature dim mismatch: {reference.video_id} has {reference.dim}, "
            f"{query.video_id} has {query.dim}"
        )
    values = reference.frames.astype(np.float64) @ query.frames.astype(np.float64).T
    # unit rows keep |cos| <= 1 up to rounding; clip the epsilon overshoot
    np.clip(values, -1.0, 1.0, out=values)
    return SimilarityMatrix(values)


def modify_with_ground_truth(
    matrix: SimilarityMatrix,
    gt: CopySegmentPair | Sequence[CopySegmentPair],
    mode: str = "diagonal-only",
) -> SimilarityMatrix:
    """Overwrite a matrix with idealized ground-truth structure.

    "diagonal-only" sets 1.0 on the main diagonal of each ground-truth
    block (cells where i - ref_start == j - query_start); "zero-outside"
    additionally zeroes every cell outside the union of the blocks. Used to
    probe alignment behavior when matching is perfect.
    """
    if mode not in MODIFY_MODES:
        raise ValidationError(f"unknown modification mode {mode!r} (use one of {MODIFY_MODES})")
    segments = [gt] if isinstance(gt, CopySegmentPair) else list(gt)
    if not segments:
        raise ValidationError("at least one ground-truth segment required")
    values = matrix.values.copy()
    for seg in segments:
        seg.check_bounds(query_len=matrix.n_query, ref_len=matrix.n_ref)
    if mode == "zero-outside":
        inside = np.zeros(values.shape, dtype=bool)
        for seg in segments:
            inside[seg.ref_start : seg.ref_end, seg.query_start : seg.query_end] = True
        values[~inside] = 0.0
    for seg in segments:
        k = min(seg.ref_length, seg.query_length)
        rows = seg.ref_start + np.arange(k)
        cols = seg.query_start + np.arange(k)
        values[rows, cols] = 1.0
    return SimilarityMatrix(values)


def dump_matrix_csv(matrix: SimilarityMatrix, path: str | Path) -> None:
    """Write the matrix as CSV, one reference frame per row."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        for row in matrix.values:
            writer.writerow([f"{v:.6f}" for v in row])


def matrices_for_pairs(
    reference: FrameFeatureSequence, queries: Iterable[FrameFeatureSequence]
) -> list[SimilarityMatrix]:
    """Similarity matrices of one reference against several queries."""
    return [compute_similarity_matrix(reference, q) for q in queries]
