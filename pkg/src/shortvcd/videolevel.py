"""Video-level pair scoring for ranking.

Three aggregation methods over the frame features of a pair:

* ``f2f``  - max over all frame-to-frame cosine similarities (symmetric).
* ``g2g``  - cosine between the renormalized global frame means (symmetric).
* ``sm2g`` - the reference is chunked into fixed-size windows (the last one
  may be partial), each window's renormalized mean is compared to the
  query's global mean, and the max is taken. Directional: chunking the
  query instead generally scores differently.
"""

from __future__ import annotations

import numpy as np

from .core import FrameFeatureSequence, ValidationError

VIDEO_METHODS = ("f2f", "g2g", "sm2g")


def enumerate_pairs(video_ids) -> list[tuple[str, str]]:
    """All unordered id pairs (i < j lexicographically), n*(n-1)/2 of them."""
    ids = sorted(video_ids)
    for a, b in zip(ids, ids[1:]):
        if a == b:
            raise ValidationError(f"duplicate video id {a!r}")
    return [(ids[i], ids[j]) for i in range(len(ids)) for j in range(i + 1, len(ids))]


def _check_dims(a: FrameFeatureSequence, b: FrameFeatureSequence) -> None:
    if a.dim != b.dim:
        raise ValidationError(
            f"feature dim mismatch: {a.video_id} has {a.dim}, {b.video_id} has {b.dim}"
        )


def _unit_mean(frames: np.ndarray, video_id: str) -> np.ndarray:
    mean = frames.astype(np.float64).mean(axis=0)
    norm = np.linalg.norm(mean)
    if norm == 0.0:
        raise ValidationError(f"{video_id}: zero mean feature vector")
    return mean / norm


def f2f_score(a: FrameFeatureSequence, b: FrameFeatureSequence) -> float:
    """Maximum frame-to-frame cosine similarity."""
    _check_dims(a, b)
    values = a.frames.astype(np.float64) @ b.frames.astype(np.float64).T
    return float(min(1.0, max(-1.0, values.max())))


def g2g_score(a: FrameFeatureSequence, b: FrameFeatureSequence) -> float:
    """Cosine between renormalized global frame means."""
    _check_dims(a, b)
    score = float(_unit_mean(a.frames, a.video_id) @ _unit_mean(b.frames, b.video_id))
    return min(1.0, max(-1.0, score))


def sm2g_score(
    reference: FrameFeatureSequence, query: FrameFeatureSequence, window: int = 10
) -> float:
    """Max cosine between reference window means and the query global mean.

    The reference is split into consecutive windows of ``window`` frames
    (final partial window kept); with window >= len(reference) this reduces
    to g2g_score.
    """
    _check_dims(reference, query)
    if window < 1:
        raise ValidationError("window must be >= 1")
    qmean = _unit_mean(query.frames, query.video_id)
    best = -1.0
    frames = reference.frames
    for start in range(0, len(reference), window):
        wmean = _unit_mean(frames[start : start + window], reference.video_id)
        best = max(best, float(wmean @ qmean))
    return min(1.0, max(-1.0, best))


def score_pair(
    method: str,
    reference: FrameFeatureSequence,
    query: FrameFeatureSequence,
    window: int = 10,
) -> float:
    """Dispatch by method name; reference/query order matters only for sm2g."""
    if method == "f2f":
        return f2f_score(reference, query)
    if method == "g2g":
        return g2g_score(reference, query)
    if method == "sm2g":
        return sm2g_score(reference, query, window=window)
    raise ValidationError(f"unknown video-level method {method!r} (use one of {VIDEO_METHODS})")
