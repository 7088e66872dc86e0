"""Core domain types: frame features, copy segments, pair annotations, detections.

Conventions used throughout the package:

* Frame features are sampled at 1 fps, so frame indices double as second
  offsets and video lengths are frame counts.
* All intervals are half-open ``[start, end)`` in frame indices.
* Feature vectors are stored as unit-normalized float32; similarity math is
  done in float64.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class VcdError(Exception):
    """Base class for errors raised by this package."""


class ValidationError(VcdError):
    """An invariant on domain data was violated."""


class AnnotationError(VcdError):
    """An annotation or detection file could not be parsed."""


class FeatureFileError(VcdError):
    """A feature file is malformed.

    ``code`` identifies the failure: ``bad_magic``, ``bad_version``,
    ``bad_header``, ``truncated`` or ``zero_vector``.
    """

    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code


def normalize_rows(frames: np.ndarray) -> np.ndarray:
    """Unit-normalize each row (float64 math, float32 result).

    Raises FeatureFileError("zero_vector") if any row has zero norm.
    """
    frames = np.asarray(frames, dtype=np.float64)
    if frames.ndim != 2:
        raise ValidationError(f"frame array must be 2-D, got shape {frames.shape}")
    norms = np.linalg.norm(frames, axis=1)
    zero = np.flatnonzero(norms == 0.0)
    if zero.size:
        raise FeatureFileError("zero_vector", f"frame {int(zero[0])} has zero norm")
    return (frames / norms[:, None]).astype(np.float32)


class FrameFeatureSequence:
    """Per-frame feature vectors of one video, unit-normalized.

    ``frames`` is an (n, dim) float32 array with n >= 1; rows are
    renormalized on construction so cosine similarity reduces to a dot
    product.
    """

    __slots__ = ("_video_id", "_frames")

    def __init__(self, video_id: str, frames: np.ndarray, *, normalized: bool = False):
        if not video_id:
            raise ValidationError("video_id must be non-empty")
        frames = np.asarray(frames)
        if frames.ndim != 2 or frames.shape[0] < 1 or frames.shape[1] < 1:
            raise ValidationError(
                f"{video_id}: frames must be a non-empty 2-D array, got shape {frames.shape}"
            )
        if not normalized:
            frames = normalize_rows(frames)
        else:
            frames = frames.astype(np.float32, copy=True)
        frames.setflags(write=False)
        self._video_id = video_id
        self._frames = frames

    @property
    def video_id(self) -> str:
        return self._video_id

    @property
    def frames(self) -> np.ndarray:
        """Read-only (n, dim) float32 view."""
        return self._frames

    @property
    def dim(self) -> int:
        return self._frames.shape[1]

    def __len__(self) -> int:
        return self._frames.shape[0]

    def slice(self, start: int, end: int, video_id: str) -> "FrameFeatureSequence":
        """Sub-sequence [start, end) under a new video id."""
        if not (0 <= start < end <= len(self)):
            raise ValidationError(
                f"{self._video_id}: slice [{start}, {end}) out of bounds for length {len(self)}"
            )
        return FrameFeatureSequence(video_id, self._frames[start:end], normalized=True)

    def __repr__(self) -> str:
        return f"FrameFeatureSequence({self._video_id!r}, n={len(self)}, dim={self.dim})"


@dataclass(frozen=True, order=True)
class CopySegmentPair:
    """A copied interval: query frames [query_start, query_end) correspond to
    reference frames [ref_start, ref_end)."""

    query_start: int
    query_end: int
    ref_start: int
    ref_end: int

    def __post_init__(self):
        for name in ("query_start", "query_end", "ref_start", "ref_end"):
            value = getattr(self, name)
            if isinstance(value, (bool, float)) or not isinstance(value, (int, np.integer)):
                raise ValidationError(f"{name} must be an integer, got {value!r}")
            object.__setattr__(self, name, int(value))
        if not (0 <= self.query_start < self.query_end):
            raise ValidationError(
                f"query interval [{self.query_start}, {self.query_end}) is empty or negative"
            )
        if not (0 <= self.ref_start < self.ref_end):
            raise ValidationError(
                f"ref interval [{self.ref_start}, {self.ref_end}) is empty or negative"
            )

    @property
    def query_length(self) -> int:
        return self.query_end - self.query_start

    @property
    def ref_length(self) -> int:
        return self.ref_end - self.ref_start

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.query_start, self.query_end, self.ref_start, self.ref_end)

    def overlaps(self, other: "CopySegmentPair") -> bool:
        """True if the two segments share at least one frame on both axes."""
        q = min(self.query_end, other.query_end) - max(self.query_start, other.query_start)
        r = min(self.ref_end, other.ref_end) - max(self.ref_start, other.ref_start)
        return q > 0 and r > 0

    def check_bounds(self, query_len: int | None, ref_len: int | None) -> None:
        """Validate the segment against video lengths (None skips an axis)."""
        if query_len is not None and self.query_end > query_len:
            raise ValidationError(
                f"query interval [{self.query_start}, {self.query_end}) exceeds "
                f"video length {query_len}"
            )
        if ref_len is not None and self.ref_end > ref_len:
            raise ValidationError(
                f"ref interval [{self.ref_start}, {self.ref_end}) exceeds "
                f"video length {ref_len}"
            )


def pair_key(query_id: str, ref_id: str) -> str:
    """Annotation-file key for a (query, reference) pair."""
    return f"{query_id}-{ref_id}"


def split_pair_key(key: str) -> tuple[str, str]:
    """Inverse of pair_key; video ids therefore must not contain '-'."""
    parts = key.split("-")
    if len(parts) != 2 or not parts[0] or not parts[1]:
        raise AnnotationError(f"malformed pair key {key!r} (expected 'queryId-refId')")
    return parts[0], parts[1]


def check_video_id(video_id: str) -> str:
    if not video_id:
        raise ValidationError("video id must be non-empty")
    if "-" in video_id:
        raise ValidationError(f"video id {video_id!r} must not contain '-'")
    return video_id


@dataclass(frozen=True)
class PairAnnotation:
    """Ground truth for one (query, reference) pair.

    An empty segment tuple marks a negative (non-copy) pair.
    """

    query_id: str
    ref_id: str
    segments: tuple[CopySegmentPair, ...] = ()

    def __post_init__(self):
        check_video_id(self.query_id)
        check_video_id(self.ref_id)
        object.__setattr__(self, "segments", tuple(self.segments))
        seen = set()
        for seg in self.segments:
            if seg.as_tuple() in seen:
                raise ValidationError(
                    f"pair {self.key}: duplicate segment {seg.as_tuple()}"
                )
            seen.add(seg.as_tuple())

    @property
    def key(self) -> str:
        return pair_key(self.query_id, self.ref_id)

    @property
    def is_positive(self) -> bool:
        return bool(self.segments)


@dataclass(frozen=True)
class DetectionResult:
    """Detections for one pair: localized segments plus optional scores.

    ``segment_scores`` (if given) parallels ``segments``; ``score`` is an
    optional pair-level score used for video-level ranking.
    """

    query_id: str
    ref_id: str
    segments: tuple[CopySegmentPair, ...] = ()
    segment_scores: tuple[float, ...] | None = None
    score: float | None = None

    def __post_init__(self):
        check_video_id(self.query_id)
        check_video_id(self.ref_id)
        object.__setattr__(self, "segments", tuple(self.segments))
        if self.segment_scores is not None:
            scores = tuple(float(s) for s in self.segment_scores)
            if len(scores) != len(self.segments):
                raise ValidationError(
                    f"pair {self.key}: {len(scores)} scores for {len(self.segments)} segments"
                )
            object.__setattr__(self, "segment_scores", scores)

    @property
    def key(self) -> str:
        return pair_key(self.query_id, self.ref_id)


@dataclass(frozen=True)
class ManifestEntry:
    """One row of a dataset manifest."""

    video_id: str
    role: str  # "query" or "reference"
    length_seconds: int
    feature_path: str

    def __post_init__(self):
        check_video_id(self.video_id)
        if self.role not in ("query", "reference"):
            raise ValidationError(f"{self.video_id}: role must be query/reference, got {self.role!r}")
        if int(self.length_seconds) < 1:
            raise ValidationError(f"{self.video_id}: length_seconds must be >= 1")
        object.__setattr__(self, "length_seconds", int(self.length_seconds))
