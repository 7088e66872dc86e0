"""Segment- and video-level copy detection for short video queries."""

from .align import METHODS, AlignParams, ScoredSegment, align
from .core import (
    AnnotationError,
    CopySegmentPair,
    DetectionResult,
    FeatureFileError,
    FrameFeatureSequence,
    ManifestEntry,
    PairAnnotation,
    ValidationError,
    VcdError,
)
from .simmatrix import SimilarityMatrix, compute_similarity_matrix, modify_with_ground_truth

__version__ = "0.1.0"

__all__ = [
    "METHODS",
    "AlignParams",
    "AnnotationError",
    "CopySegmentPair",
    "DetectionResult",
    "FeatureFileError",
    "FrameFeatureSequence",
    "ManifestEntry",
    "PairAnnotation",
    "ScoredSegment",
    "SimilarityMatrix",
    "ValidationError",
    "VcdError",
    "align",
    "compute_similarity_matrix",
    "modify_with_ground_truth",
    "__version__",
]
