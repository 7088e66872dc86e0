"""Segment-level alignment: four methods behind one parameter type.

Methods ("method" field of AlignParams):

* ``hv``  - offset (Hough) voting
* ``tn``  - temporal network (max-weight chain extraction)
* ``dp``  - penalized local alignment
* ``dtw`` - dynamic time warping with sub-path extraction

A similarity cell counts as a match when sim >= sim_threshold. All methods
share the output contract: segments span at least min_length frames on both
axes and mutually overlapping outputs are suppressed in favor of the
higher-scoring one.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from ..core import ValidationError
from ..simmatrix import SimilarityMatrix
from ._segments import ScoredSegment
from .dtw import dtw_align
from .dynprog import dynamic_programming
from .hough import hough_voting
from .temporal_net import temporal_network

METHODS = ("hv", "tn", "dp", "dtw")


@dataclass(frozen=True)
class AlignParams:
    """Parameters for one alignment method.

    sim_threshold gates matches (inclusive). min_length is in frames (HV:
    also the bin vote floor; TN: the minimum chain weight; DTW: the minimum
    sub-path cell count). max_gap is the largest bridgeable frame gap (HV,
    TN). offset_bin_width is the HV offset bin size. diag_penalty is the DP
    gap penalty. band_radius is the DTW band (None = unbounded).
    max_detections caps TN chain extraction.
    """

    method: str
    sim_threshold: float = 0.5
    max_gap: int = 2
    min_length: int = 2
    offset_bin_width: int = 1
    diag_penalty: float = 0.5
    band_radius: int | None = None
    max_detections: int = 64

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValidationError(f"unknown method {self.method!r} (use one of {METHODS})")
        if not -1.0 <= self.sim_threshold <= 1.0:
            raise ValidationError(f"sim_threshold {self.sim_threshold} outside [-1, 1]")
        if self.max_gap < 1:
            raise ValidationError("max_gap must be >= 1")
        if self.min_length < 1:
            raise ValidationError("min_length must be >= 1")
        if self.offset_bin_width < 1:
            raise ValidationError("offset_bin_width must be >= 1")
        if self.diag_penalty < 0:
            raise ValidationError("diag_penalty must be >= 0")
        if self.band_radius is not None and self.band_radius < 1:
            raise ValidationError("band_radius must be >= 1 or None")
        if self.max_detections < 1:
            raise ValidationError("max_detections must be >= 1")

    def with_(self, **changes) -> "AlignParams":
        return replace(self, **changes)

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "sim_threshold": self.sim_threshold,
            "max_gap": self.max_gap,
            "min_length": self.min_length,
            "offset_bin_width": self.offset_bin_width,
            "diag_penalty": self.diag_penalty,
            "band_radius": self.band_radius,
            "max_detections": self.max_detections,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "AlignParams":
        unknown = set(data) - {f for f in cls.__dataclass_fields__}
        if unknown:
            raise ValidationError(f"unknown AlignParams fields: {sorted(unknown)}")
        return cls(**data)


_DISPATCH = {
    "hv": hough_voting,
    "tn": temporal_network,
    "dp": dynamic_programming,
    "dtw": dtw_align,
}


def align(matrix: SimilarityMatrix, params: AlignParams) -> list[ScoredSegment]:
    """Run the method selected by params on one similarity matrix."""
    return _DISPATCH[params.method](matrix, params)


__all__ = [
    "METHODS",
    "AlignParams",
    "ScoredSegment",
    "align",
    "dtw_align",
    "dynamic_programming",
    "hough_voting",
    "temporal_network",
]
