"""Evaluation metrics.

Segment level (SR/SP/SF1): a ground-truth segment counts as detected, and a
detection as correct, when the two overlap by at least one frame on both
the query and the reference axis. Counts are pooled over all annotated
pairs; pairs without detections simply contribute misses.

Macro level (mSR/mSP/mSF1): frame-ratio products. mSR multiplies, over the
two axes, (ground-truth frames covered by correct overlap) / (ground-truth
frames); mSP does the same against detected frames. "pooled" aggregation
sums frame counts over pairs before taking ratios; "per-pair-mean" averages
the per-pair metric values instead.

Video level: micro-averaged AP over a flat ranked list of pair scores.

All counting is integer arithmetic, so results are exactly reproducible and
order-independent.
"""

from __future__ import annotations

from dataclasses import dataclass, fields

from .core import (
    CopySegmentPair,
    DetectionResult,
    PairAnnotation,
    ValidationError,
)

AGGREGATIONS = ("pooled", "per-pair-mean")


def merge_intervals(intervals) -> list[tuple[int, int]]:
    """Union of half-open integer intervals, sorted and disjoint."""
    merged: list[tuple[int, int]] = []
    for start, end in sorted(intervals):
        if merged and start <= merged[-1][1]:
            if end > merged[-1][1]:
                merged[-1] = (merged[-1][0], end)
        else:
            merged.append((start, end))
    return merged


def total_length(merged: list[tuple[int, int]]) -> int:
    return sum(e - s for s, e in merged)


def intersection_length(a: list[tuple[int, int]], b: list[tuple[int, int]]) -> int:
    """Overlap size of two merged interval lists."""
    total = 0
    i = j = 0
    while i < len(a) and j < len(b):
        lo = max(a[i][0], b[j][0])
        hi = min(a[i][1], b[j][1])
        if hi > lo:
            total += hi - lo
        if a[i][1] <= b[j][1]:
            i += 1
        else:
            j += 1
    return total


@dataclass
class PairCounts:
    """Integer tallies for one pair (addable across pairs/workers)."""

    gt_segments: int = 0
    detected_gt: int = 0
    detections: int = 0
    correct_detections: int = 0
    gt_query_frames: int = 0
    gt_ref_frames: int = 0
    det_query_frames: int = 0
    det_ref_frames: int = 0
    correct_query_frames: int = 0
    correct_ref_frames: int = 0

    def __add__(self, other: "PairCounts") -> "PairCounts":
        return PairCounts(
            *(getattr(self, f.name) + getattr(other, f.name) for f in fields(self))
        )

    def to_dict(self) -> dict[str, int]:
        return {f.name: getattr(self, f.name) for f in fields(self)}


def _ratio(num: int, den: int) -> float:
    return num / den if den else 0.0


def f1(precision: float, recall: float) -> float:
    """Harmonic mean; 0.0 when both inputs are 0."""
    if precision + recall == 0:
        return 0.0
    return 2 * precision * recall / (precision + recall)


def _tuples_overlap(a: tuple, b: tuple) -> bool:
    return (
        min(a[1], b[1]) - max(a[0], b[0]) > 0
        and min(a[3], b[3]) - max(a[2], b[2]) > 0
    )


def counts_raw(truth: list[tuple], detections: list[tuple]) -> tuple[int, ...]:
    """pair_counts over raw (qs, qe, rs, re) tuples (grid-search hot path)."""
    gt_q = merge_intervals((s[0], s[1]) for s in truth)
    gt_r = merge_intervals((s[2], s[3]) for s in truth)
    det_q = merge_intervals((s[0], s[1]) for s in detections)
    det_r = merge_intervals((s[2], s[3]) for s in detections)
    return (
        len(truth),
        sum(1 for g in truth if any(_tuples_overlap(g, d) for d in detections)),
        len(detections),
        sum(1 for d in detections if any(_tuples_overlap(d, g) for g in truth)),
        total_length(gt_q),
        total_length(gt_r),
        total_length(det_q),
        total_length(det_r),
        intersection_length(gt_q, det_q),
        intersection_length(gt_r, det_r),
    )


def pair_counts(
    truth: tuple[CopySegmentPair, ...], detections: tuple[CopySegmentPair, ...]
) -> PairCounts:
    """Tally one pair's segment hits and frame coverage."""
    return PairCounts(
        *counts_raw([s.as_tuple() for s in truth], [d.as_tuple() for d in detections])
    )


def _indexed(
    detections: list[DetectionResult], truth: list[PairAnnotation]
) -> list[tuple[PairAnnotation, tuple[CopySegmentPair, ...]]]:
    """Pair up annotations with detections; every detection key must be annotated."""
    by_key: dict[str, PairAnnotation] = {}
    for ann in truth:
        if ann.key in by_key:
            raise ValidationError(f"duplicate annotation for pair {ann.key}")
        by_key[ann.key] = ann
    det_by_key: dict[str, DetectionResult] = {}
    for det in detections:
        if det.key in det_by_key:
            raise ValidationError(f"duplicate detections for pair {det.key}")
        if det.key not in by_key:
            raise ValidationError(f"detections for unannotated pair {det.key}")
        det_by_key[det.key] = det
    return [
        (ann, det_by_key[key].segments if key in det_by_key else ())
        for key, ann in sorted(by_key.items())
    ]


def segment_level(
    detections: list[DetectionResult], truth: list[PairAnnotation]
) -> tuple[float, float, float]:
    """(SR, SP, SF1) pooled over all annotated pairs.

    SR = detected ground-truth segments / ground-truth segments;
    SP = correct detections / detections (0.0 when there are none).
    """
    total = PairCounts()
    for ann, dets in _indexed(detections, truth):
        total = total + pair_counts(ann.segments, dets)
    sr = _ratio(total.detected_gt, total.gt_segments)
    sp = _ratio(total.correct_detections, total.detections)
    return sr, sp, f1(sp, sr)


def _macro_from_counts(c: PairCounts) -> tuple[float, float, float]:
    msr = _ratio(c.correct_query_frames, c.gt_query_frames) * _ratio(
        c.correct_ref_frames, c.gt_ref_frames
    )
    msp = _ratio(c.correct_query_frames, c.det_query_frames) * _ratio(
        c.correct_ref_frames, c.det_ref_frames
    )
    return msr, msp, f1(msp, msr)


def macro_segment_level(
    detections: list[DetectionResult],
    truth: list[PairAnnotation],
    aggregation: str = "pooled",
) -> tuple[float, float, float]:
    """(mSR, mSP, mSF1) frame-ratio metrics; see module docstring."""
    if aggregation not in AGGREGATIONS:
        raise ValidationError(f"unknown aggregation {aggregation!r} (use one of {AGGREGATIONS})")
    indexed = _indexed(detections, truth)
    if aggregation == "pooled":
        total = PairCounts()
        for ann, dets in indexed:
            total = total + pair_counts(ann.segments, dets)
        return _macro_from_counts(total)
    per_pair = [_macro_from_counts(pair_counts(ann.segments, dets)) for ann, dets in indexed]
    if not per_pair:
        return 0.0, 0.0, 0.0
    msr = sum(v[0] for v in per_pair) / len(per_pair)
    msp = sum(v[1] for v in per_pair) / len(per_pair)
    return msr, msp, f1(msp, msr)


def micro_average_precision(
    scores: list[tuple[object, float]], labels: list[tuple[object, bool]]
) -> float:
    """AP of one flat ranking of pair scores.

    ``scores`` and ``labels`` must cover exactly the same pair ids. Pairs
    are ranked by descending score with ascending pair id as the
    deterministic tie-break; AP = mean over positives of precision at each
    positive's rank. Raises if there are no positive pairs.
    """
    score_map: dict = {}
    for pair_id, score in scores:
        if pair_id in score_map:
            raise ValidationError(f"duplicate score for pair {pair_id!r}")
        score_map[pair_id] = float(score)
    label_map: dict = {}
    for pair_id, label in labels:
        if pair_id in label_map:
            raise ValidationError(f"duplicate label for pair {pair_id!r}")
        label_map[pair_id] = bool(label)
    if set(score_map) != set(label_map):
        missing = sorted(set(label_map) ^ set(score_map), key=repr)[:5]
        raise ValidationError(f"scores and labels cover different pairs, e.g. {missing}")
    positives = sum(label_map.values())
    if positives == 0:
        raise ValidationError("mAP undefined: no positive pairs")
    ranked = sorted(score_map, key=lambda pid: (-score_map[pid], pid))
    hits = 0
    ap = 0.0
    for rank, pair_id in enumerate(ranked, start=1):
        if label_map[pair_id]:
            hits += 1
            ap += hits / rank
    return ap / positives


@dataclass(frozen=True)
class MetricsReport:
    """One row of an evaluation report."""

    sr: float | None = None
    sp: float | None = None
    sf1: float | None = None
    msr: float | None = None
    msp: float | None = None
    msf1: float | None = None
    map: float | None = None

    def to_dict(self) -> dict[str, float]:
        return {k: v for k, v in self.__dict__.items() if v is not None}

    @classmethod
    def segment(cls, detections, truth, aggregation: str = "pooled") -> "MetricsReport":
        sr, sp, sf1 = segment_level(detections, truth)
        msr, msp, msf1 = macro_segment_level(detections, truth, aggregation)
        return cls(sr=sr, sp=sp, sf1=sf1, msr=msr, msp=msp, msf1=msf1)
