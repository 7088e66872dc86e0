"""Dataset construction.

Asymmetric benchmark reconstruction: every positive (query, reference) pair
is rewritten so the query is exactly t seconds long while the reference
keeps its natural length. Given a copy of length c in the query:

* c >= t: the edited query is the first t seconds of the copied interval;
  the annotation becomes query [0, t) against the reference interval
  truncated proportionally to round(t * ref_len / c) seconds.
* c < t: the whole copy is kept and padded with surrounding footage. Its
  start lands at an offset p drawn uniformly from the valid positions
  [max(0, copy_start + t - N), min(t - c, copy_start)] (N = query length),
  i.e. clipped so the t-second window stays inside the source video. The
  annotation becomes query [p, p + c) against the unchanged reference
  interval.
* N < t: the video cannot fill the window and the pair is excluded.

Negatives are re-sampled by pairing edited queries with references that the
source query has no copy relation with.

The synthetic generator plants one copy per positive pair by copying
reference frames into the query with optional Gaussian feature noise, which
gives a known similarity floor on the planted diagonal.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Mapping

import numpy as np

from .core import (
    CopySegmentPair,
    FrameFeatureSequence,
    ManifestEntry,
    PairAnnotation,
    ValidationError,
    VcdError,
    check_video_id,
    normalize_rows,
)


@dataclass(frozen=True)
class ReconstructionParams:
    """t is the target query length in seconds (= frames at 1 fps)."""

    t: int
    seed: int = 0

    def __post_init__(self):
        if self.t < 1:
            raise ValidationError("t must be >= 1")


def reconstruct_query(
    query: FrameFeatureSequence,
    gt: CopySegmentPair,
    params: ReconstructionParams,
    rng: np.random.Generator,
    edited_id: str | None = None,
) -> tuple[FrameFeatureSequence, CopySegmentPair] | None:
    """Cut one t-second query around a copied interval.

    Returns (edited query, adjusted annotation), or None when the source
    video is shorter than t seconds. ``rng`` supplies the placement draw in
    the c < t case (one uniform integer per call).
    """
    n = len(query)
    t = params.t
    gt.check_bounds(query_len=n, ref_len=None)
    if n < t:
        return None
    c = gt.query_length
    if c >= t:
        window_start = gt.query_start
        ref_len_adj = int(round(t * gt.ref_length / c))
        ref_len_adj = max(1, min(ref_len_adj, gt.ref_length))
        adjusted = CopySegmentPair(0, t, gt.ref_start, gt.ref_start + ref_len_adj)
    else:
        p_lo = max(0, gt.query_start + t - n)
        p_hi = min(t - c, gt.query_start)
        if p_lo > p_hi:  # unreachable once n >= t and gt is in bounds
            return None
        p = int(rng.integers(p_lo, p_hi + 1))
        window_start = gt.query_start - p
        adjusted = CopySegmentPair(p, p + c, gt.ref_start, gt.ref_end)
    if edited_id is None:
        edited_id = f"{query.video_id}_t{t}"
    edited = query.slice(window_start, window_start + t, edited_id)
    return edited, adjusted


@dataclass
class BuildResult:
    """Output of build_asymmetric_dataset, ready for fileio.write_dataset."""

    annotations: list[PairAnnotation]
    query_features: dict[str, FrameFeatureSequence]
    ref_ids: list[str]
    excluded: list[tuple[str, str]]
    t: int

    def roles(self) -> dict[str, str]:
        roles = {vid: "query" for vid in self.query_features}
        roles.update({vid: "reference" for vid in self.ref_ids})
        return roles


def _remap_extra_segment(
    seg: CopySegmentPair, window_start: int, t: int
) -> CopySegmentPair | None:
    """Clip a non-anchor segment into the edited query window.

    The query interval is intersected with [window_start, window_start + t)
    and shifted; the reference interval is trimmed proportionally to the
    surviving query fraction (from the side that was cut)."""
    lo = max(seg.query_start, window_start)
    hi = min(seg.query_end, window_start + t)
    if hi - lo < 1:
        return None
    ref_per_query = seg.ref_length / seg.query_length
    cut_left = lo - seg.query_start
    kept = hi - lo
    rs = seg.ref_start + int(round(cut_left * ref_per_query))
    re = rs + max(1, int(round(kept * ref_per_query)))
    re = min(re, seg.ref_end)
    if re <= rs:
        re = rs + 1
    return CopySegmentPair(lo - window_start, hi - window_start, rs, re)


def build_asymmetric_dataset(
    annotations: list[PairAnnotation],
    features: Mapping[str, FrameFeatureSequence] | Callable[[str], FrameFeatureSequence],
    params: ReconstructionParams,
) -> BuildResult:
    """Reconstruct every positive pair at query length t (see module docstring).

    One edited query is cut per positive pair, named
    ``{query_id}_{ref_id}_t{t}``; its anchor segment is the pair's first
    annotated segment (ordered by position), other segments of the same
    pair are clipped into the chosen window. As many negatives as surviving
    positives are then sampled (without replacement) from the non-copy
    (edited query, reference) combinations. Queries shorter than t are
    excluded with a reason.
    """
    get = features if callable(features) else features.__getitem__
    positives = sorted((a for a in annotations if a.is_positive), key=lambda a: a.key)
    positive_keys = {(a.query_id, a.ref_id) for a in positives}
    ref_ids = sorted({a.ref_id for a in annotations})

    # fail fast on missing features before any editing work
    needed = sorted({a.query_id for a in positives} | set(ref_ids))
    feats: dict[str, FrameFeatureSequence] = {}
    for vid in needed:
        try:
            feats[vid] = get(vid)
        except KeyError as exc:
            raise VcdError(f"no features for annotated video {vid!r}") from exc

    out_annotations: list[PairAnnotation] = []
    query_features: dict[str, FrameFeatureSequence] = {}
    excluded: dict[str, str] = {}
    source_of: dict[str, str] = {}

    for idx, ann in enumerate(positives):
        qfeat = feats[ann.query_id]
        rfeat = feats[ann.ref_id]
        for seg in ann.segments:
            try:
                seg.check_bounds(query_len=len(qfeat), ref_len=len(rfeat))
            except ValidationError as exc:
                raise ValidationError(f"pair {ann.key}: {exc}") from exc
        if len(qfeat) < params.t:
            excluded.setdefault(
                ann.query_id, f"video length {len(qfeat)} < t={params.t}"
            )
            continue
        anchor = min(ann.segments, key=lambda s: s.as_tuple())
        rng = np.random.default_rng(np.random.SeedSequence(params.seed, spawn_key=(0, idx)))
        edited_id = f"{ann.query_id}_{ann.ref_id}_t{params.t}"
        result = reconstruct_query(qfeat, anchor, params, rng, edited_id)
        if result is None:  # pragma: no cover - guarded by the length check
            excluded.setdefault(ann.query_id, f"video length {len(qfeat)} < t={params.t}")
            continue
        edited, adjusted = result
        window_start = anchor.query_start - adjusted.query_start
        segments = {adjusted.as_tuple(): adjusted}
        for seg in ann.segments:
            if seg == anchor:
                continue
            remapped = _remap_extra_segment(seg, window_start, params.t)
            if remapped is not None:
                segments.setdefault(remapped.as_tuple(), remapped)
        ordered = tuple(segments[k] for k in sorted(segments))
        out_annotations.append(PairAnnotation(edited_id, ann.ref_id, ordered))
        query_features[edited_id] = edited
        source_of[edited_id] = ann.query_id

    # negative pairs: edited queries against references their source never copied
    candidates = [
        (qid, rid)
        for qid in sorted(query_features)
        for rid in ref_ids
        if (source_of[qid], rid) not in positive_keys
    ]
    n_neg = min(len(out_annotations), len(candidates))
    neg_rng = np.random.default_rng(np.random.SeedSequence(params.seed, spawn_key=(1,)))
    chosen = sorted(neg_rng.choice(len(candidates), size=n_neg, replace=False).tolist())
    for i in chosen:
        qid, rid = candidates[i]
        out_annotations.append(PairAnnotation(qid, rid, ()))

    used_refs = sorted({a.ref_id for a in out_annotations})
    return BuildResult(
        annotations=out_annotations,
        query_features=query_features,
        ref_ids=used_refs,
        excluded=sorted(excluded.items()),
        t=params.t,
    )


@dataclass(frozen=True)
class SyntheticConfig:
    """Controls the synthetic corpus generator.

    Lengths are drawn uniformly (inclusive ranges) per pair; each positive
    pair gets one planted copy of a length drawn from copy_length_range
    (clipped to both video lengths). noise_sigma scales i.i.d. Gaussian
    noise added to the copied feature rows before renormalization, which
    sets the expected planted-cell similarity to 1/sqrt(1 + sigma^2 * dim).
    """

    num_pairs: int
    ref_length_range: tuple[int, int] = (60, 120)
    query_length_range: tuple[int, int] = (30, 60)
    copy_length_range: tuple[int, int] = (10, 30)
    feature_dim: int = 64
    noise_sigma: float = 0.0
    negative_fraction: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.num_pairs < 1:
            raise ValidationError("num_pairs must be >= 1")
        for name in ("ref_length_range", "query_length_range", "copy_length_range"):
            lo, hi = getattr(self, name)
            object.__setattr__(self, name, (int(lo), int(hi)))
            if not 1 <= lo <= hi:
                raise ValidationError(f"{name} must satisfy 1 <= lo <= hi, got ({lo}, {hi})")
        if self.copy_length_range[0] > min(
            self.ref_length_range[0], self.query_length_range[0]
        ):
            raise ValidationError(
                "copy_length_range lower bound must fit the shortest possible video"
            )
        if self.feature_dim < 1:
            raise ValidationError("feature_dim must be >= 1")
        if self.noise_sigma < 0:
            raise ValidationError("noise_sigma must be >= 0")
        if not 0.0 <= self.negative_fraction <= 1.0:
            raise ValidationError("negative_fraction must be in [0, 1]")

    def to_dict(self) -> dict:
        return {
            "num_pairs": self.num_pairs,
            "ref_length_range": list(self.ref_length_range),
            "query_length_range": list(self.query_length_range),
            "copy_length_range": list(self.copy_length_range),
            "feature_dim": self.feature_dim,
            "noise_sigma": self.noise_sigma,
            "negative_fraction": self.negative_fraction,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SyntheticConfig":
        unknown = set(data) - {f for f in cls.__dataclass_fields__}
        if unknown:
            raise ValidationError(f"unknown SyntheticConfig fields: {sorted(unknown)}")
        data = dict(data)
        for name in ("ref_length_range", "query_length_range", "copy_length_range"):
            if name in data:
                data[name] = tuple(data[name])
        return cls(**data)

    @classmethod
    def from_json(cls, path: str | Path) -> "SyntheticConfig":
        return cls.from_dict(json.loads(Path(path).read_text()))


@dataclass
class SyntheticDataset:
    features: dict[str, FrameFeatureSequence]
    annotations: list[PairAnnotation]
    roles: dict[str, str]


def _random_unit_rows(rng: np.random.Generator, n: int, dim: int) -> np.ndarray:
    g = rng.standard_normal((n, dim))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def generate_synthetic(config: SyntheticConfig) -> SyntheticDataset:
    """One query/reference pair per index with an optional planted copy.

    Pair i uses the RNG stream SeedSequence(seed, spawn_key=(i,)) with a
    fixed draw order (ref length, query length, ref frames, query frames,
    then for positives: copy length, ref offset, query offset, noise), so
    any pair can be regenerated independently. The first
    num_pairs - round(num_pairs * negative_fraction) pairs are positive.
    """
    n_neg = int(round(config.num_pairs * config.negative_fraction))
    n_pos = config.num_pairs - n_neg
    width = max(4, len(str(config.num_pairs)))
    features: dict[str, FrameFeatureSequence] = {}
    annotations: list[PairAnnotation] = []
    roles: dict[str, str] = {}
    for i in range(config.num_pairs):
        rng = np.random.default_rng(np.random.SeedSequence(config.seed, spawn_key=(i,)))
        qid = f"q{i:0{width}d}"
        rid = f"r{i:0{width}d}"
        ref_len = int(rng.integers(config.ref_length_range[0], config.ref_length_range[1] + 1))
        q_len = int(rng.integers(config.query_length_range[0], config.query_length_range[1] + 1))
        ref = _random_unit_rows(rng, ref_len, config.feature_dim)
        query = _random_unit_rows(rng, q_len, config.feature_dim)
        if i < n_pos:
            c_hi = min(config.copy_length_range[1], ref_len, q_len)
            c = int(rng.integers(config.copy_length_range[0], c_hi + 1))
            r0 = int(rng.integers(0, ref_len - c + 1))
            q0 = int(rng.integers(0, q_len - c + 1))
            block = ref[r0 : r0 + c]
            if config.noise_sigma > 0:
                block = block + config.noise_sigma * rng.standard_normal(block.shape)
                block = block / np.linalg.norm(block, axis=1, keepdims=True)
            query[q0 : q0 + c] = block
            annotations.append(
                PairAnnotation(qid, rid, (CopySegmentPair(q0, q0 + c, r0, r0 + c),))
            )
        else:
            annotations.append(PairAnnotation(qid, rid, ()))
        features[rid] = FrameFeatureSequence(rid, ref)
        features[qid] = FrameFeatureSequence(qid, query)
        roles[qid] = "query"
        roles[rid] = "reference"
    return SyntheticDataset(features=features, annotations=annotations, roles=roles)


@dataclass
class LengthStats:
    """Per-pair lengths and a (role, length) histogram."""

    pairs: list[tuple[str, str, int, int]]  # query_id, ref_id, query_len, ref_len
    histogram: dict[tuple[str, int], int]


def length_stats(
    annotations: list[PairAnnotation], manifest: list[ManifestEntry]
) -> LengthStats:
    """Length summaries for reporting; every annotated video must be in the manifest."""
    lengths = {e.video_id: e.length_seconds for e in manifest}
    pairs = []
    for ann in sorted(annotations, key=lambda a: a.key):
        for vid in (ann.query_id, ann.ref_id):
            if vid not in lengths:
                raise ValidationError(f"annotated video {vid!r} missing from manifest")
        pairs.append((ann.query_id, ann.ref_id, lengths[ann.query_id], lengths[ann.ref_id]))
    histogram: dict[tuple[str, int], int] = {}
    for e in manifest:
        key = (e.role, e.length_seconds)
        histogram[key] = histogram.get(key, 0) + 1
    return LengthStats(pairs=pairs, histogram=histogram)


def write_length_stats(stats: LengthStats, out_dir: str | Path) -> None:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    with open(out_dir / "pair_lengths.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["query_id", "ref_id", "query_length", "ref_length"])
        writer.writerows(stats.pairs)
    with open(out_dir / "length_histogram.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["role", "length_seconds", "count"])
        for (role, length), count in sorted(stats.histogram.items()):
            writer.writerow([role, length, count])
