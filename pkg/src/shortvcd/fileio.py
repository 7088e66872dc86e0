"""File formats: binary frame features, annotation/detection JSON, manifest CSV.

Feature file layout (little-endian):

    bytes 0-3   magic b"VCDF"
    bytes 4-7   u32 format version (currently 1)
    bytes 8-11  u32 feature dim
    bytes 12-15 u32 frame count
    then        count * dim float32, frame-major

The file stem is the video id. Annotation files are JSON objects mapping
"queryId-refId" keys to arrays of [qs, qe, rs, re] rows (detections may carry
a fifth score element); an empty array marks a negative pair.
"""

from __future__ import annotations

import csv
import json
import struct
from pathlib import Path

import numpy as np

from .core import (
    AnnotationError,
    CopySegmentPair,
    DetectionResult,
    FeatureFileError,
    FrameFeatureSequence,
    ManifestEntry,
    PairAnnotation,
    ValidationError,
    pair_key,
    split_pair_key,
)

FEATURE_MAGIC = b"VCDF"
FEATURE_VERSION = 1
_HEADER = struct.Struct("<4sIII")


def save_features(path: str | Path, seq: FrameFeatureSequence) -> None:
    """Write a feature file; the filename stem should equal seq.video_id."""
    path = Path(path)
    frames = np.ascontiguousarray(seq.frames, dtype="<f4")
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(FEATURE_MAGIC, FEATURE_VERSION, seq.dim, len(seq)))
        fh.write(frames.tobytes())


def load_features(path: str | Path) -> FrameFeatureSequence:
    """Read a feature file; the video id is the filename stem.

    Rows are renormalized on load so stored rounding noise cannot push
    similarities outside [-1, 1].
    """
    path = Path(path)
    with open(path, "rb") as fh:
        header = fh.read(_HEADER.size)
        if len(header) < _HEADER.size:
            raise FeatureFileError("bad_header", f"{path}: truncated header")
        magic, version, dim, count = _HEADER.unpack(header)
        if magic != FEATURE_MAGIC:
            raise FeatureFileError("bad_magic", f"{path}: bad magic {magic!r}")
        if version != FEATURE_VERSION:
            raise FeatureFileError("bad_version", f"{path}: unsupported version {version}")
        if dim < 1 or count < 1:
            raise FeatureFileError("bad_header", f"{path}: dim={dim} count={count}")
        payload = fh.read(4 * dim * count + 1)
    if len(payload) != 4 * dim * count:
        raise FeatureFileError(
            "truncated",
            f"{path}: expected {4 * dim * count} payload bytes, found {len(payload)}"
            + (" or more" if len(payload) > 4 * dim * count else ""),
        )
    frames = np.frombuffer(payload, dtype="<f4").reshape(count, dim)
    return FrameFeatureSequence(path.stem, frames)


def _segment_rows(path: str | Path, allow_scores: bool):
    """Parse an annotation/detection JSON file into (key, rows) pairs."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise AnnotationError(f"{path}: {exc}") from exc

    def reject_duplicates(pairs):
        seen = set()
        for key, _ in pairs:
            if key in seen:
                raise AnnotationError(f"{path}: duplicate pair key {key!r}")
            seen.add(key)
        return dict(pairs)

    try:
        data = json.loads(text, object_pairs_hook=reject_duplicates)
    except json.JSONDecodeError as exc:
        raise AnnotationError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    if not isinstance(data, dict):
        raise AnnotationError(f"{path}: top level must be an object")
    out = []
    for key, rows in data.items():
        if not isinstance(rows, list):
            raise AnnotationError(f"{path}: key {key!r}: value must be an array")
        parsed = []
        for row in rows:
            if not isinstance(row, list) or len(row) not in ((4, 5) if allow_scores else (4,)):
                raise AnnotationError(
                    f"{path}: key {key!r}: each row must be "
                    f"[qs, qe, rs, re{', score?' if allow_scores else ''}], got {row!r}"
                )
            parsed.append(row)
        out.append((key, parsed))
    return path, out


def load_annotations(path: str | Path) -> list[PairAnnotation]:
    """Load ground-truth annotations, preserving file order."""
    path, items = _segment_rows(path, allow_scores=False)
    annotations = []
    for key, rows in items:
        query_id, ref_id = split_pair_key(key)
        try:
            segments = tuple(CopySegmentPair(*row) for row in rows)
            annotations.append(PairAnnotation(query_id, ref_id, segments))
        except ValidationError as exc:
            raise AnnotationError(f"{path}: key {key!r}: {exc}") from exc
    return annotations


def save_annotations(path: str | Path, annotations: list[PairAnnotation]) -> None:
    """Write annotations with sorted keys (byte-deterministic)."""
    data = {}
    for ann in sorted(annotations, key=lambda a: a.key):
        if ann.key in data:
            raise ValidationError(f"duplicate pair {ann.key}")
        data[ann.key] = [list(seg.as_tuple()) for seg in ann.segments]
    Path(path).write_text(json.dumps(data, indent=1, sort_keys=True) + "\n")


def load_detections(path: str | Path) -> list[DetectionResult]:
    """Load detections; rows may carry an optional fifth score element."""
    path, items = _segment_rows(path, allow_scores=True)
    results = []
    for key, rows in items:
        query_id, ref_id = split_pair_key(key)
        if any(len(row) == 5 for row in rows) and not all(len(row) == 5 for row in rows):
            raise AnnotationError(f"{path}: key {key!r}: mixed scored and unscored rows")
        try:
            segments = tuple(CopySegmentPair(*row[:4]) for row in rows)
            scores = tuple(float(row[4]) for row in rows) if rows and len(rows[0]) == 5 else None
            results.append(DetectionResult(query_id, ref_id, segments, segment_scores=scores))
        except ValidationError as exc:
            raise AnnotationError(f"{path}: key {key!r}: {exc}") from exc
    return results


def save_detections(path: str | Path, detections: list[DetectionResult]) -> None:
    """Write detections with sorted keys; scores are kept when present."""
    data = {}
    for det in sorted(detections, key=lambda d: d.key):
        if det.key in data:
            raise ValidationError(f"duplicate pair {det.key}")
        rows = []
        for i, seg in enumerate(det.segments):
            row = list(seg.as_tuple())
            if det.segment_scores is not None:
                row.append(round(det.segment_scores[i], 6))
            rows.append(row)
        data[det.key] = rows
    Path(path).write_text(json.dumps(data, indent=1, sort_keys=True) + "\n")


_MANIFEST_FIELDS = ["video_id", "role", "length_seconds", "feature_path"]


def load_manifest(path: str | Path) -> list[ManifestEntry]:
    path = Path(path)
    entries = []
    seen = set()
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != _MANIFEST_FIELDS:
            raise AnnotationError(
                f"{path}: expected header {','.join(_MANIFEST_FIELDS)}, got {reader.fieldnames}"
            )
        for lineno, row in enumerate(reader, start=2):
            try:
                entry = ManifestEntry(
                    row["video_id"], row["role"], int(row["length_seconds"]), row["feature_path"]
                )
            except (ValueError, ValidationError) as exc:
                raise AnnotationError(f"{path}: line {lineno}: {exc}") from exc
            if entry.video_id in seen:
                raise AnnotationError(f"{path}: line {lineno}: duplicate video id {entry.video_id!r}")
            seen.add(entry.video_id)
            entries.append(entry)
    return entries


def save_manifest(path: str | Path, entries: list[ManifestEntry]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(_MANIFEST_FIELDS)
        for e in sorted(entries, key=lambda e: e.video_id):
            writer.writerow([e.video_id, e.role, e.length_seconds, e.feature_path])


def load_exclusions(path: str | Path) -> list[tuple[str, str]]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["video_id", "reason"]:
            raise AnnotationError(f"{path}: expected header video_id,reason")
        return [(row[0], row[1]) for row in reader]


def save_exclusions(path: str | Path, excluded: list[tuple[str, str]]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["video_id", "reason"])
        for video_id, reason in sorted(excluded):
            writer.writerow([video_id, reason])


class Dataset:
    """A dataset directory: manifest.csv, annotations.json, features/*.vcdf.

    Feature sequences are loaded lazily and cached.
    """

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.entries = load_manifest(self.root / "manifest.csv")
        self.manifest = {e.video_id: e for e in self.entries}
        self.annotations = load_annotations(self.root / "annotations.json")
        for ann in self.annotations:
            for vid in (ann.query_id, ann.ref_id):
                if vid not in self.manifest:
                    raise ValidationError(f"annotated video {vid!r} missing from manifest")
        self._cache: dict[str, FrameFeatureSequence] = {}

    @property
    def video_ids(self) -> list[str]:
        return sorted(self.manifest)

    def features(self, video_id: str) -> FrameFeatureSequence:
        if video_id not in self._cache:
            entry = self.manifest.get(video_id)
            if entry is None:
                raise ValidationError(f"video {video_id!r} not in manifest")
            seq = load_features(self.root / entry.feature_path)
            if len(seq) != entry.length_seconds:
                raise ValidationError(
                    f"{video_id}: manifest says {entry.length_seconds} frames, "
                    f"file has {len(seq)}"
                )
            self._cache[video_id] = seq
        return self._cache[video_id]


def write_dataset(
    root: str | Path,
    features: dict[str, FrameFeatureSequence],
    annotations: list[PairAnnotation],
    roles: dict[str, str],
    excluded: list[tuple[str, str]] | None = None,
) -> None:
    """Materialize a dataset directory (features/, manifest.csv, annotations.json)."""
    root = Path(root)
    (root / "features").mkdir(parents=True, exist_ok=True)
    entries = []
    for video_id in sorted(features):
        seq = features[video_id]
        rel = f"features/{video_id}.vcdf"
        save_features(root / rel, seq)
        entries.append(ManifestEntry(video_id, roles[video_id], len(seq), rel))
    save_manifest(root / "manifest.csv", entries)
    save_annotations(root / "annotations.json", annotations)
    if excluded is not None:
        save_exclusions(root / "excluded.csv", excluded)
