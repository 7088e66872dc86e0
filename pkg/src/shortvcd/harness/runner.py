"""Experiment execution: per-pair alignment/scoring, parallelized over pairs.

Workers communicate via plain picklable values and integer/float tallies
are merged in task order, so results are identical for any worker count.
Worker count resolution: explicit config value, else SHORTVCD_WORKERS, else
serial.
"""

from __future__ import annotations

import multiprocessing
import os
from pathlib import Path

from ..align import AlignParams, align
from ..core import CopySegmentPair, DetectionResult, ValidationError
from ..fileio import Dataset, save_detections
from ..metrics import MetricsReport, micro_average_precision
from ..simmatrix import compute_similarity_matrix, modify_with_ground_truth
from ..videolevel import VIDEO_METHODS, enumerate_pairs, score_pair
from .config import ExperimentConfig
from .reports import write_run_manifest, write_segment_report, write_video_report


def resolve_workers(explicit: int | None = None) -> int:
    if explicit is not None:
        return max(1, int(explicit))
    env = os.environ.get("SHORTVCD_WORKERS")
    if env:
        return max(1, int(env))
    return 1


_CTX: dict = {}


def parallel_map(fn, items, workers: int, initializer, initargs) -> list:
    """Ordered map with optional process pool; serial when workers <= 1."""
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        initializer(*initargs)
        return [fn(item) for item in items]
    chunk = max(1, len(items) // (workers * 8))
    with multiprocessing.Pool(workers, initializer=initializer, initargs=initargs) as pool:
        return pool.map(fn, items, chunksize=chunk)


def _init_align(root, params_by_method, oracle_mode):
    ds = Dataset(root)
    _CTX["ds"] = ds
    _CTX["ann"] = {a.key: a for a in ds.annotations}
    _CTX["params"] = params_by_method
    _CTX["oracle"] = oracle_mode


def _align_one(key: str):
    ds = _CTX["ds"]
    ann = _CTX["ann"][key]
    matrix = compute_similarity_matrix(ds.features(ann.ref_id), ds.features(ann.query_id))
    if _CTX["oracle"] is not None and ann.segments:
        matrix = modify_with_ground_truth(matrix, ann.segments, _CTX["oracle"])
    out = {}
    for method, params in _CTX["params"].items():
        segs = align(matrix, params)
        out[method] = [(s.segment.as_tuple(), s.score) for s in segs]
    return key, out


def align_dataset(
    dataset: Dataset,
    params_by_method: dict[str, AlignParams],
    oracle_mode: str | None = None,
    workers: int = 1,
) -> dict[str, list[DetectionResult]]:
    """Align every annotated pair with every method.

    Oracle modification (when requested) applies to positive pairs only;
    negatives have no ground truth to overwrite. Returns detections in pair
    key order per method.
    """
    keys = sorted(a.key for a in dataset.annotations)
    if len(keys) != len(dataset.annotations):
        raise ValidationError("duplicate pair keys in dataset annotations")
    results = parallel_map(
        _align_one,
        keys,
        workers,
        _init_align,
        (dataset.root, params_by_method, oracle_mode),
    )
    by_key = {a.key: a for a in dataset.annotations}
    out: dict[str, list[DetectionResult]] = {m: [] for m in params_by_method}
    for key, per_method in results:
        ann = by_key[key]
        for method, raw in per_method.items():
            segments = tuple(CopySegmentPair(*tup) for tup, _ in raw)
            scores = tuple(score for _, score in raw)
            out[method].append(
                DetectionResult(
                    ann.query_id,
                    ann.ref_id,
                    segments,
                    segment_scores=scores,
                    score=max(scores) if scores else None,
                )
            )
    return out


def run_segment_experiment(
    config: ExperimentConfig, out_dir: str | Path | None = None
) -> list[dict]:
    """Align + evaluate every (dataset label, method); optionally write reports.

    Returns rows {label, method, sr, sp, sf1, msr, msp, msf1}. When out_dir
    is given, also writes segment_report.csv/.json, per-combination
    detection files, and a run manifest.
    """
    workers = resolve_workers(config.workers)
    rows = []
    detections_files = {}
    for label in sorted(config.datasets):
        dataset = Dataset(config.datasets[label])
        params = {m: config.params_for(m) for m in config.methods}
        detections = align_dataset(dataset, params, config.oracle_mode, workers)
        for method in config.methods:
            report = MetricsReport.segment(
                detections[method], dataset.annotations, config.macro_aggregation
            )
            rows.append({"label": label, "method": method, **report.to_dict()})
            detections_files[(label, method)] = detections[method]
    if out_dir is not None:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        write_segment_report(rows, out_dir)
        for (label, method), dets in sorted(detections_files.items()):
            save_detections(out_dir / f"detections_{label}_{method}.json", dets)
        write_run_manifest(out_dir, config.to_dict())
    return rows


def _init_video(root, window):
    ds = Dataset(root)
    _CTX["ds"] = ds
    _CTX["window"] = window


def _orient(ds: Dataset, a: str, b: str) -> tuple[str, str]:
    """(reference, query) order for a pair: manifest roles first, then the
    longer video, then lexicographic order."""
    ea, eb = ds.manifest[a], ds.manifest[b]
    if ea.role != eb.role:
        return (a, b) if ea.role == "reference" else (b, a)
    if ea.length_seconds != eb.length_seconds:
        return (a, b) if ea.length_seconds > eb.length_seconds else (b, a)
    return (a, b)


def _score_one(pair: tuple[str, str]):
    ds = _CTX["ds"]
    ref_id, query_id = _orient(ds, *pair)
    ref, query = ds.features(ref_id), ds.features(query_id)
    return pair, {
        method: score_pair(method, ref, query, window=_CTX["window"])
        for method in VIDEO_METHODS
    }


def run_video_experiment(
    config: ExperimentConfig, out_dir: str | Path | None = None
) -> list[dict]:
    """Score all video pairs of each dataset with f2f/g2g/sm2g and compute mAP.

    Every unordered pair of manifest videos is scored; a pair is positive
    when the dataset annotates it with at least one segment. Raises if a
    dataset has no positive pair (mAP undefined).
    """
    workers = resolve_workers(config.workers)
    rows = []
    score_tables = {}
    for label in sorted(config.datasets):
        dataset = Dataset(config.datasets[label])
        positives = {
            frozenset((a.query_id, a.ref_id)) for a in dataset.annotations if a.is_positive
        }
        if not positives:
            raise ValidationError(f"dataset {label!r} has no positive pairs; mAP undefined")
        pairs = enumerate_pairs(dataset.video_ids)
        labels = [(pair, frozenset(pair) in positives) for pair in pairs]
        results = parallel_map(
            _score_one, pairs, workers, _init_video, (dataset.root, config.sm2g_window)
        )
        score_tables[label] = results
        for method in VIDEO_METHODS:
            scores = [(pair, per_method[method]) for pair, per_method in results]
            ap = micro_average_precision(scores, labels)
            rows.append({"label": label, "method": method, "map": ap})
    if out_dir is not None:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        write_video_report(rows, score_tables, out_dir)
        write_run_manifest(out_dir, config.to_dict())
    return rows
