"""Command-line interface.

Subcommands: build-dataset, synth, align, evaluate, grid-search, stats,
segment-experiment, video-experiment. Worker count for parallel commands
comes from --workers or the SHORTVCD_WORKERS environment variable (default
serial).
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from ..align import METHODS, AlignParams, align
from ..core import ValidationError, VcdError, pair_key
from ..dataset import (
    ReconstructionParams,
    SyntheticConfig,
    build_asymmetric_dataset,
    generate_synthetic,
    length_stats,
    write_length_stats,
)
from ..fileio import (
    Dataset,
    load_annotations,
    load_detections,
    load_features,
    load_manifest,
    save_detections,
    write_dataset,
)
from ..metrics import MetricsReport, micro_average_precision
from ..simmatrix import compute_similarity_matrix, dump_matrix_csv, modify_with_ground_truth
from .config import ExperimentConfig, GridSpec, threshold_grid
from .gridsearch import grid_search, save_grid_results
from .runner import (
    align_dataset,
    resolve_workers,
    run_segment_experiment,
    run_video_experiment,
)

_ORACLE_FLAGS = {"diag": "diagonal-only", "zero": "zero-outside"}


def _int_list(text: str) -> tuple[int, ...]:
    return tuple(int(v) for v in text.split(","))


def _outfile(path: str) -> str:
    """Create the parent directory of a file output so plain paths work."""
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    return path


def _cmd_build_dataset(args) -> int:
    manifest_path = Path(args.in_manifest)
    entries = load_manifest(manifest_path)
    annotations = load_annotations(args.annotations)
    by_id = {e.video_id: e for e in entries}

    def loader(video_id: str):
        entry = by_id[video_id]
        return load_features(manifest_path.parent / entry.feature_path)

    params = ReconstructionParams(t=args.t, seed=args.seed)
    result = build_asymmetric_dataset(annotations, loader, params)
    features = dict(result.query_features)
    for rid in result.ref_ids:
        features[rid] = loader(rid)
    write_dataset(args.out, features, result.annotations, result.roles(), result.excluded)
    print(
        f"built t={args.t}: {sum(a.is_positive for a in result.annotations)} positive / "
        f"{sum(not a.is_positive for a in result.annotations)} negative pairs, "
        f"{len(result.excluded)} excluded"
    )
    return 0


def _cmd_synth(args) -> int:
    config = SyntheticConfig.from_json(args.config)
    data = generate_synthetic(config)
    write_dataset(args.out, data.features, data.annotations, data.roles)
    print(f"generated {config.num_pairs} pairs into {args.out}")
    return 0


def _cmd_align(args) -> int:
    dataset = Dataset(args.dataset)
    params_data = json.loads(Path(args.params).read_text()) if args.params else {}
    params_data.setdefault("method", args.method)
    if params_data["method"] != args.method:
        raise ValidationError(
            f"--method {args.method} conflicts with params file method {params_data['method']!r}"
        )
    params = AlignParams.from_dict(params_data)
    oracle = _ORACLE_FLAGS[args.oracle] if args.oracle else None
    detections = align_dataset(
        dataset, {args.method: params}, oracle, resolve_workers(args.workers)
    )[args.method]
    save_detections(_outfile(args.out), detections)
    if args.dump_matrices:
        dump_dir = Path(args.dump_matrices)
        dump_dir.mkdir(parents=True, exist_ok=True)
        for ann in dataset.annotations:
            matrix = compute_similarity_matrix(
                dataset.features(ann.ref_id), dataset.features(ann.query_id)
            )
            if oracle and ann.segments:
                matrix = modify_with_ground_truth(matrix, ann.segments, oracle)
            dump_matrix_csv(matrix, dump_dir / f"{pair_key(ann.query_id, ann.ref_id)}.csv")
    print(f"aligned {len(detections)} pairs with {args.method} -> {args.out}")
    return 0


def _cmd_evaluate(args) -> int:
    if args.level == "segment":
        if not (args.detections and args.dataset):
            raise ValidationError("--level segment needs --detections and --dataset")
        dataset = Dataset(args.dataset)
        detections = load_detections(args.detections)
        report = MetricsReport.segment(detections, dataset.annotations, args.aggregation)
        payload = report.to_dict()
    else:
        if not (args.scores and args.labels):
            raise ValidationError("--level video needs --scores and --labels")
        with open(args.scores, newline="") as fh:
            rows = list(csv.DictReader(fh))
        scores = [((r["id_a"], r["id_b"]), float(r["score"])) for r in rows]
        with open(args.labels, newline="") as fh:
            rows = list(csv.DictReader(fh))
        labels = [((r["id_a"], r["id_b"]), r["is_copy"] in ("1", "true", "True")) for r in rows]
        payload = {"map": micro_average_precision(scores, labels)}
    text = json.dumps(payload, indent=1, sort_keys=True) + "\n"
    if args.out:
        Path(_outfile(args.out)).write_text(text)
    sys.stdout.write(text)
    return 0


def _cmd_grid_search(args) -> int:
    dataset = Dataset(args.dataset)
    grid = GridSpec(
        thresholds=threshold_grid(args.step),
        max_gaps=args.max_gaps,
        min_lengths=args.min_lengths,
        bin_widths=args.bin_widths,
        penalties=tuple(float(v) for v in args.penalties.split(",")),
        bands=tuple(None if v == "none" else int(v) for v in args.bands.split(",")),
    )
    methods = tuple(args.methods.split(","))
    oracle = _ORACLE_FLAGS[args.oracle] if args.oracle else None
    results = grid_search(
        dataset,
        methods,
        grid,
        objective=args.objective,
        oracle_mode=oracle,
        workers=resolve_workers(args.workers),
        holdout=args.holdout,
    )
    save_grid_results(_outfile(args.out), results)
    for method in sorted(results):
        r = results[method]
        print(
            f"{method}: {args.objective}={r.score:.4f} at threshold="
            f"{r.best.sim_threshold:g} max_gap={r.best.max_gap} min_length={r.best.min_length}"
        )
    return 0


def _cmd_stats(args) -> int:
    dataset = Dataset(args.dataset)
    stats = length_stats(dataset.annotations, dataset.entries)
    write_length_stats(stats, args.out)
    print(f"wrote stats for {len(stats.pairs)} pairs -> {args.out}")
    return 0


def _cmd_segment_experiment(args) -> int:
    config = ExperimentConfig.from_json(args.config)
    if args.workers is not None:
        config.workers = args.workers
    rows = run_segment_experiment(config, args.out)
    for row in rows:
        print(
            f"{row['label']} {row['method']}: SF1={row['sf1']:.4f} mSF1={row['msf1']:.4f}"
        )
    return 0


def _cmd_video_experiment(args) -> int:
    config = ExperimentConfig.from_json(args.config)
    if args.workers is not None:
        config.workers = args.workers
    rows = run_video_experiment(config, args.out)
    for row in rows:
        print(f"{row['label']} {row['method']}: mAP={row['map']:.4f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="shortvcd", description="Copy detection for short video queries."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build-dataset", help="reconstruct queries at a fixed length t")
    p.add_argument("--t", type=int, required=True, help="query length in seconds")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--in", dest="in_manifest", required=True, help="source manifest CSV")
    p.add_argument("--annotations", required=True, help="source annotations JSON")
    p.add_argument("--out", required=True, help="output dataset directory")
    p.set_defaults(func=_cmd_build_dataset)

    p = sub.add_parser("synth", help="generate a synthetic planted-copy dataset")
    p.add_argument("--config", required=True, help="SyntheticConfig JSON file")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("align", help="detect copy segments for every annotated pair")
    p.add_argument("--dataset", required=True)
    p.add_argument("--method", choices=METHODS, required=True)
    p.add_argument("--params", help="AlignParams JSON file")
    p.add_argument("--out", required=True, help="detections JSON output")
    p.add_argument("--oracle", choices=sorted(_ORACLE_FLAGS))
    p.add_argument("--dump-matrices", help="directory for per-pair similarity CSV dumps")
    p.add_argument("--workers", type=int)
    p.set_defaults(func=_cmd_align)

    p = sub.add_parser("evaluate", help="compute metrics from detections or scores")
    p.add_argument("--level", choices=("segment", "video"), required=True)
    p.add_argument("--detections")
    p.add_argument("--dataset")
    p.add_argument("--aggregation", choices=("pooled", "per-pair-mean"), default="pooled")
    p.add_argument("--scores", help="CSV id_a,id_b,score (video level)")
    p.add_argument("--labels", help="CSV id_a,id_b,is_copy (video level)")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("grid-search", help="tune hyperparameters exhaustively")
    p.add_argument("--dataset", required=True)
    p.add_argument("--methods", default=",".join(METHODS))
    p.add_argument("--objective", choices=("sf1", "msf1"), default="sf1")
    p.add_argument("--step", type=float, default=0.01)
    p.add_argument("--max-gaps", type=_int_list, default=(1, 2, 3, 5))
    p.add_argument("--min-lengths", type=_int_list, default=(1, 2, 3))
    p.add_argument("--bin-widths", type=_int_list, default=(1,))
    p.add_argument("--penalties", default="0.5")
    p.add_argument("--bands", default="none")
    p.add_argument("--oracle", choices=sorted(_ORACLE_FLAGS))
    p.add_argument("--holdout", action="store_true")
    p.add_argument("--out", required=True)
    p.add_argument("--workers", type=int)
    p.set_defaults(func=_cmd_grid_search)

    p = sub.add_parser("stats", help="dataset length statistics")
    p.add_argument("--dataset", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_stats)

    p = sub.add_parser("segment-experiment", help="align + evaluate per config file")
    p.add_argument("--config", required=True, help="ExperimentConfig JSON")
    p.add_argument("--out", required=True)
    p.add_argument("--workers", type=int)
    p.set_defaults(func=_cmd_segment_experiment)

    p = sub.add_parser("video-experiment", help="pair ranking mAP per config file")
    p.add_argument("--config", required=True, help="ExperimentConfig JSON")
    p.add_argument("--out", required=True)
    p.add_argument("--workers", type=int)
    p.set_defaults(func=_cmd_video_experiment)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (VcdError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
