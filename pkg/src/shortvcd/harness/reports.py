"""Deterministic report emission (CSV for tables, JSON for tooling).

No timestamps or host details go into any output, so identical runs produce
byte-identical files.
"""

from __future__ import annotations

import csv
import json
import platform
from pathlib import Path

import numpy as np

from .. import __version__
from ..kernels import BACKEND

_SEGMENT_METRICS = ["sr", "sp", "sf1", "msr", "msp", "msf1"]


def _fmt(value: float) -> str:
    return f"{value:.6f}"


def write_segment_report(rows: list[dict], out_dir: Path) -> None:
    """rows: {label, method, sr, sp, sf1, msr, msp, msf1} per experiment cell."""
    ordered = sorted(rows, key=lambda r: (r["label"], r["method"]))
    with open(out_dir / "segment_report.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["label", "method"] + _SEGMENT_METRICS)
        for row in ordered:
            writer.writerow([row["label"], row["method"]] + [_fmt(row[m]) for m in _SEGMENT_METRICS])
    payload = {
        row["label"]: {} for row in ordered
    }
    for row in ordered:
        payload[row["label"]][row["method"]] = {m: row[m] for m in _SEGMENT_METRICS}
    (out_dir / "segment_report.json").write_text(
        json.dumps(payload, indent=1, sort_keys=True) + "\n"
    )


def write_video_report(rows: list[dict], score_tables: dict, out_dir: Path) -> None:
    """rows: {label, method, map}; score_tables: label -> [(pair, {method: score})]."""
    ordered = sorted(rows, key=lambda r: (r["label"], r["method"]))
    with open(out_dir / "video_report.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["label", "method", "map"])
        for row in ordered:
            writer.writerow([row["label"], row["method"], _fmt(row["map"])])
    payload: dict = {}
    for row in ordered:
        payload.setdefault(row["label"], {})[row["method"]] = row["map"]
    (out_dir / "video_report.json").write_text(
        json.dumps(payload, indent=1, sort_keys=True) + "\n"
    )
    for label in sorted(score_tables):
        with open(out_dir / f"video_scores_{label}.csv", "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["id_a", "id_b", "f2f", "g2g", "sm2g"])
            for (a, b), per_method in score_tables[label]:
                writer.writerow(
                    [a, b, _fmt(per_method["f2f"]), _fmt(per_method["g2g"]), _fmt(per_method["sm2g"])]
                )


def write_run_manifest(out_dir: Path, config: dict) -> None:
    manifest = {
        "config": config,
        "versions": {
            "python": platform.python_version(),
            "numpy": np.__version__,
            "shortvcd": __version__,
            "kernels": BACKEND,
        },
    }
    (Path(out_dir) / "run_manifest.json").write_text(
        json.dumps(manifest, indent=1, sort_keys=True) + "\n"
    )
