"""Exhaustive hyperparameter search.

Every grid setting is evaluated on every pair; per-pair results are reduced
to integer tallies (the PairCounts fields) so the cross-pair merge is an
order-independent integer sum and the search is reproducible for any worker
count. Structure shared across settings keeps this tractable: HV vote
tables, TN extractions and DP scans are computed once per threshold/
structure group and re-filtered per min_length; DTW warp paths are computed
once per band (they do not depend on the threshold).

The argmax uses deterministic tie-breaking: settings are enumerated in
ascending (threshold, max_gap, others) order and the first maximum wins.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..align import AlignParams
from ..align._segments import resolve_arrays
from ..align.dtw import path_runs, warp_path
from ..align.dynprog import dp_runs
from ..align.hough import hv_candidates
from ..align.temporal_net import tn_chains
from ..core import ValidationError
from ..fileio import Dataset
from ..metrics import counts_raw, f1
from ..simmatrix import compute_similarity_matrix, modify_with_ground_truth
from .config import GridSpec
from .runner import _CTX, parallel_map

OBJECTIVES = ("sf1", "msf1")

_N_COUNTS = 10  # the PairCounts fields, in dataclass order


@dataclass(frozen=True)
class GridResult:
    method: str
    best: AlignParams
    objective: str
    score: float
    n_settings: int

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "best": self.best.to_dict(),
            "objective": self.objective,
            "score": self.score,
            "n_settings": self.n_settings,
        }


def _plan(method: str, settings: list[AlignParams]):
    """Group setting indices by shared structure (everything but min_length)."""
    groups: dict[tuple, list[tuple[int, int]]] = {}
    for idx, p in enumerate(settings):
        if method == "hv":
            key = (p.sim_threshold, p.max_gap, p.offset_bin_width)
        elif method == "tn":
            key = (p.sim_threshold, p.max_gap)
        elif method == "dp":
            key = (p.sim_threshold, p.diag_penalty)
        else:
            key = (p.band_radius, p.sim_threshold)
        groups.setdefault(key, []).append((p.min_length, idx))
    return list(groups.items())


def _counts_into(tallies, idx, gt, qs, qe, rs, re, score, cap) -> None:
    kept = resolve_arrays(qs, qe, rs, re, score, cap)
    dets = [(int(qs[i]), int(qe[i]), int(rs[i]), int(re[i])) for i in kept]
    tallies[idx] = counts_raw(gt, dets)


def _init_grid(root, plans, min_floor, n_settings, oracle_mode, cap):
    ds = Dataset(root)
    _CTX["ds"] = ds
    _CTX["ann"] = {a.key: a for a in ds.annotations}
    _CTX["plans"] = plans
    _CTX["min_floor"] = min_floor
    _CTX["n_settings"] = n_settings
    _CTX["oracle"] = oracle_mode
    _CTX["cap"] = cap


def _grid_one(key: str):
    ann = _CTX["ann"][key]
    ds = _CTX["ds"]
    matrix = compute_similarity_matrix(ds.features(ann.ref_id), ds.features(ann.query_id))
    if _CTX["oracle"] is not None and ann.segments:
        matrix = modify_with_ground_truth(matrix, ann.segments, _CTX["oracle"])
    values = matrix.values
    gt = [s.as_tuple() for s in ann.segments]
    floor = _CTX["min_floor"]
    cap = _CTX["cap"]
    out = {}
    for method, groups in _CTX["plans"].items():
        tallies = np.zeros((_CTX["n_settings"][method], _N_COUNTS), dtype=np.int64)
        if method == "hv":
            for (th, gap, bw), members in groups:
                cand = hv_candidates(values, th, bw, gap, vote_floor=floor)
                qs, qe = cand["qs"], cand["qe"]
                rs, re = cand["rs"], cand["re"]
                votes, score = cand["votes"], cand["score"]
                spans = np.minimum(qe - qs, re - rs)
                for min_len, idx in members:
                    mask = (votes >= min_len) & (spans >= min_len)
                    _counts_into(
                        tallies, idx, gt, qs[mask], qe[mask], rs[mask], re[mask],
                        score[mask], cap,
                    )
        elif method == "tn":
            for (th, gap), members in groups:
                chains = tn_chains(values, th, gap, stop_weight=float(floor), max_chains=cap)
                arr = np.asarray(chains, dtype=np.float64).reshape(-1, 6)
                qs, qe, rs, re = (arr[:, k].astype(np.int64) for k in range(4))
                weight = arr[:, 4]
                for min_len, idx in members:
                    # extraction weights are non-increasing, so a stricter
                    # stop rule keeps exactly a prefix
                    n_keep = int(np.searchsorted(-weight, -float(min_len), side="right"))
                    _counts_into(
                        tallies, idx, gt, qs[:n_keep], qe[:n_keep], rs[:n_keep],
                        re[:n_keep], weight[:n_keep], cap,
                    )
        elif method == "dp":
            for (th, pen), members in groups:
                runs = dp_runs(values, th, pen)
                arr = np.asarray(runs, dtype=np.float64).reshape(-1, 5)
                qs, qe, rs, re = (arr[:, k].astype(np.int64) for k in range(4))
                score = arr[:, 4]
                spans = np.minimum(qe - qs, re - rs)
                for min_len, idx in members:
                    mask = spans >= min_len
                    _counts_into(
                        tallies, idx, gt, qs[mask], qe[mask], rs[mask], re[mask],
                        score[mask], cap,
                    )
        else:  # dtw: one warp path per band serves every threshold
            by_band: dict = {}
            for (band, th), members in groups:
                by_band.setdefault(band, []).append((th, members))
            for band, th_groups in by_band.items():
                rows, cols = warp_path(values, band)
                sims = values[rows, cols]
                for th, members in th_groups:
                    runs = path_runs(rows, cols, sims, th)
                    arr = np.asarray(runs, dtype=np.float64).reshape(-1, 6)
                    qs, qe, rs, re = (arr[:, k].astype(np.int64) for k in range(4))
                    score = arr[:, 4]
                    cells = arr[:, 5].astype(np.int64)
                    spans = np.minimum(qe - qs, re - rs)
                    for min_len, idx in members:
                        mask = (cells >= min_len) & (spans >= min_len)
                        _counts_into(
                            tallies, idx, gt, qs[mask], qe[mask], rs[mask], re[mask],
                            score[mask], cap,
                        )
        out[method] = tallies
    return key, out


def _objective_values(totals: np.ndarray, objective: str) -> np.ndarray:
    """Vector of objective values, one per setting, from summed tallies."""
    t = totals.astype(np.float64)
    with np.errstate(invalid="ignore", divide="ignore"):
        if objective == "sf1":
            recall = np.where(t[:, 0] > 0, t[:, 1] / np.maximum(t[:, 0], 1), 0.0)
            precision = np.where(t[:, 2] > 0, t[:, 3] / np.maximum(t[:, 2], 1), 0.0)
        else:  # msf1, pooled frame ratios
            recall = np.where(t[:, 4] > 0, t[:, 8] / np.maximum(t[:, 4], 1), 0.0) * np.where(
                t[:, 5] > 0, t[:, 9] / np.maximum(t[:, 5], 1), 0.0
            )
            precision = np.where(t[:, 6] > 0, t[:, 8] / np.maximum(t[:, 6], 1), 0.0) * np.where(
                t[:, 7] > 0, t[:, 9] / np.maximum(t[:, 7], 1), 0.0
            )
        denom = precision + recall
        return np.where(denom > 0, 2 * precision * recall / np.maximum(denom, 1e-300), 0.0)


def grid_search(
    dataset: Dataset,
    methods: tuple[str, ...],
    grid: GridSpec,
    objective: str = "sf1",
    oracle_mode: str | None = None,
    workers: int = 1,
    max_detections: int = 64,
    holdout: bool = False,
) -> dict[str, GridResult]:
    """Exhaustively evaluate the grid and return the best setting per method.

    By default the search optimizes on the given dataset itself (matching
    tune-on-test practice); with holdout=True settings are chosen on the
    even-indexed pairs (sorted by key) and the reported score comes from the
    odd-indexed rest.
    """
    if objective not in OBJECTIVES:
        raise ValidationError(f"objective must be one of {OBJECTIVES}")
    settings = {m: grid.settings(m) for m in methods}
    plans = {m: _plan(m, s) for m, s in settings.items()}
    n_settings = {m: len(s) for m, s in settings.items()}
    floor = min(grid.min_lengths)
    keys = sorted(a.key for a in dataset.annotations)
    results = parallel_map(
        _grid_one,
        keys,
        workers,
        _init_grid,
        (dataset.root, plans, floor, n_settings, oracle_mode, max_detections),
    )

    out = {}
    for method in methods:
        tune = np.zeros((n_settings[method], _N_COUNTS), dtype=np.int64)
        eval_ = np.zeros_like(tune)
        for pos, (_, tallies) in enumerate(results):
            if holdout and pos % 2 == 1:
                eval_ += tallies[method]
            else:
                tune += tallies[method]
        values = _objective_values(tune, objective)
        best_idx = int(np.argmax(values))  # first max = tie-break order
        score = values[best_idx]
        if holdout:
            score = _objective_values(eval_[best_idx : best_idx + 1], objective)[0]
        out[method] = GridResult(
            method=method,
            best=settings[method][best_idx],
            objective=objective,
            score=float(score),
            n_settings=n_settings[method],
        )
    return out


def save_grid_results(path: str | Path, results: dict[str, GridResult]) -> None:
    data = {m: r.to_dict() for m, r in sorted(results.items())}
    Path(path).write_text(json.dumps(data, indent=1, sort_keys=True) + "\n")
