"""Experiment harness: configuration, runners, grid search, CLI."""

from .config import ExperimentConfig, GridSpec, threshold_grid
from .gridsearch import GridResult, grid_search
from .runner import (
    align_dataset,
    resolve_workers,
    run_segment_experiment,
    run_video_experiment,
)

__all__ = [
    "ExperimentConfig",
    "GridResult",
    "GridSpec",
    "align_dataset",
    "grid_search",
    "resolve_workers",
    "run_segment_experiment",
    "run_video_experiment",
    "threshold_grid",
]
