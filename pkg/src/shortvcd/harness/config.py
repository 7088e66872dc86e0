"""Experiment and grid-search configuration."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from ..align import METHODS, AlignParams
from ..core import ValidationError
from ..metrics import AGGREGATIONS
from ..simmatrix import MODIFY_MODES


def threshold_grid(step: float = 0.01) -> tuple[float, ...]:
    """sim_threshold values 0..1 inclusive on a fixed step."""
    if step <= 0:
        raise ValidationError("grid step must be > 0")
    n = int(round(1.0 / step))
    return tuple(round(k * step, 10) for k in range(n + 1))


@dataclass(frozen=True)
class GridSpec:
    """Hyperparameter grid: thresholds crossed with per-method structure.

    HV/TN sweep max_gaps x min_lengths (HV also bin_widths); DP sweeps
    penalties x min_lengths; DTW sweeps bands x min_lengths.
    """

    thresholds: tuple[float, ...] = field(default_factory=threshold_grid)
    max_gaps: tuple[int, ...] = (1, 2, 3, 5)
    min_lengths: tuple[int, ...] = (1, 2, 3)
    bin_widths: tuple[int, ...] = (1,)
    penalties: tuple[float, ...] = (0.5,)
    bands: tuple[int | None, ...] = (None,)

    def __post_init__(self):
        for name in ("thresholds", "max_gaps", "min_lengths", "bin_widths", "penalties", "bands"):
            values = tuple(getattr(self, name))
            if not values:
                raise ValidationError(f"grid {name} must be non-empty")
            if len(set(values)) != len(values):
                raise ValidationError(f"grid {name} has duplicates")
            object.__setattr__(self, name, values)

    def settings(self, method: str) -> list[AlignParams]:
        """All grid points for one method, in tie-break order.

        Ties in the objective are broken by taking the first setting in
        this enumeration: ascending threshold, then max_gap, then the
        remaining fields ascending (None band = unbounded sorts last).
        """
        thresholds = sorted(self.thresholds)
        min_lengths = sorted(self.min_lengths)
        out = []
        if method in ("hv", "tn"):
            for th in thresholds:
                for gap in sorted(self.max_gaps):
                    for bw in sorted(self.bin_widths) if method == "hv" else [1]:
                        for ml in min_lengths:
                            out.append(
                                AlignParams(
                                    method=method,
                                    sim_threshold=th,
                                    max_gap=gap,
                                    min_length=ml,
                                    offset_bin_width=bw,
                                )
                            )
        elif method == "dp":
            for th in thresholds:
                for pen in sorted(self.penalties):
                    for ml in min_lengths:
                        out.append(
                            AlignParams(
                                method="dp", sim_threshold=th, diag_penalty=pen, min_length=ml
                            )
                        )
        elif method == "dtw":
            for th in thresholds:
                for band in sorted(self.bands, key=lambda b: math.inf if b is None else b):
                    for ml in min_lengths:
                        out.append(
                            AlignParams(
                                method="dtw", sim_threshold=th, band_radius=band, min_length=ml
                            )
                        )
        else:
            raise ValidationError(f"unknown method {method!r}")
        return out

    def to_dict(self) -> dict:
        return {
            "thresholds": list(self.thresholds),
            "max_gaps": list(self.max_gaps),
            "min_lengths": list(self.min_lengths),
            "bin_widths": list(self.bin_widths),
            "penalties": list(self.penalties),
            "bands": list(self.bands),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "GridSpec":
        unknown = set(data) - {f for f in cls.__dataclass_fields__} - {"step"}
        if unknown:
            raise ValidationError(f"unknown GridSpec fields: {sorted(unknown)}")
        data = dict(data)
        step = data.pop("step", None)
        if step is not None and "thresholds" not in data:
            data["thresholds"] = threshold_grid(step)
        return cls(**{k: tuple(v) for k, v in data.items()})


@dataclass
class ExperimentConfig:
    """One experiment: datasets (label -> directory) x methods.

    Labels conventionally name the query length ("t10"); any label works.
    ``workers`` None defers to the SHORTVCD_WORKERS environment variable
    (default serial).
    """

    datasets: dict[str, str]
    methods: tuple[str, ...] = METHODS
    align_params: dict[str, AlignParams] = field(default_factory=dict)
    oracle_mode: str | None = None
    macro_aggregation: str = "pooled"
    sm2g_window: int = 10
    seed: int = 0
    workers: int | None = None

    def __post_init__(self):
        if not self.datasets:
            raise ValidationError("datasets must be non-empty")
        self.methods = tuple(self.methods)
        if not self.methods:
            raise ValidationError("methods must be non-empty")
        for m in self.methods:
            if m not in METHODS:
                raise ValidationError(f"unknown method {m!r} (use subset of {METHODS})")
        if self.oracle_mode is not None and self.oracle_mode not in MODIFY_MODES:
            raise ValidationError(
                f"oracle_mode must be None or one of {MODIFY_MODES}, got {self.oracle_mode!r}"
            )
        if self.macro_aggregation not in AGGREGATIONS:
            raise ValidationError(f"macro_aggregation must be one of {AGGREGATIONS}")
        if self.sm2g_window < 1:
            raise ValidationError("sm2g_window must be >= 1")
        if self.workers is not None and self.workers < 1:
            raise ValidationError("workers must be >= 1 or None")
        full = {}
        for m in self.methods:
            given = self.align_params.get(m)
            if given is None:
                full[m] = AlignParams(method=m)
            elif given.method != m:
                raise ValidationError(f"align_params[{m!r}] has method={given.method!r}")
            else:
                full[m] = given
        self.align_params = full

    def params_for(self, method: str) -> AlignParams:
        return self.align_params[method]

    def to_dict(self) -> dict:
        return {
            "datasets": dict(sorted(self.datasets.items())),
            "methods": list(self.methods),
            "align_params": {m: p.to_dict() for m, p in sorted(self.align_params.items())},
            "oracle_mode": self.oracle_mode,
            "macro_aggregation": self.macro_aggregation,
            "sm2g_window": self.sm2g_window,
            "seed": self.seed,
            "workers": self.workers,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        unknown = set(data) - {f for f in cls.__dataclass_fields__}
        if unknown:
            raise ValidationError(f"unknown ExperimentConfig fields: {sorted(unknown)}")
        data = dict(data)
        if "align_params" in data:
            parsed = {}
            for method, sub in data["align_params"].items():
                sub = dict(sub)
                sub.setdefault("method", method)
                parsed[method] = AlignParams.from_dict(sub)
            data["align_params"] = parsed
        if "methods" in data:
            data["methods"] = tuple(data["methods"])
        return cls(**data)

    @classmethod
    def from_json(cls, path: str | Path) -> "ExperimentConfig":
        return cls.from_dict(json.loads(Path(path).read_text()))
