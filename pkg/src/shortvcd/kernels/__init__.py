"""Alignment kernels with a compiled fast path and a pure-Python fallback.

The compiled extension is preferred when importable; set SHORTVCD_PURE=1 to
force the fallback. ``BACKEND`` records which one is active.
"""

from __future__ import annotations

import os

if os.environ.get("SHORTVCD_PURE"):
    from . import _pure as _impl

    BACKEND = "pure"
else:
    try:
        from . import _speedups as _impl  # type: ignore[attr-defined]

        BACKEND = "compiled"
    except ImportError:
        from . import _pure as _impl

        BACKEND = "pure"

dp_local_runs = _impl.dp_local_runs
tn_extract = _impl.tn_extract
dtw_path = _impl.dtw_path

__all__ = ["BACKEND", "dp_local_runs", "tn_extract", "dtw_path"]
