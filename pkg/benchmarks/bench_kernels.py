"""Benchmark the compiled alignment kernels against the pure-Python fallback.

Times dp_local_runs, tn_extract and dtw_path on synthetic similarity
matrices with a planted diagonal (roughly what real pairs look like) and
prints per-kernel medians plus the speedup. Outputs are cross-checked so a
fast-but-wrong kernel fails loudly.

Usage:
    python benchmarks/bench_kernels.py
    python benchmarks/bench_kernels.py --sizes 120x60,600x60 --repeats 9
"""

import argparse
import statistics
import sys
import time

import numpy as np

from shortvcd.kernels import _pure

try:
    from shortvcd.kernels import _speedups
except ImportError:  # built without the extension
    _speedups = None


def make_matrix(n_ref, n_query, rng):
    values = rng.normal(0.0, 0.125, size=(n_ref, n_query))
    span = min(n_ref, n_query, max(4, n_query // 2))
    i0 = int(rng.integers(0, n_ref - span + 1))
    j0 = int(rng.integers(0, n_query - span + 1))
    for k in range(span):
        values[i0 + k, j0 + k] = rng.normal(0.6, 0.05)
    return np.ascontiguousarray(np.clip(values, -1.0, 1.0))


def tn_nodes(values, threshold):
    ii, jj = np.nonzero(values >= threshold)
    return (
        ii.astype(np.int64),
        jj.astype(np.int64),
        np.ascontiguousarray(values[ii, jj], dtype=np.float64),
    )


def timed(fn, args, repeats):
    best = []
    result = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        result = fn(*args)
        best.append(time.perf_counter() - t0)
    return statistics.median(best), result


def check_equal(kernel, a, b):
    if kernel == "dtw_path":
        np.testing.assert_array_equal(a[0], b[0])
        np.testing.assert_array_equal(a[1], b[1])
        return
    assert len(a) == len(b), f"{kernel}: {len(a)} vs {len(b)} results"
    for ra, rb in zip(a, b):
        assert tuple(ra[:4]) == tuple(rb[:4]), f"{kernel}: bounds differ"
        assert abs(ra[4] - rb[4]) < 1e-9, f"{kernel}: scores differ"


def run(sizes, repeats, threshold, max_gap, seed):
    rng = np.random.default_rng(seed)
    backends = [("pure", _pure)] + ([("compiled", _speedups)] if _speedups else [])
    if _speedups is None:
        print("note: compiled extension not importable, timing the fallback only")
    header = f"{'kernel':<14}{'matrix':<12}" + "".join(f"{name:>12}" for name, _ in backends)
    if _speedups is not None:
        header += f"{'speedup':>10}"
    print(header)
    print("-" * len(header))

    for n_ref, n_query in sizes:
        values = make_matrix(n_ref, n_query, rng)
        ii, jj, ss = tn_nodes(values, threshold)
        cases = [
            ("dp_local_runs", lambda impl: (impl.dp_local_runs, (values, threshold, 0.5))),
            (
                "tn_extract",
                lambda impl: (
                    impl.tn_extract,
                    (ii, jj, ss, n_ref, n_query, max_gap, 1.0, 64),
                ),
            ),
            ("dtw_path", lambda impl: (impl.dtw_path, (values, -1))),
        ]
        for kernel, bind in cases:
            row = f"{kernel:<14}{f'{n_ref}x{n_query}':<12}"
            timings, results = [], []
            for _, impl in backends:
                fn, args = bind(impl)
                t, result = timed(fn, args, repeats)
                timings.append(t)
                results.append(result)
                row += f"{t * 1e3:>10.3f}ms"
            if len(results) == 2:
                check_equal(kernel, results[0], results[1])
                row += f"{timings[0] / timings[1]:>9.1f}x"
            print(row)


def parse_sizes(text):
    sizes = []
    for chunk in text.split(","):
        n_ref, _, n_query = chunk.strip().partition("x")
        sizes.append((int(n_ref), int(n_query)))
    return sizes


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument(
        "--sizes",
        default="60x30,120x60,300x60,600x60",
        help="comma-separated ref x query matrix sizes (default %(default)s)",
    )
    parser.add_argument("--repeats", type=int, default=7, help="timing repeats (median)")
    parser.add_argument("--threshold", type=float, default=0.3, help="similarity gate")
    parser.add_argument("--max-gap", type=int, default=2, help="tn chain gap")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)
    run(parse_sizes(args.sizes), args.repeats, args.threshold, args.max_gap, args.seed)
    return 0


if __name__ == "__main__":
    sys.exit(main())
