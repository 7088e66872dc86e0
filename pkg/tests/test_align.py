"""Behavior of the four alignment methods on crafted matrices."""

import numpy as np
import pytest

from shortvcd.align import METHODS, AlignParams, align
from shortvcd.core import ValidationError
from shortvcd.simmatrix import SimilarityMatrix

from oracles import oracle_hv_segments, oracle_sw_max, oracle_tn_best_weight


def _mat(values):
    return SimilarityMatrix(np.ascontiguousarray(values, dtype=np.float64))


def _diag_plant(n_ref, n_query, qs, qe, rs, value=1.0, noise=0.0, seed=0):
    rng = np.random.default_rng(seed)
    values = rng.uniform(0, noise, size=(n_ref, n_query)) if noise else np.zeros((n_ref, n_query))
    for k in range(qe - qs):
        values[rs + k, qs + k] = value
    return values


def _tuples(results):
    return [s.segment.as_tuple() for s in results]


# -------------------------------------------------------------- AlignParams


def test_params_validation():
    AlignParams("hv")
    for kwargs in [
        dict(method="nope"),
        dict(method="hv", sim_threshold=1.5),
        dict(method="hv", max_gap=0),
        dict(method="hv", min_length=0),
        dict(method="hv", offset_bin_width=0),
        dict(method="dp", diag_penalty=-1.0),
        dict(method="dtw", band_radius=0),
        dict(method="tn", max_detections=0),
    ]:
        with pytest.raises(ValidationError):
            AlignParams(**kwargs)


def test_params_dict_roundtrip():
    p = AlignParams("dtw", sim_threshold=0.4, band_radius=5)
    assert AlignParams.from_dict(p.to_dict()) == p
    assert p.with_(min_length=3).min_length == 3


# ----------------------------------------------------------------- shared


@pytest.mark.parametrize("method", METHODS)
def test_empty_on_all_zero(method):
    assert align(_mat(np.zeros((8, 6))), AlignParams(method, sim_threshold=0.3)) == []


@pytest.mark.parametrize("method", METHODS)
def test_perfect_diagonal_recovered_exactly(method):
    # 13 ref frames, 10 query frames, ones at offset ref = query + 3
    values = _diag_plant(13, 10, 0, 10, 3)
    out = align(_mat(values), AlignParams(method, sim_threshold=0.5, min_length=2))
    assert _tuples(out) == [(0, 10, 3, 13)]


@pytest.mark.parametrize("method", ["hv", "tn"])
def test_threshold_is_inclusive(method):
    # HV votes and TN nodes use the gate as set membership: a cell exactly
    # at the threshold counts as a match.
    at = AlignParams(method, sim_threshold=0.5, min_length=2)
    values = _diag_plant(8, 8, 1, 6, 1, value=0.5)
    assert _tuples(align(_mat(values), at)) == [(1, 6, 1, 6)]
    below = _diag_plant(8, 8, 1, 6, 1, value=0.4999999)
    assert align(_mat(below), at) == []


@pytest.mark.parametrize("method", ["dp", "dtw"])
def test_gate_enters_scores_arithmetically(method):
    # DP and DTW subtract the threshold from each cell, so runs need
    # strictly positive mass above it.
    params = AlignParams(method, sim_threshold=0.5, min_length=2)
    assert align(_mat(_diag_plant(8, 8, 1, 6, 1, value=0.51)), params)
    assert align(_mat(_diag_plant(8, 8, 1, 6, 1, value=0.4999)), params) == []


@pytest.mark.parametrize("method", METHODS)
def test_min_span_filter_applies_to_both_axes(method):
    values = _diag_plant(9, 9, 2, 4, 2)  # 2-frame match
    keep = align(_mat(values), AlignParams(method, sim_threshold=0.5, min_length=2))
    drop = align(_mat(values), AlignParams(method, sim_threshold=0.5, min_length=3))
    assert _tuples(keep) == [(2, 4, 2, 4)]
    assert drop == []


@pytest.mark.parametrize("method", METHODS)
def test_outputs_within_bounds_and_nonoverlapping(method):
    rng = np.random.default_rng(77)
    for trial in range(15):
        n, m = rng.integers(3, 26, size=2)
        values = rng.uniform(0, 1, size=(n, m))
        params = AlignParams(
            method,
            sim_threshold=float(rng.uniform(0.3, 0.8)),
            max_gap=int(rng.integers(1, 4)),
            min_length=int(rng.integers(1, 4)),
        )
        out = align(_mat(values), params)
        for k, scored in enumerate(out):
            seg = scored.segment
            assert 0 <= seg.query_start < seg.query_end <= m
            assert 0 <= seg.ref_start < seg.ref_end <= n
            assert seg.query_length >= params.min_length
            assert seg.ref_length >= params.min_length
            for other in out[k + 1 :]:
                assert not seg.overlaps(other.segment)
        assert align(_mat(values), params) == out  # deterministic


@pytest.mark.parametrize("method", METHODS)
def test_detection_cap(method):
    values = np.zeros((40, 40))
    for k in range(0, 40, 8):  # five well-separated diagonal matches
        for d in range(4):
            values[k + d, k + d] = 1.0
    params = AlignParams(method, sim_threshold=0.5, min_length=2, max_detections=2)
    assert len(align(_mat(values), params)) <= 2


# --------------------------------------------------------------------- HV


def test_hv_two_offsets_match_offset_scan_oracle():
    values = _diag_plant(30, 20, 0, 8, 5, noise=0.1, seed=5)
    for k in range(6):
        values[20 + k, 12 + k] = 0.9
    params = AlignParams("hv", sim_threshold=0.5, max_gap=2, min_length=2)
    got = {s.segment.as_tuple() for s in align(_mat(values), params)}
    expected = {
        seg[:4]
        for seg in oracle_hv_segments(values, 0.5, 2, 2)
    }
    assert got == expected == {(0, 8, 5, 13), (12, 18, 20, 26)}


def test_hv_gap_splitting():
    # votes at query frames {0,1,2,6,7,8}: the jump from 2 to 6 is a gap of
    # 4, bridgeable only when max_gap >= 4
    values = np.zeros((20, 20))
    for q in [0, 1, 2, 6, 7, 8]:
        values[q, q] = 1.0
    tight = align(_mat(values), AlignParams("hv", sim_threshold=0.5, max_gap=3, min_length=2))
    loose = align(_mat(values), AlignParams("hv", sim_threshold=0.5, max_gap=4, min_length=2))
    assert sorted(_tuples(tight)) == [(0, 3, 0, 3), (6, 9, 6, 9)]
    assert _tuples(loose) == [(0, 9, 0, 9)]


def test_hv_vote_floor_uses_min_length():
    values = _diag_plant(10, 10, 0, 3, 0)  # 3 votes on one offset
    assert align(_mat(values), AlignParams("hv", sim_threshold=0.5, min_length=3))
    assert not align(_mat(values), AlignParams("hv", sim_threshold=0.5, min_length=4))


def test_hv_bin_width_groups_nearby_offsets():
    # a diagonal that drifts by one offset halfway through
    values = np.zeros((16, 10))
    for q in range(5):
        values[q + 4, q] = 1.0  # offset 4
    for q in range(5, 10):
        values[q + 5, q] = 1.0  # offset 5
    narrow = align(_mat(values), AlignParams("hv", sim_threshold=0.5, offset_bin_width=1, min_length=4))
    wide = align(_mat(values), AlignParams("hv", sim_threshold=0.5, offset_bin_width=2, min_length=4))
    assert len(narrow) >= 1  # neighbor-bin collection may merge or split
    assert _tuples(wide) == [(0, 10, 4, 15)]


def test_hv_negative_offsets():
    # query ahead of reference: offset delta = ref - query = -3
    values = np.zeros((7, 10))
    for q in range(3, 10):
        values[q - 3, q] = 1.0
    out = align(_mat(values), AlignParams("hv", sim_threshold=0.5, min_length=2))
    assert _tuples(out) == [(3, 10, 0, 7)]


# --------------------------------------------------------------------- TN


def test_tn_bridges_gaps_up_to_max_gap():
    values = np.zeros((12, 12))
    for k in list(range(0, 5)) + list(range(7, 12)):  # hole at 5, 6
        values[k, k] = 1.0
    loose = align(_mat(values), AlignParams("tn", sim_threshold=0.5, max_gap=3, min_length=2))
    tight = align(_mat(values), AlignParams("tn", sim_threshold=0.5, max_gap=2, min_length=2))
    assert _tuples(loose) == [(0, 12, 0, 12)]
    assert sorted(_tuples(tight)) == [(0, 5, 0, 5), (7, 12, 7, 12)]


def test_tn_chain_weight_matches_path_oracle():
    rng = np.random.default_rng(8)
    values = rng.uniform(0, 1, size=(15, 15))
    params = AlignParams("tn", sim_threshold=0.6, max_gap=2, min_length=1)
    out = align(_mat(values), params)
    assert out
    best = max(s.score for s in out)
    assert abs(best - oracle_tn_best_weight(values, 0.6, 2)) < 1e-9


def test_tn_weight_floor_is_min_length():
    values = _diag_plant(10, 10, 0, 3, 0, value=0.9)  # chain weight 2.7
    assert align(_mat(values), AlignParams("tn", sim_threshold=0.5, min_length=2))
    assert not align(_mat(values), AlignParams("tn", sim_threshold=0.5, min_length=3))


def test_tn_skewed_chain_allowed():
    # TN tolerates non-unit slope: steps can move farther on one axis
    values = np.zeros((20, 10))
    for q in range(8):
        values[2 * q, q] = 1.0
    out = align(_mat(values), AlignParams("tn", sim_threshold=0.5, max_gap=2, min_length=2))
    assert _tuples(out) == [(0, 8, 0, 15)]


# --------------------------------------------------------------------- DP


def test_dp_perfect_run_score():
    values = _diag_plant(10, 10, 0, 10, 0)
    out = align(_mat(values), AlignParams("dp", sim_threshold=0.3, min_length=2))
    assert _tuples(out) == [(0, 10, 0, 10)]
    assert abs(out[0].score - 10 * (1.0 - 0.3)) < 1e-9


def test_dp_noisy_plant_endpoints_within_one():
    values = _diag_plant(14, 12, 2, 9, 4, value=0.9, noise=0.05, seed=21)
    params = AlignParams("dp", sim_threshold=0.5, diag_penalty=0.5, min_length=2)
    out = align(_mat(values), params)
    assert len(out) == 1
    qs, qe, rs, re = out[0].segment.as_tuple()
    assert abs(qs - 2) <= 1 and abs(qe - 9) <= 1
    assert abs(rs - 4) <= 1 and abs(re - 11) <= 1
    assert abs(out[0].score - oracle_sw_max(values, 0.5, 0.5)) < 1e-9


def test_dp_penalty_controls_offset_shifts():
    # the copy shifts down one reference frame halfway through; joining the
    # halves needs a vertical (penalized) step
    values = np.zeros((13, 12))
    for k in range(5):
        values[k, k] = 0.9
    for k in range(5, 12):
        values[k + 1, k] = 0.9
    cheap = align(_mat(values), AlignParams("dp", sim_threshold=0.4, diag_penalty=0.1, min_length=2))
    dear = align(_mat(values), AlignParams("dp", sim_threshold=0.4, diag_penalty=5.0, min_length=2))
    assert _tuples(cheap) == [(0, 12, 0, 13)]
    assert sorted(_tuples(dear)) == [(0, 5, 0, 5), (5, 12, 6, 13)]


def test_dp_max_score_matches_oracle_on_random():
    rng = np.random.default_rng(9)
    for _ in range(5):
        values = rng.uniform(0, 1, size=(12, 10))
        out = align(_mat(values), AlignParams("dp", sim_threshold=0.45, min_length=1))
        best = max((s.score for s in out), default=0.0)
        assert abs(best - oracle_sw_max(values, 0.45, 0.5)) < 1e-9


# -------------------------------------------------------------------- DTW


def test_dtw_identity_path():
    values = _diag_plant(10, 10, 0, 10, 0)
    out = align(_mat(values), AlignParams("dtw", sim_threshold=0.5, min_length=2))
    assert _tuples(out) == [(0, 10, 0, 10)]


def test_dtw_half_speed_reference():
    # reference plays the query at half speed: each query frame matches two
    # consecutive reference frames
    values = np.zeros((20, 10))
    for q in range(10):
        values[2 * q, q] = 1.0
        values[2 * q + 1, q] = 1.0
    out = align(_mat(values), AlignParams("dtw", sim_threshold=0.5, min_length=2))
    assert _tuples(out) == [(0, 10, 0, 20)]


def test_dtw_band_radius_restricts_warping():
    values = np.zeros((12, 12))
    for q in range(6):
        values[q, q] = 1.0
    for q in range(6, 12):
        values[q, q] = 0.2
        if q - 4 < 12:
            values[q - 4, q] = 0.0
    # with a huge detour the banded path stays near the diagonal
    out = align(_mat(values), AlignParams("dtw", sim_threshold=0.5, band_radius=1, min_length=2))
    for scored in out:
        seg = scored.segment
        assert abs(seg.ref_start - seg.query_start) <= 1 + abs(12 - 12)


def test_dtw_splits_when_dip_outweighs_flanks():
    # below-threshold stretch of 8 cells (mass -4.0) separates two runs of
    # mass +3.0 each; a maximal-sum sub-path cannot bridge it
    values = np.zeros((20, 20))
    for k in list(range(0, 6)) + list(range(14, 20)):
        values[k, k] = 1.0
    out = align(_mat(values), AlignParams("dtw", sim_threshold=0.5, min_length=2))
    assert sorted(_tuples(out)) == [(0, 6, 0, 6), (14, 20, 14, 20)]


def test_dtw_bridges_shallow_dip():
    # dip of 4 cells (mass -2.0) between runs of +4.0 merges into one
    # maximal sub-path
    values = np.zeros((20, 20))
    for k in list(range(0, 8)) + list(range(12, 20)):
        values[k, k] = 1.0
    out = align(_mat(values), AlignParams("dtw", sim_threshold=0.5, min_length=2))
    assert _tuples(out) == [(0, 20, 0, 20)]


def test_dtw_min_length_counts_path_cells():
    # a 3-cell vertical stretch spans 1 query frame but 3 path cells
    values = np.zeros((6, 4))
    values[1, 1] = values[2, 1] = values[3, 1] = 0.9
    out = align(
        _mat(values), AlignParams("dtw", sim_threshold=0.5, min_length=3)
    )
    # min-span filter then drops it (query span 1 < 3)
    assert out == []


# ------------------------------------------------------- maximal sub-runs


def test_maximal_positive_runs_cases():
    from shortvcd.align.dtw import maximal_positive_runs

    assert maximal_positive_runs(np.array([1.0, -0.5, 1.0])) == [(0, 3)]
    assert maximal_positive_runs(np.array([1.0, -2.0, 1.0])) == [(0, 1), (2, 3)]
    assert maximal_positive_runs(np.array([0.5, 0.5, -0.3, 0.2])) == [(0, 2), (3, 4)]
    assert maximal_positive_runs(np.array([-1.0, -2.0])) == []
    assert maximal_positive_runs(np.array([])) == []
    # total of each run is positive, and no run can absorb its neighbor
    rng = np.random.default_rng(4)
    for _ in range(50):
        x = rng.uniform(-1, 1, size=rng.integers(1, 30))
        runs = maximal_positive_runs(x)
        for s, e in runs:
            assert x[s:e].sum() > 0
            assert x[s] > 0 and x[e - 1] > 0
        for (s1, e1), (s2, e2) in zip(runs, runs[1:]):
            assert e1 <= s2
            # gap between maximal runs must cost more than the left run earns
            assert x[e1:s2].sum() <= 0
