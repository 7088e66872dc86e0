"""Similarity matrix computation and ground-truth modification."""

import numpy as np
import pytest

from shortvcd.core import CopySegmentPair, FrameFeatureSequence, ValidationError
from shortvcd.simmatrix import (
    SimilarityMatrix,
    compute_similarity_matrix,
    dump_matrix_csv,
    modify_with_ground_truth,
)

from oracles import oracle_cosine


def _seq(video_id, n, dim=8, seed=0):
    rng = np.random.default_rng(seed)
    return FrameFeatureSequence(video_id, rng.normal(size=(n, dim)).astype(np.float32))


def test_identical_frames_score_one():
    seq = _seq("a", 1, dim=16)
    m = compute_similarity_matrix(seq, FrameFeatureSequence("b", np.array(seq.frames)))
    assert abs(m.values[0, 0] - 1.0) <= 1e-6


def test_orthogonal_frames_score_zero():
    e0 = np.eye(4, dtype=np.float32)[:1]
    e1 = np.eye(4, dtype=np.float32)[1:2]
    m = compute_similarity_matrix(
        FrameFeatureSequence("a", e0), FrameFeatureSequence("b", e1)
    )
    assert m.values[0, 0] == 0.0


def test_matrix_orientation_rows_are_reference():
    ref = _seq("r", 5, seed=1)
    query = _seq("q", 3, seed=2)
    m = compute_similarity_matrix(ref, query)
    assert m.values.shape == (5, 3)
    assert m.n_ref == 5 and m.n_query == 3


def test_matrix_matches_fsum_cosine_oracle():
    import math

    ref = _seq("r", 5, dim=12, seed=7)
    query = _seq("q", 3, dim=12, seed=8)
    m = compute_similarity_matrix(ref, query)
    for i in range(5):
        for j in range(3):
            # true cosine of the stored rows (the rows are unit only up to
            # float32 rounding, so renormalizing shifts ~1e-7)
            assert abs(m.values[i, j] - oracle_cosine(ref.frames[i], query.frames[j])) <= 1e-6
            dot = math.fsum(
                float(a) * float(b) for a, b in zip(ref.frames[i], query.frames[j])
            )
            assert abs(m.values[i, j] - dot) <= 1e-12


def test_self_similarity_diagonal_is_one():
    seq = _seq("a", 20, dim=32, seed=3)
    m = compute_similarity_matrix(seq, seq)
    np.testing.assert_allclose(np.diag(m.values), 1.0, atol=1e-6)
    assert np.all(m.values <= 1.0) and np.all(m.values >= -1.0)


def test_dim_mismatch_rejected():
    with pytest.raises(ValidationError):
        compute_similarity_matrix(_seq("a", 2, dim=4), _seq("b", 2, dim=8))


def test_matrix_values_read_only_and_range_checked():
    m = SimilarityMatrix(np.zeros((2, 2)))
    with pytest.raises(ValueError):
        m.values[0, 0] = 2.0
    with pytest.raises(ValidationError):
        SimilarityMatrix(np.full((1, 1), 1.5))
    with pytest.raises(ValidationError):
        SimilarityMatrix(np.zeros((2,)))


# ----------------------------------------------------------- modification


def _cell_oracle(values, segments, mode):
    """Per-cell reimplementation of the modification semantics."""
    n, m = values.shape
    out = np.empty_like(values)
    for i in range(n):
        for j in range(m):
            inside = any(
                s.ref_start <= i < s.ref_end and s.query_start <= j < s.query_end
                for s in segments
            )
            on_diag = any(
                s.ref_start <= i < s.ref_end
                and s.query_start <= j < s.query_end
                and i - s.ref_start == j - s.query_start
                for s in segments
            )
            if on_diag:
                out[i, j] = 1.0
            elif mode == "zero-outside" and not inside:
                out[i, j] = 0.0
            else:
                out[i, j] = values[i, j]
    return out


def test_modify_diagonal_only_example():
    # 4x4 zeros; gt query [0,2) -> ref [1,3) lights exactly (ref 1, query 0)
    # and (ref 2, query 1).
    m = SimilarityMatrix(np.zeros((4, 4)))
    out = modify_with_ground_truth(m, CopySegmentPair(0, 2, 1, 3), "diagonal-only")
    expected = np.zeros((4, 4))
    expected[1, 0] = 1.0
    expected[2, 1] = 1.0
    np.testing.assert_array_equal(out.values, expected)
    # input untouched
    np.testing.assert_array_equal(m.values, np.zeros((4, 4)))


def test_modify_zero_outside_keeps_block():
    values = np.full((5, 5), 0.5)
    seg = CopySegmentPair(1, 4, 0, 3)
    out = modify_with_ground_truth(SimilarityMatrix(values), seg, "zero-outside")
    block = out.values[0:3, 1:4]
    assert np.all(out.values[3:, :] == 0.0) and np.all(out.values[:, 4:] == 0.0)
    np.testing.assert_array_equal(np.diag(block), 1.0)
    assert block[0, 1] == 0.5  # off-diagonal inside the block untouched


@pytest.mark.parametrize("mode", ["diagonal-only", "zero-outside"])
def test_modify_matches_cell_oracle(mode):
    rng = np.random.default_rng(11)
    values = rng.uniform(-1, 1, size=(9, 7))
    segments = [CopySegmentPair(0, 4, 2, 5), CopySegmentPair(3, 7, 5, 9)]
    out = modify_with_ground_truth(SimilarityMatrix(values), segments, mode)
    np.testing.assert_array_equal(out.values, _cell_oracle(values, segments, mode))


@pytest.mark.parametrize("mode", ["diagonal-only", "zero-outside"])
def test_modify_idempotent(mode):
    rng = np.random.default_rng(12)
    values = rng.uniform(-1, 1, size=(8, 8))
    segments = [CopySegmentPair(1, 5, 2, 6)]
    once = modify_with_ground_truth(SimilarityMatrix(values), segments, mode)
    twice = modify_with_ground_truth(once, segments, mode)
    np.testing.assert_array_equal(once.values, twice.values)


def test_modify_diagonal_changes_at_most_min_span_cells():
    rng = np.random.default_rng(13)
    values = rng.uniform(-0.9, 0.9, size=(10, 10))
    seg = CopySegmentPair(2, 9, 0, 4)  # query span 7, ref span 4
    out = modify_with_ground_truth(SimilarityMatrix(values), seg, "diagonal-only")
    assert int(np.sum(out.values != values)) <= min(seg.query_length, seg.ref_length)


def test_modify_validation():
    m = SimilarityMatrix(np.zeros((4, 4)))
    with pytest.raises(ValidationError):
        modify_with_ground_truth(m, CopySegmentPair(0, 5, 0, 2))  # query out of range
    with pytest.raises(ValidationError):
        modify_with_ground_truth(m, CopySegmentPair(0, 2, 0, 2), "invert")
    with pytest.raises(ValidationError):
        modify_with_ground_truth(m, [])


def test_dump_matrix_csv(tmp_path):
    m = SimilarityMatrix(np.array([[0.1234567, -1.0], [0.0, 1.0]]))
    path = tmp_path / "m.csv"
    dump_matrix_csv(m, path)
    assert path.read_text().splitlines() == ["0.123457,-1.000000", "0.000000,1.000000"]
