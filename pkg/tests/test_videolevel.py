"""Video-level pair scoring."""

import math

import numpy as np
import pytest

from shortvcd.core import FrameFeatureSequence, ValidationError
from shortvcd.videolevel import (
    enumerate_pairs,
    f2f_score,
    g2g_score,
    score_pair,
    sm2g_score,
)

from oracles import oracle_cosine


def _seq(video_id, n, dim=16, seed=0):
    rng = np.random.default_rng(seed)
    return FrameFeatureSequence(video_id, rng.normal(size=(n, dim)).astype(np.float32))


def test_enumerate_pairs_counts():
    assert enumerate_pairs(["b", "a"]) == [("a", "b")]
    ids = [f"v{i:02d}" for i in range(10)]
    pairs = enumerate_pairs(ids)
    assert len(pairs) == 45
    assert len(set(pairs)) == 45
    assert all(a < b for a, b in pairs)
    with pytest.raises(ValidationError):
        enumerate_pairs(["a", "a", "b"])


def test_f2f_matches_brute_force_max():
    a, b = _seq("a", 12, seed=1), _seq("b", 9, seed=2)
    best = max(
        oracle_cosine(a.frames[i], b.frames[j])
        for i in range(12)
        for j in range(9)
    )
    assert abs(f2f_score(a, b) - best) < 1e-6
    assert f2f_score(a, b) == f2f_score(b, a)


def test_f2f_shared_frame_scores_one():
    a = _seq("a", 5, seed=3)
    frames = np.vstack([_seq("x", 4, seed=4).frames, a.frames[2:3]])
    b = FrameFeatureSequence("b", frames)
    assert f2f_score(a, b) >= 1.0 - 1e-6


def test_g2g_matches_mean_cosine():
    a, b = _seq("a", 7, seed=5), _seq("b", 11, seed=6)
    ma = a.frames.astype(np.float64).mean(axis=0)
    mb = b.frames.astype(np.float64).mean(axis=0)
    expected = oracle_cosine(ma, mb)
    assert abs(g2g_score(a, b) - expected) < 1e-9
    assert g2g_score(a, b) == g2g_score(b, a)
    assert g2g_score(a, a) == pytest.approx(1.0, abs=1e-9)


def test_g2g_zero_mean_rejected():
    frames = np.array([[1.0, 0.0], [-1.0, 0.0]], dtype=np.float32)
    with pytest.raises(ValidationError):
        g2g_score(FrameFeatureSequence("a", frames), _seq("b", 3, dim=2))


def test_sm2g_matches_window_oracle():
    ref, query = _seq("r", 35, seed=7), _seq("q", 10, seed=8)
    qmean = query.frames.astype(np.float64).mean(axis=0)
    best = -1.0
    for start in range(0, 35, 10):  # windows of 10, last one partial (5)
        wmean = ref.frames[start : start + 10].astype(np.float64).mean(axis=0)
        best = max(best, oracle_cosine(wmean, qmean))
    assert abs(sm2g_score(ref, query, window=10) - best) < 1e-9


def test_sm2g_with_huge_window_equals_g2g():
    ref, query = _seq("r", 23, seed=9), _seq("q", 8, seed=10)
    assert sm2g_score(ref, query, window=23) == pytest.approx(
        g2g_score(ref, query), abs=1e-12
    )
    assert sm2g_score(ref, query, window=1000) == pytest.approx(
        g2g_score(ref, query), abs=1e-12
    )


def test_sm2g_is_directional():
    ref, query = _seq("r", 40, seed=11), _seq("q", 12, seed=12)
    assert sm2g_score(ref, query, window=10) != pytest.approx(
        sm2g_score(query, ref, window=10), abs=1e-12
    )


def test_sm2g_finds_buried_copy():
    # a long reference hides a noisy copy of the query in one window; the
    # windowed mean comparison scores it higher than the global mean does
    rng = np.random.default_rng(13)
    query = _seq("q", 10, dim=32, seed=14)
    noise = rng.normal(size=(80, 32)).astype(np.float32)
    noise[40:50] = query.frames + 0.1 * rng.normal(size=(10, 32)).astype(np.float32)
    ref = FrameFeatureSequence("r", noise)
    assert sm2g_score(ref, query, window=10) > g2g_score(ref, query) + 0.2


def test_scores_bounded():
    for seed in range(5):
        a, b = _seq("a", 9, seed=seed), _seq("b", 14, seed=seed + 50)
        for method in ("f2f", "g2g", "sm2g"):
            s = score_pair(method, a, b)
            assert -1.0 <= s <= 1.0 and math.isfinite(s)


def test_score_pair_dispatch():
    a, b = _seq("a", 5, seed=1), _seq("b", 5, seed=2)
    assert score_pair("f2f", a, b) == f2f_score(a, b)
    assert score_pair("g2g", a, b) == g2g_score(a, b)
    assert score_pair("sm2g", a, b, window=3) == sm2g_score(a, b, window=3)
    with pytest.raises(ValidationError):
        score_pair("v2v", a, b)
    with pytest.raises(ValidationError):
        sm2g_score(a, b, window=0)
    with pytest.raises(ValidationError):
        f2f_score(a, _seq("c", 4, dim=8))
