import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from esg_trendlab.corpus import TopicCountMatrix
from esg_trendlab.errors import ConfigError, EmptyYear
from esg_trendlab.scoring import (
    TfidfConfig,
    compute_tfidf,
    quantile_transform,
    score_all_years,
    tfidf_reference,
)


def _matrix(counts, lengths, year=2020):
    counts = np.asarray(counts, dtype=np.int64)
    return TopicCountMatrix(
        row_ids=tuple(f"c{i}" for i in range(counts.shape[0])),
        topic_ids=tuple(f"t{j}" for j in range(counts.shape[1])),
        counts=counts,
        doc_token_counts=np.asarray(lengths, dtype=np.int64),
        year=year,
    )


def test_tfidf_hand_computed_default():
    # N=2; df(t0)=2 -> idf=ln(3/3)+1=1; df(t1)=1 -> idf=ln(3/2)+1
    m = _matrix([[2, 0], [1, 1]], [4, 2])
    s = compute_tfidf(m)
    idf1 = math.log(3 / 2) + 1
    expect = [[0.5 * 1.0, 0.0], [0.5 * 1.0, 0.5 * idf1]]
    assert np.allclose(s.weights, expect, rtol=0, atol=1e-15)
    assert s.year == 2020
    assert s.row_ids == ("c0", "c1")


def test_tfidf_two_doc_corpus_hand_value():
    # d1 = [carbon, carbon, emissions], d2 = [diversity]; topic "carbon":
    # tf = 2/3, df = 1, N = 2, smooth idf = ln(3/2)+1 -> 0.936977
    m = _matrix([[2, 0], [0, 1]], [3, 1])
    s = compute_tfidf(m)
    assert s.weights[0, 0] == pytest.approx(0.936977, abs=1e-6)


def test_tfidf_raw_and_log_tf():
    m = _matrix([[3], [0]], [10, 10])
    raw = compute_tfidf(m, TfidfConfig(tf_mode="raw"))
    log = compute_tfidf(m, TfidfConfig(tf_mode="log"))
    idf = math.log(3 / 2) + 1
    assert raw.weights[0, 0] == pytest.approx(3 * idf, abs=1e-15)
    assert log.weights[0, 0] == pytest.approx((1 + math.log(3)) * idf, abs=1e-15)
    assert raw.weights[1, 0] == 0.0 and log.weights[1, 0] == 0.0


def test_tfidf_plain_idf():
    m = _matrix([[1, 1], [0, 1]], [2, 2])
    s = compute_tfidf(m, TfidfConfig(idf_mode="plain"))
    # df(t1)=N=2 -> ln(1)=0, so the ubiquitous topic vanishes
    assert s.weights[:, 1].tolist() == [0.0, 0.0]
    assert s.weights[0, 0] == pytest.approx(0.5 * math.log(2), abs=1e-15)


def test_tfidf_unseen_topic_is_zero_both_modes():
    m = _matrix([[0, 2], [0, 1]], [5, 5])
    for idf_mode in ("smooth", "plain"):
        s = compute_tfidf(m, TfidfConfig(idf_mode=idf_mode))
        assert s.weights[:, 0].tolist() == [0.0, 0.0]
        assert np.isfinite(s.weights).all()


def test_tfidf_empty_document_row():
    m = _matrix([[0, 0], [1, 1]], [0, 4])
    s = compute_tfidf(m)
    assert s.weights[0].tolist() == [0.0, 0.0]


def test_tfidf_l2_normalization():
    m = _matrix([[2, 1], [0, 0]], [4, 4])
    s = compute_tfidf(m, TfidfConfig(l2_normalize_docs=True))
    assert np.linalg.norm(s.weights[0]) == pytest.approx(1.0, abs=1e-12)
    assert s.weights[1].tolist() == [0.0, 0.0]  # zero rows stay zero


def test_tfidf_empty_year():
    m = _matrix(np.zeros((0, 3), dtype=np.int64), [])
    with pytest.raises(EmptyYear):
        compute_tfidf(m)


def test_tfidf_bad_config():
    with pytest.raises(ConfigError):
        TfidfConfig(tf_mode="binary")
    with pytest.raises(ConfigError):
        TfidfConfig(idf_mode="probabilistic")


@given(
    st.lists(
        st.lists(st.integers(min_value=0, max_value=9), min_size=3, max_size=3),
        min_size=2,
        max_size=6,
    ),
    st.integers(min_value=2, max_value=8),
)
def test_relative_tf_scale_invariant(counts, k):
    # Repeating a document k times over scales counts and length together;
    # relative tf must be bit-identical because the exact ratios are equal.
    counts = np.asarray(counts, dtype=np.int64)
    lengths = counts.sum(axis=1) + 1
    a = compute_tfidf(_matrix(counts, lengths))
    b = compute_tfidf(_matrix(counts * k, lengths * k))
    assert (a.weights == b.weights).all()


def test_reference_route_matches_numpy_route():
    rng = np.random.default_rng(42)
    for _ in range(20):
        n, t = rng.integers(2, 9), rng.integers(1, 6)
        counts = rng.integers(0, 8, size=(n, t))
        lengths = counts.sum(axis=1) + rng.integers(0, 5, size=n)
        for tf_mode in ("relative", "raw", "log"):
            for idf_mode in ("smooth", "plain"):
                for l2 in (False, True):
                    got = compute_tfidf(
                        _matrix(counts, lengths),
                        TfidfConfig(tf_mode=tf_mode, idf_mode=idf_mode, l2_normalize_docs=l2),
                    ).weights
                    want = tfidf_reference(
                        counts.tolist(), lengths.tolist(), tf_mode, idf_mode, l2
                    )
                    assert np.allclose(got, np.asarray(want), rtol=0, atol=1e-12)


def test_score_all_years_keys_sorted():
    ms = {
        2021: _matrix([[1]], [2], year=2021),
        2019: _matrix([[2]], [3], year=2019),
    }
    out = score_all_years(ms)
    assert list(out.keys()) == [2019, 2021]
    assert out[2019].year == 2019


def test_quantile_transform_basic():
    m = _matrix([[4, 1], [2, 1], [1, 1], [3, 1]], [10, 10, 10, 10])
    q = quantile_transform(compute_tfidf(m, TfidfConfig(tf_mode="raw")))
    # column 0 values 4,2,1,3 -> ranks 4,2,1,3 out of 4
    assert q.weights[:, 0].tolist() == [1.0, 0.5, 0.25, 0.75]
    # constant column: every value is <= itself and everything else
    assert q.weights[:, 1].tolist() == [1.0, 1.0, 1.0, 1.0]
    assert ((q.weights > 0) & (q.weights <= 1)).all()


@given(
    st.lists(
        st.lists(st.integers(min_value=0, max_value=5), min_size=2, max_size=2),
        min_size=2,
        max_size=8,
    )
)
def test_quantile_monotone_and_bounded(counts):
    counts = np.asarray(counts, dtype=np.int64)
    s = compute_tfidf(_matrix(counts, counts.sum(axis=1) + 1))
    q = quantile_transform(s)
    assert ((q.weights > 0) & (q.weights <= 1)).all()
    for j in range(s.weights.shape[1]):
        order = np.argsort(s.weights[:, j], kind="stable")
        qs = q.weights[order, j]
        assert (np.diff(qs) >= 0).all()
        # ties map to the same quantile
        vals = s.weights[order, j]
        for a in range(len(vals) - 1):
            if vals[a] == vals[a + 1]:
                assert qs[a] == qs[a + 1]
