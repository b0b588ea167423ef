"""Topic weighting: TF-IDF over per-year topic count matrices.

Weights are always computed within a single reporting year; document
frequency never pools across years. Three term-frequency modes and two
inverse-document-frequency modes are supported, plus optional L2 row
normalization and a rank-based quantile transform for display scaling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .corpus import TopicCountMatrix
from .errors import ConfigError, EmptyYear

TF_MODES = ("relative", "raw", "log")
IDF_MODES = ("smooth", "plain")


@dataclass(frozen=True)
class TfidfConfig:
    tf_mode: str = "relative"
    idf_mode: str = "smooth"
    l2_normalize_docs: bool = False

    def __post_init__(self):
        if self.tf_mode not in TF_MODES:
            raise ConfigError(f"tf_mode must be one of {TF_MODES}, got {self.tf_mode!r}")
        if self.idf_mode not in IDF_MODES:
            raise ConfigError(f"idf_mode must be one of {IDF_MODES}, got {self.idf_mode!r}")


@dataclass
class TopicScoreMatrix:
    row_ids: tuple[str, ...]
    topic_ids: tuple[str, ...]
    weights: np.ndarray  # shape (n_rows, n_topics), dtype float64
    year: int | None = field(default=None)


def _tf(counts: np.ndarray, lengths: np.ndarray, mode: str) -> np.ndarray:
    counts = counts.astype(np.float64)
    if mode == "raw":
        return counts
    if mode == "relative":
        out = np.zeros_like(counts)
        nz = lengths > 0
        out[nz] = counts[nz] / lengths[nz, None].astype(np.float64)
        return out
    # log mode: dampened frequency, zero stays zero
    out = np.zeros_like(counts)
    pos = counts > 0
    out[pos] = 1.0 + np.log(counts[pos])
    return out


def _idf(counts: np.ndarray, mode: str) -> np.ndarray:
    n_docs = counts.shape[0]
    df = (counts > 0).sum(axis=0).astype(np.float64)
    idf = np.zeros(counts.shape[1], dtype=np.float64)
    seen = df > 0
    if mode == "smooth":
        idf[seen] = np.log((1.0 + n_docs) / (1.0 + df[seen])) + 1.0
    else:
        idf[seen] = np.log(n_docs / df[seen])
    # topics absent from the whole year keep idf 0 so their weights are 0
    return idf


def compute_tfidf(matrix: TopicCountMatrix, config: TfidfConfig = TfidfConfig()) -> TopicScoreMatrix:
    """Weight one year's counts: tf(doc, topic) * idf(topic), optional L2.

    A topic with zero document frequency in the year gets weight 0 for every
    document. With ``l2_normalize_docs`` each document row is scaled to unit
    Euclidean norm; all-zero rows are left untouched.

    Raises EmptyYear when the matrix has no rows.
    """
    if len(matrix.row_ids) == 0:
        raise EmptyYear(matrix.year if matrix.year is not None else -1)
    tf = _tf(matrix.counts, matrix.doc_token_counts, config.tf_mode)
    idf = _idf(matrix.counts, config.idf_mode)
    weights = tf * idf[None, :]
    if config.l2_normalize_docs:
        norms = np.sqrt((weights * weights).sum(axis=1))
        nz = norms > 0
        weights[nz] = weights[nz] / norms[nz, None]
    return TopicScoreMatrix(
        row_ids=matrix.row_ids,
        topic_ids=matrix.topic_ids,
        weights=weights,
        year=matrix.year,
    )


def score_all_years(
    matrices: dict[int, TopicCountMatrix], config: TfidfConfig = TfidfConfig()
) -> dict[int, TopicScoreMatrix]:
    """Apply compute_tfidf to each year's matrix; keys stay the years."""
    return {year: compute_tfidf(m, config) for year, m in sorted(matrices.items())}


def quantile_transform(scores: TopicScoreMatrix) -> TopicScoreMatrix:
    """Map each topic column to its empirical CDF value, rank / n in (0, 1].

    Ties share the maximal rank (the ECDF evaluated at the value), so a
    constant column maps to all ones. Intended for display scaling of
    heatmaps, not for the analysis path.
    """
    w = scores.weights
    n = w.shape[0]
    out = np.empty_like(w, dtype=np.float64)
    for j in range(w.shape[1]):
        col = w[:, j]
        # ECDF: fraction of values <= x, computed by searching the sorted column
        sorted_col = np.sort(col)
        out[:, j] = np.searchsorted(sorted_col, col, side="right") / n
    return TopicScoreMatrix(
        row_ids=scores.row_ids,
        topic_ids=scores.topic_ids,
        weights=out,
        year=scores.year,
    )


def tfidf_reference(
    counts: list[list[int]],
    lengths: list[int],
    tf_mode: str = "relative",
    idf_mode: str = "smooth",
    l2_normalize_docs: bool = False,
) -> list[list[float]]:
    """Plain-Python mirror of compute_tfidf used as a cross-check oracle.

    Scalar math only (math.log, explicit loops); no numpy. Kept in the
    package so acceptance checks can diff the two routes.
    """
    n_docs = len(counts)
    n_topics = len(counts[0]) if counts else 0
    df = [sum(1 for i in range(n_docs) if counts[i][j] > 0) for j in range(n_topics)]
    idf = []
    for j in range(n_topics):
        if df[j] == 0:
            idf.append(0.0)
        elif idf_mode == "smooth":
            idf.append(math.log((1.0 + n_docs) / (1.0 + df[j])) + 1.0)
        else:
            idf.append(math.log(n_docs / df[j]))
    out = []
    for i in range(n_docs):
        row = []
        for j in range(n_topics):
            c = counts[i][j]
            if tf_mode == "raw":
                tf = float(c)
            elif tf_mode == "relative":
                tf = (c / lengths[i]) if lengths[i] > 0 else 0.0
            else:
                tf = (1.0 + math.log(c)) if c > 0 else 0.0
            row.append(tf * idf[j])
        out.append(row)
    if l2_normalize_docs:
        for i in range(n_docs):
            norm = math.sqrt(sum(v * v for v in out[i]))
            if norm > 0:
                out[i] = [v / norm for v in out[i]]
    return out
