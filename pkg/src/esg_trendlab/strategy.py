"""Strategic positioning: fuse the two axes into company coordinates.

x is a company's weighted within-industry representativeness, y its weighted
cross-sector distinctiveness; both are L1-weighted dot products of the
company's topic mix with the per-topic axis vectors, then z-scored per year.
Zones cut the plane 2x2 at per-year medians (or at zero). The module also
produces the ranking tables, topic trend series and E/S/G triples.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Mapping, Sequence

import numpy as np

from .corpus import TopicLexicon
from .distinctiveness import ImportanceVector
from .errors import LabelMismatch, TooFewObservations, TopicSetMismatch
from .scoring import TopicScoreMatrix

ZONES = ("I_pioneering", "II_niche", "III_shadow", "IV_follower")
THRESHOLD_MODES = ("median", "zero")


@dataclass(frozen=True)
class StrategicPoint:
    company_id: str
    year: int
    x_raw: float
    y_raw: float
    x: float
    y: float
    zone: str | None = None


@dataclass(frozen=True)
class TrendPoint:
    year: int
    mean_weight: float
    change_rate: float | None  # None = undefined (first year or zero prior)


@dataclass(frozen=True)
class TrendSeries:
    topic_id: str
    points: tuple[TrendPoint, ...]


@dataclass(frozen=True)
class EsgTriple:
    company_id: str
    year: int
    e: float
    s: float
    g: float


def _zscore(values: np.ndarray) -> np.ndarray:
    std = float(values.std())  # population std
    if std == 0.0:
        return np.zeros_like(values)
    return (values - values.mean()) / std


def company_coordinates(
    matrix: TopicScoreMatrix,
    rep: Mapping[str, float],
    imp: ImportanceVector | Mapping[str, float],
) -> list[StrategicPoint]:
    """Company (x_raw, y_raw) as L1-weighted sums, plus per-year z-scores.

    w~(c, t) is company c's weight vector scaled to sum 1 (all-zero rows
    stay zero, landing the company at the raw origin). Standardization uses
    the population standard deviation; a zero spread maps everyone to 0.

    Raises TopicSetMismatch when the axis vectors don't cover the matrix
    topics exactly.
    """
    imp_map = imp.importances if isinstance(imp, ImportanceVector) else imp
    topics = set(matrix.topic_ids)
    if set(rep) != topics:
        raise TopicSetMismatch("representativeness vector vs matrix topics")
    if set(imp_map) != topics:
        raise TopicSetMismatch("importance vector vs matrix topics")
    if isinstance(imp, ImportanceVector) and imp.year is not None and matrix.year is not None:
        if imp.year != matrix.year:
            raise ValueError(f"importance year {imp.year} != matrix year {matrix.year}")
    rep_vec = np.array([rep[t] for t in matrix.topic_ids])
    imp_vec = np.array([imp_map[t] for t in matrix.topic_ids])

    w = np.asarray(matrix.weights, dtype=np.float64)
    row_sums = w.sum(axis=1)
    w_tilde = np.zeros_like(w)
    nz = row_sums != 0
    w_tilde[nz] = w[nz] / row_sums[nz, None]

    x_raw = w_tilde @ rep_vec
    y_raw = w_tilde @ imp_vec
    x = _zscore(x_raw)
    y = _zscore(y_raw)
    year = matrix.year if matrix.year is not None else 0
    return [
        StrategicPoint(
            company_id=cid,
            year=year,
            x_raw=float(x_raw[i]),
            y_raw=float(y_raw[i]),
            x=float(x[i]),
            y=float(y[i]),
        )
        for i, cid in enumerate(matrix.row_ids)
    ]


def zone_thresholds(
    points: Sequence[StrategicPoint], threshold_mode: str = "median"
) -> tuple[float, float]:
    if threshold_mode not in THRESHOLD_MODES:
        raise ValueError(f"threshold_mode must be one of {THRESHOLD_MODES}")
    if threshold_mode == "zero":
        return 0.0, 0.0
    xs = np.array([p.x for p in points])
    ys = np.array([p.y for p in points])
    return float(np.median(xs)), float(np.median(ys))


def assign_zones(
    points: Sequence[StrategicPoint], threshold_mode: str = "median"
) -> list[StrategicPoint]:
    """Label each point with its 2x2 zone for one year.

    Strict inequality decides the high side, so points exactly on a
    threshold fall low: I(x>mx, y>my), II(x<=mx, y>my), III(x<=mx, y<=my),
    IV(x>mx, y<=my).
    """
    if not points:
        raise ValueError("need at least one point")
    mx, my = zone_thresholds(points, threshold_mode)
    out = []
    for p in points:
        high_x = p.x > mx
        high_y = p.y > my
        if high_x and high_y:
            zone = "I_pioneering"
        elif high_y:
            zone = "II_niche"
        elif high_x:
            zone = "IV_follower"
        else:
            zone = "III_shadow"
        out.append(replace(p, zone=zone))
    return out


def rank_within_class(points: Sequence[StrategicPoint], top_n: int) -> list[StrategicPoint]:
    """Top companies by x, descending; ties by company_id ascending."""
    if top_n < 1:
        raise ValueError("top_n must be >= 1")
    return sorted(points, key=lambda p: (-p.x, p.company_id))[:top_n]


def rank_across_classes(
    points: Sequence[StrategicPoint], labels: Mapping[str, str]
) -> dict[str, StrategicPoint]:
    """Per class, the company with the highest y (ties by company_id).

    Classes with no companies simply don't appear.
    """
    for p in points:
        if p.company_id not in labels:
            raise LabelMismatch(p.company_id)
    winners: dict[str, StrategicPoint] = {}
    for p in sorted(points, key=lambda p: (-p.y, p.company_id)):
        winners.setdefault(labels[p.company_id], p)
    return dict(sorted(winners.items()))


def topic_trends(scores_by_year: Mapping[int, TopicScoreMatrix]) -> list[TrendSeries]:
    """Per-topic mean weight by year with year-over-year relative change.

    change_rate(y) = (m(y) - m(y-1)) / m(y-1) against the previous year in
    the series; undefined (None) for the first year and whenever the prior
    mean is not positive.
    """
    years = sorted(scores_by_year)
    if len(years) < 2:
        raise TooFewObservations(len(years), 2)
    topic_ids = scores_by_year[years[0]].topic_ids
    for y in years:
        if scores_by_year[y].topic_ids != topic_ids:
            raise TopicSetMismatch(f"year {y} topics differ from year {years[0]}")
    series = []
    for j, topic_id in enumerate(sorted(topic_ids)):
        col = topic_ids.index(topic_id)
        points = []
        prev: float | None = None
        for y in years:
            mean = float(scores_by_year[y].weights[:, col].mean())
            if prev is None or prev <= 0.0:
                rate = None
            else:
                rate = (mean - prev) / prev
            points.append(TrendPoint(year=y, mean_weight=mean, change_rate=rate))
            prev = mean
        series.append(TrendSeries(topic_id=topic_id, points=tuple(points)))
    return series


def esg_triples(matrix: TopicScoreMatrix, lexicon: TopicLexicon) -> list[EsgTriple]:
    """Per-company E/S/G sums, min-max normalized to [0,1] within the year.

    A dimension with no spread across companies (including one with no
    topics at all) maps to 0 for everyone.
    """
    if set(matrix.topic_ids) != set(lexicon.topic_ids):
        raise TopicSetMismatch("lexicon topics vs matrix topics")
    dim_of = {t.topic_id: t.dimension for t in lexicon.topics}
    w = np.asarray(matrix.weights, dtype=np.float64)
    raw = {}
    for dim in ("E", "S", "G"):
        cols = [j for j, t in enumerate(matrix.topic_ids) if dim_of[t] == dim]
        raw[dim] = w[:, cols].sum(axis=1) if cols else np.zeros(w.shape[0])
    norm = {}
    for dim, values in raw.items():
        lo, hi = float(values.min()), float(values.max())
        if hi == lo:
            norm[dim] = np.zeros_like(values)
        else:
            norm[dim] = (values - lo) / (hi - lo)
    year = matrix.year if matrix.year is not None else 0
    return [
        EsgTriple(
            company_id=cid,
            year=year,
            e=float(norm["E"][i]),
            s=float(norm["S"][i]),
            g=float(norm["G"][i]),
        )
        for i, cid in enumerate(matrix.row_ids)
    ]


def zone_counts(points: Sequence[StrategicPoint]) -> dict[str, int]:
    """Occupancy of each zone (all four listed, empty zones as 0)."""
    counts = {z: 0 for z in ZONES}
    for p in points:
        if p.zone is None:
            raise ValueError(f"point {p.company_id} has no zone; run assign_zones first")
        counts[p.zone] += 1
    return counts
