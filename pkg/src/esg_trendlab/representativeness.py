"""Within-industry representativeness: k-means silhouettes per topic column.

Each topic's column of company weights is clustered on its own (1-D), for
every feasible K in a preset list; the mean silhouette over those Ks is the
topic's representativeness for the year. An escape hatch clusters the full
weight matrix instead and reports one silhouette per K.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, DegenerateClustering, TooFewCompanies, TooFewSamples
from .scoring import TopicScoreMatrix


@dataclass(frozen=True)
class ClusterConfig:
    k_list: tuple[int, ...] = (2, 3, 4, 5, 6)
    max_iters: int = 100
    tol: float = 1e-6  # relative inertia improvement per Lloyd iteration
    n_init: int = 10
    seed: int = 0

    def __post_init__(self):
        if not self.k_list or any(k < 2 for k in self.k_list):
            raise ConfigError("k_list entries must all be >= 2")
        if self.max_iters < 1:
            raise ConfigError("max_iters must be >= 1")
        if self.n_init < 1:
            raise ConfigError("n_init must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must fit in 64 bits")


@dataclass
class KMeansResult:
    labels: np.ndarray  # shape (n,), dtype int64
    centroids: np.ndarray  # shape (k, d)
    inertia: float


def _kmeanspp_init(points: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = points.shape[0]
    centroids = np.empty((k, points.shape[1]), dtype=np.float64)
    centroids[0] = points[rng.integers(n)]
    d2 = ((points - centroids[0]) ** 2).sum(axis=1)
    for j in range(1, k):
        total = d2.sum()
        if total > 0:
            idx = rng.choice(n, p=d2 / total)
        else:
            idx = rng.integers(n)  # all remaining mass zero: duplicate points
        centroids[j] = points[idx]
        d2 = np.minimum(d2, ((points - centroids[j]) ** 2).sum(axis=1))
    return centroids


def _assign(points: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    # argmin breaks distance ties toward the lowest cluster index
    d2 = ((points[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
    return d2.argmin(axis=1)


def _repair_empty(points: np.ndarray, labels: np.ndarray, centroids: np.ndarray, k: int) -> np.ndarray:
    """Give each empty cluster the point currently farthest from its centroid.

    Only points whose cluster holds more than one member may move, so a
    repair never empties another cluster; with k <= n a donor always exists.
    Distance ties resolve to the lowest point index.
    """
    labels = labels.copy()
    while True:
        counts = np.bincount(labels, minlength=k)
        empties = np.flatnonzero(counts == 0)
        if len(empties) == 0:
            return labels
        dist = ((points - centroids[labels]) ** 2).sum(axis=1)
        dist = np.where(counts[labels] > 1, dist, -1.0)
        labels[int(dist.argmax())] = int(empties[0])


def _lloyd_single(
    points: np.ndarray, k: int, rng: np.random.Generator, max_iters: int, tol: float
) -> KMeansResult:
    centroids = _kmeanspp_init(points, k, rng)
    prev_inertia: float | None = None
    labels = np.zeros(len(points), dtype=np.int64)
    for _ in range(max_iters):
        labels = _assign(points, centroids)
        labels = _repair_empty(points, labels, centroids, k)
        for cluster in range(k):
            centroids[cluster] = points[labels == cluster].mean(axis=0)
        inertia = float(((points - centroids[labels]) ** 2).sum())
        if prev_inertia is not None:
            # Lloyd's objective never increases; allow last-ulp noise only.
            assert inertia <= prev_inertia * (1 + 1e-12) + 1e-12
            if prev_inertia - inertia <= tol * prev_inertia:
                break
        elif inertia == 0.0:
            break
        prev_inertia = inertia
    return KMeansResult(labels=labels, centroids=centroids, inertia=inertia)


def kmeans(
    points: np.ndarray,
    k: int,
    seed: int = 0,
    n_init: int = 10,
    max_iters: int = 100,
    tol: float = 1e-6,
) -> KMeansResult:
    """Lloyd's algorithm with k-means++ seeding and deterministic restarts.

    Restart r draws its generator from seed + r; the run with the lowest
    inertia wins (earliest restart on ties). Empty clusters are repaired each
    iteration by reassigning the point farthest from its current centroid.

    Raises TooFewSamples when k exceeds the number of points.
    """
    points = np.asarray(points, dtype=np.float64)
    if points.ndim == 1:
        points = points[:, None]
    n = points.shape[0]
    if k > n:
        raise TooFewSamples(k, n)
    if k < 2:
        raise ConfigError("k must be >= 2")
    if not np.isfinite(points).all():
        raise ValueError("points must be finite")
    best: KMeansResult | None = None
    for r in range(n_init):
        rng = np.random.default_rng(seed + r)
        result = _lloyd_single(points, k, rng, max_iters, tol)
        if best is None or result.inertia < best.inertia:
            best = result
    return best


def silhouette_mean(points: np.ndarray, labels: np.ndarray) -> float:
    """Mean silhouette coefficient under Euclidean distance.

    s(i) = (b - a) / max(a, b) with a the mean intra-cluster distance
    (singleton clusters give s(i) = 0), b the smallest mean distance to any
    other cluster, and s(i) = 0 whenever max(a, b) = 0.

    Raises DegenerateClustering for n < 3 or fewer than 2 non-empty clusters.
    """
    points = np.asarray(points, dtype=np.float64)
    if points.ndim == 1:
        points = points[:, None]
    labels = np.asarray(labels)
    n = points.shape[0]
    clusters = np.unique(labels)
    if n < 3 or len(clusters) < 2:
        raise DegenerateClustering(
            f"need >=3 points and >=2 non-empty clusters, got n={n}, clusters={len(clusters)}"
        )
    dist = np.sqrt(((points[:, None, :] - points[None, :, :]) ** 2).sum(axis=2))
    sizes = {c: int((labels == c).sum()) for c in clusters}
    scores = np.zeros(n, dtype=np.float64)
    for i in range(n):
        own = labels[i]
        if sizes[own] == 1:
            scores[i] = 0.0
            continue
        a = dist[i, labels == own].sum() / (sizes[own] - 1)
        b = min(dist[i, labels == c].mean() for c in clusters if c != own)
        m = max(a, b)
        scores[i] = 0.0 if m == 0 else (b - a) / m
    return float(scores.mean())


# task index reserved for whole-matrix clustering, outside any topic index
_MATRIX_TASK = 2**32 - 1


def _topic_seed(seed: int, topic_index: int, k: int) -> int:
    # one deterministic 64-bit stream root per (seed, topic, K) task
    return int(np.random.SeedSequence([seed, topic_index, k]).generate_state(1, dtype=np.uint64)[0])


def topic_representativeness(
    scores: TopicScoreMatrix, config: ClusterConfig = ClusterConfig()
) -> dict[str, float]:
    """Mean silhouette per topic over all feasible K in config.k_list.

    Feasible means K <= number of companies; infeasible Ks are skipped.
    Constant (zero-variance) columns score exactly 0.0 without clustering.
    Each column is clustered in sorted order: the value is a function of the
    weight multiset, so permuting company rows cannot change it.

    Raises TooFewCompanies for n < 3 and TooFewSamples when no K in
    k_list is feasible.
    """
    n = len(scores.row_ids)
    if n < 3:
        raise TooFewCompanies(n)
    feasible = [k for k in config.k_list if k <= n]
    if not feasible:
        raise TooFewSamples(min(config.k_list), n)
    out: dict[str, float] = {}
    for j, topic_id in enumerate(scores.topic_ids):
        col = np.sort(scores.weights[:, j])
        if col.size == 0 or np.ptp(col) == 0.0:
            out[topic_id] = 0.0
            continue
        sils = []
        for k in feasible:
            result = kmeans(
                col,
                k,
                seed=_topic_seed(config.seed, j, k),
                n_init=config.n_init,
                max_iters=config.max_iters,
                tol=config.tol,
            )
            sils.append(silhouette_mean(col, result.labels))
        out[topic_id] = float(np.mean(sils))
    return out


def matrix_silhouette(
    scores: TopicScoreMatrix, config: ClusterConfig = ClusterConfig()
) -> dict[int, float]:
    """Diagnostic alternative: cluster companies on the full weight matrix.

    Returns one overall silhouette per feasible K (no per-topic attribution).
    """
    n = len(scores.row_ids)
    if n < 3:
        raise TooFewCompanies(n)
    feasible = [k for k in config.k_list if k <= n]
    if not feasible:
        raise TooFewSamples(min(config.k_list), n)
    out: dict[int, float] = {}
    for k in feasible:
        result = kmeans(
            scores.weights,
            k,
            seed=_topic_seed(config.seed, _MATRIX_TASK, k),
            n_init=config.n_init,
            max_iters=config.max_iters,
            tol=config.tol,
        )
        try:
            out[k] = silhouette_mean(scores.weights, result.labels)
        except DegenerateClustering:
            out[k] = 0.0
    return out
