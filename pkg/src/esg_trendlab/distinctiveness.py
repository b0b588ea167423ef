"""Cross-sector distinctiveness: random-forest Gini importance per topic.

A forest of CART trees is trained each year to predict a company class
(service area by default) from the company's topic weights; a topic's
distinctiveness is its normalized mean-decrease-in-impurity importance.
All randomness is derived from (seed, tree index) streams, so results do
not depend on training order.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .errors import ConfigError, DegenerateForest, DimensionMismatch, LabelMismatch, TooFewSamples
from .scoring import TopicScoreMatrix

LABEL_KINDS = ("service_area", "country", "custom")


@dataclass(frozen=True)
class ForestConfig:
    n_trees: int = 200
    max_depth: int | None = None
    min_samples_split: int = 2
    features_per_split: str | float = "sqrt"
    bootstrap: bool = True
    seed: int = 0

    def __post_init__(self):
        if self.n_trees < 1:
            raise ConfigError("n_trees must be >= 1")
        if self.min_samples_split < 2:
            raise ConfigError("min_samples_split must be >= 2")
        if self.max_depth is not None and self.max_depth < 1:
            raise ConfigError("max_depth must be >= 1 or None")
        fps = self.features_per_split
        if isinstance(fps, str):
            if fps not in ("sqrt", "all"):
                raise ConfigError("features_per_split must be 'sqrt', 'all' or a fraction")
        elif not 0.0 < float(fps) <= 1.0:
            raise ConfigError("features_per_split fraction must be in (0, 1]")


@dataclass
class ImportanceVector:
    year: int | None
    label_kind: str
    importances: dict[str, float]
    degenerate: bool = False


@dataclass
class _Node:
    prediction: int
    feature: int = -1  # -1 marks a leaf
    threshold: float = 0.0
    left: "_Node | None" = None
    right: "_Node | None" = None


@dataclass
class Forest:
    trees: list[_Node]
    classes: tuple[str, ...]
    topic_ids: tuple[str, ...]
    raw_importance: np.ndarray  # unnormalized impurity decrease per feature
    oob_masks: np.ndarray  # (n_trees, n_samples) bool, True = out of bag
    train_x: np.ndarray
    train_y: np.ndarray
    year: int | None
    label_kind: str
    single_class: bool


def _gini(counts: np.ndarray) -> float:
    n = counts.sum()
    if n == 0:
        return 0.0
    p = counts / n
    return float(1.0 - (p * p).sum())


def _max_features(spec: str | float, n_features: int) -> int:
    if spec == "all":
        return n_features
    if spec == "sqrt":
        return max(1, int(math.sqrt(n_features)))
    return max(1, int(float(spec) * n_features))


def _best_split(
    x: np.ndarray,
    y: np.ndarray,
    idx: np.ndarray,
    n_classes: int,
    rng: np.random.Generator,
    max_features: int,
) -> tuple[int, float, float] | None:
    """Best (feature, threshold, decrease) at a node, or None if nothing splits.

    Features are visited in a random order until max_features non-constant
    ones have been evaluated (constants do not use up the budget, mirroring
    the usual soft limit). Ties on impurity decrease go to the lowest
    feature index; within a feature, to the lowest threshold.
    """
    node_x = x[idx]
    node_y = y[idx]
    n_node = len(idx)
    parent_counts = np.bincount(node_y, minlength=n_classes)
    parent_gini = _gini(parent_counts)
    best: tuple[float, int, float] | None = None  # (decrease, feature, threshold)
    examined = 0
    for f in rng.permutation(x.shape[1]):
        col = node_x[:, f]
        order = np.argsort(col, kind="stable")
        sorted_vals = col[order]
        if sorted_vals[0] == sorted_vals[-1]:
            continue  # constant here; does not count toward the budget
        examined += 1
        sorted_y = node_y[order]
        left_counts = np.zeros(n_classes, dtype=np.int64)
        right_counts = parent_counts.copy()
        for i in range(n_node - 1):
            c = sorted_y[i]
            left_counts[c] += 1
            right_counts[c] -= 1
            if sorted_vals[i] == sorted_vals[i + 1]:
                continue  # identical values cannot be separated
            n_left = i + 1
            n_right = n_node - n_left
            decrease = parent_gini - (
                n_left * _gini(left_counts) + n_right * _gini(right_counts)
            ) / n_node
            if decrease <= 0:
                continue
            better = best is None or decrease > best[0] + 1e-15
            tied = best is not None and abs(decrease - best[0]) <= 1e-15
            if better or (tied and f < best[1]):
                threshold = (sorted_vals[i] + sorted_vals[i + 1]) / 2.0
                best = (decrease, int(f), float(threshold))
        if examined >= max_features:
            break
    if best is None:
        return None
    return best[1], best[2], best[0]


def _build_tree(
    x: np.ndarray,
    y: np.ndarray,
    idx: np.ndarray,
    n_classes: int,
    rng: np.random.Generator,
    config: ForestConfig,
    importance: np.ndarray,
    n_train: int,
    depth: int,
) -> _Node:
    counts = np.bincount(y[idx], minlength=n_classes)
    prediction = int(counts.argmax())  # ties fall to the lowest class index
    node = _Node(prediction=prediction)
    if (
        len(idx) < config.min_samples_split
        or counts.max() == len(idx)
        or (config.max_depth is not None and depth >= config.max_depth)
    ):
        return node
    found = _best_split(
        x, y, idx, n_classes, rng, _max_features(config.features_per_split, x.shape[1])
    )
    if found is None:
        return node
    feature, threshold, decrease = found
    importance[feature] += (len(idx) / n_train) * decrease
    go_left = x[idx, feature] <= threshold
    node.feature = feature
    node.threshold = threshold
    node.left = _build_tree(
        x, y, idx[go_left], n_classes, rng, config, importance, n_train, depth + 1
    )
    node.right = _build_tree(
        x, y, idx[~go_left], n_classes, rng, config, importance, n_train, depth + 1
    )
    return node


def train_forest(
    matrix: TopicScoreMatrix,
    labels: Mapping[str, str],
    config: ForestConfig = ForestConfig(),
    label_kind: str = "service_area",
) -> Forest:
    """Train a CART forest predicting each company's class from its weights.

    Every row id must appear in ``labels``. A single-class label set is
    allowed: training proceeds and every tree is one leaf.

    Raises LabelMismatch or TooFewSamples.
    """
    if label_kind not in LABEL_KINDS:
        raise ConfigError(f"label_kind must be one of {LABEL_KINDS}")
    n = len(matrix.row_ids)
    if n < 2:
        raise TooFewSamples(2, n)
    for company_id in matrix.row_ids:
        if company_id not in labels:
            raise LabelMismatch(company_id)
    classes = tuple(sorted({labels[c] for c in matrix.row_ids}))
    class_index = {c: i for i, c in enumerate(classes)}
    y = np.array([class_index[labels[c]] for c in matrix.row_ids], dtype=np.int64)
    x = np.asarray(matrix.weights, dtype=np.float64)
    single_class = len(classes) < 2

    trees: list[_Node] = []
    importance = np.zeros(x.shape[1], dtype=np.float64)
    oob_masks = np.zeros((config.n_trees, n), dtype=bool)
    for t in range(config.n_trees):
        rng = np.random.default_rng(np.random.SeedSequence([config.seed, t]))
        if config.bootstrap:
            idx = rng.integers(0, n, size=n)
            oob_masks[t] = ~np.isin(np.arange(n), idx)
        else:
            idx = np.arange(n)
        if single_class:
            trees.append(_Node(prediction=0))
            continue
        trees.append(
            _build_tree(x, y, np.asarray(idx), len(classes), rng, config, importance, n, 0)
        )
    return Forest(
        trees=trees,
        classes=classes,
        topic_ids=matrix.topic_ids,
        raw_importance=importance,
        oob_masks=oob_masks,
        train_x=x,
        train_y=y,
        year=matrix.year,
        label_kind=label_kind,
        single_class=single_class,
    )


def gini_importance(forest: Forest) -> ImportanceVector:
    """Impurity-decrease importances normalized to sum 1 across topics.

    A forest with zero total decrease (single class, or no tree ever split)
    yields the all-zero vector, flags it and emits a DegenerateForest
    warning instead of failing.
    """
    total = forest.raw_importance.sum()
    if total <= 0.0:
        warnings.warn("forest never split; importances are all zero", DegenerateForest)
        values = np.zeros_like(forest.raw_importance)
        degenerate = True
    else:
        values = forest.raw_importance / total
        degenerate = False
    return ImportanceVector(
        year=forest.year,
        label_kind=forest.label_kind,
        importances={t: float(v) for t, v in zip(forest.topic_ids, values)},
        degenerate=degenerate,
    )


def _tree_predict(node: _Node, sample: np.ndarray) -> int:
    while node.feature != -1:
        node = node.left if sample[node.feature] <= node.threshold else node.right
    return node.prediction


def predict(forest: Forest, sample) -> str:
    """Majority vote over trees; ties go to the lexicographically first label."""
    sample = np.asarray(sample, dtype=np.float64)
    if sample.shape != (forest.train_x.shape[1],):
        raise DimensionMismatch(forest.train_x.shape[1], sample.shape)
    votes = np.zeros(len(forest.classes), dtype=np.int64)
    for tree in forest.trees:
        votes[_tree_predict(tree, sample)] += 1
    return forest.classes[int(votes.argmax())]


def oob_accuracy(forest: Forest) -> float:
    """Accuracy of out-of-bag majority votes over the training samples.

    Samples that were in-bag for every tree are skipped; returns nan when no
    sample has any out-of-bag vote (e.g. bootstrap disabled).
    """
    n = forest.train_x.shape[0]
    hits = 0
    evaluated = 0
    for i in range(n):
        votes = np.zeros(len(forest.classes), dtype=np.int64)
        for t, tree in enumerate(forest.trees):
            if forest.oob_masks[t, i]:
                votes[_tree_predict(tree, forest.train_x[i])] += 1
        if votes.sum() == 0:
            continue
        evaluated += 1
        if int(votes.argmax()) == forest.train_y[i]:
            hits += 1
    return hits / evaluated if evaluated else float("nan")
