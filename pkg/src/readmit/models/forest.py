"""Random forest of Gini-split decision trees.

Each tree trains on a seeded bootstrap sample, considers sqrt(d)
randomly chosen features per node, and predicts its leaf's majority
label. The forest score is the exact arithmetic mean of tree votes.
Per-tree generators spawn from one SeedSequence, so trees are
reproducible independent of construction order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import ConfigError, DimensionError


@dataclass(frozen=True)
class TreeNode:
    """Internal split node or leaf (feature < 0 marks a leaf)."""

    feature: int
    threshold: float
    left: "TreeNode | None"
    right: "TreeNode | None"
    prediction: int

    @property
    def is_leaf(self) -> bool:
        return self.feature < 0


def _leaf(labels: np.ndarray) -> TreeNode:
    positives = int(labels.sum())
    prediction = 1 if positives * 2 > labels.shape[0] else 0
    return TreeNode(feature=-1, threshold=0.0, left=None, right=None,
                    prediction=prediction)


def _best_split(features: np.ndarray, labels: np.ndarray,
                candidates: np.ndarray, min_leaf: int,
                ) -> tuple[float, int, float] | None:
    """Lowest weighted Gini impurity over the candidate features.

    Prefix sums over the sorted column give each split's positive count
    in O(1); candidate thresholds sit midway between distinct values.
    """
    n = labels.shape[0]
    best: tuple[float, int, float] | None = None
    for feature in candidates:
        column = features[:, feature]
        order = np.argsort(column, kind="stable")
        sorted_values = column[order]
        sorted_labels = labels[order]
        positive_prefix = np.cumsum(sorted_labels)
        total_positive = positive_prefix[-1]
        for split in range(min_leaf, n - min_leaf + 1):
            if sorted_values[split - 1] == sorted_values[split]:
                continue
            left_n, right_n = split, n - split
            left_pos = positive_prefix[split - 1]
            right_pos = total_positive - left_pos
            left_p = left_pos / left_n
            right_p = right_pos / right_n
            gini = (left_n * 2.0 * left_p * (1.0 - left_p)
                    + right_n * 2.0 * right_p * (1.0 - right_p)) / n
            if best is None or gini < best[0]:
                threshold = (sorted_values[split - 1]
                             + sorted_values[split]) / 2.0
                best = (gini, int(feature), float(threshold))
    return best


def _grow(features: np.ndarray, labels: np.ndarray, depth: int,
          max_depth: int, min_leaf: int, n_candidates: int,
          rng: np.random.Generator) -> TreeNode:
    n = labels.shape[0]
    positives = int(labels.sum())
    if depth >= max_depth or n < 2 * min_leaf or positives in (0, n):
        return _leaf(labels)
    candidates = rng.choice(features.shape[1], size=n_candidates,
                            replace=False)
    best = _best_split(features, labels, candidates, min_leaf)
    if best is None and n_candidates < features.shape[1]:
        # No valid split among the sampled features; widen to all of them
        # so a consistent dataset can always be shattered.
        best = _best_split(features, labels, np.arange(features.shape[1]),
                           min_leaf)
    if best is None:
        return _leaf(labels)
    _, feature, threshold = best
    goes_left = features[:, feature] <= threshold
    left = _grow(features[goes_left], labels[goes_left], depth + 1,
                 max_depth, min_leaf, n_candidates, rng)
    right = _grow(features[~goes_left], labels[~goes_left], depth + 1,
                  max_depth, min_leaf, n_candidates, rng)
    return TreeNode(feature=feature, threshold=threshold, left=left,
                    right=right, prediction=_leaf(labels).prediction)


@dataclass(frozen=True)
class ForestModel:
    trees: tuple[TreeNode, ...]
    n_trees: int
    max_depth: int
    min_leaf: int
    bootstrap: bool
    train_seed: int
    feature_dim: int

    kind = "RF"


def train_rf(data, n_trees: int = 100, max_depth: int = 16,
             min_leaf: int = 2, bootstrap: bool = True,
             seed: int = 0) -> ForestModel:
    if n_trees < 1:
        raise ConfigError(f"n_trees must be >= 1, got {n_trees}")
    if max_depth < 1 or min_leaf < 1:
        raise ConfigError("max_depth and min_leaf must be >= 1")
    features, labels = data.features, data.labels
    n, d = features.shape
    n_candidates = max(1, int(math.isqrt(d)))
    trees = []
    for child in np.random.SeedSequence(seed).spawn(n_trees):
        rng = np.random.default_rng(child)
        if bootstrap:
            sample = rng.integers(0, n, size=n)
        else:
            sample = np.arange(n)
        trees.append(_grow(features[sample], labels[sample], 0, max_depth,
                           min_leaf, n_candidates, rng))
    return ForestModel(trees=tuple(trees), n_trees=n_trees,
                       max_depth=max_depth, min_leaf=min_leaf,
                       bootstrap=bootstrap, train_seed=seed, feature_dim=d)


def tree_vote(tree: TreeNode, row: np.ndarray) -> int:
    node = tree
    while not node.is_leaf:
        node = node.left if row[node.feature] <= node.threshold \
            else node.right
    return node.prediction


def predict_scores(model: ForestModel, features: np.ndarray) -> np.ndarray:
    features = np.asarray(features, dtype=float)
    if features.ndim == 1:
        features = features[None, :]
    if features.shape[1] != model.feature_dim:
        raise DimensionError(f"expected {model.feature_dim} features, "
                             f"got {features.shape[1]}")
    scores = np.empty(features.shape[0])
    for i, row in enumerate(features):
        votes = sum(tree_vote(tree, row) for tree in model.trees)
        scores[i] = votes / model.n_trees
    return scores
