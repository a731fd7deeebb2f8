"""K-nearest-neighbor scoring by Euclidean distance.

The score is the fraction of positive labels among the k nearest
training rows; distance ties resolve to the lower training-row index via
a stable argsort.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ConfigError, DimensionError


@dataclass(frozen=True)
class KnnModel:
    train_features: np.ndarray
    train_labels: np.ndarray
    k: int

    kind = "KNN"

    @property
    def feature_dim(self) -> int:
        return self.train_features.shape[1]


def train_knn(data, k: int = 5) -> KnnModel:
    if not 1 <= k <= data.n_rows:
        raise ConfigError(f"k must be in [1, {data.n_rows}], got {k}")
    return KnnModel(train_features=data.features.copy(),
                    train_labels=data.labels.copy(), k=k)


def predict_scores(model: KnnModel, features: np.ndarray) -> np.ndarray:
    features = np.asarray(features, dtype=float)
    single = features.ndim == 1
    if single:
        features = features[None, :]
    if features.shape[1] != model.feature_dim:
        raise DimensionError(f"expected {model.feature_dim} features, "
                             f"got {features.shape[1]}")
    scores = np.empty(features.shape[0])
    for i, query in enumerate(features):
        distances = np.sum((model.train_features - query) ** 2, axis=1)
        nearest = np.argsort(distances, kind="stable")[:model.k]
        scores[i] = float(np.mean(model.train_labels[nearest]))
    return scores[0] if single else scores
