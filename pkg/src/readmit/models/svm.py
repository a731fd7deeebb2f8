"""Linear SVM trained by stochastic subgradient descent on hinge loss.

Pegasos-style updates with step size 1/(lambda * t) on the
L2-regularized hinge objective; labels map to -1/+1 internally. Scores
are raw margins w.x + b, suitable for ROC ranking.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ConfigError, DimensionError, TrainingDivergedError


@dataclass(frozen=True)
class SvmModel:
    weights: np.ndarray
    bias: float
    lam: float
    epochs: int
    train_seed: int

    kind = "SVM"

    @property
    def feature_dim(self) -> int:
        return self.weights.shape[0]


def train_svm(data, lam: float = 1e-4, epochs: int = 20,
              seed: int = 0) -> SvmModel:
    if lam <= 0:
        raise ConfigError(f"lambda must be > 0, got {lam}")
    features = data.features
    signed = data.labels * 2.0 - 1.0
    n = features.shape[0]
    weights = np.zeros(features.shape[1])
    bias = 0.0
    rng = np.random.default_rng(seed)
    step = 0
    for epoch in range(epochs):
        for i in rng.permutation(n):
            step += 1
            eta = 1.0 / (lam * step)
            margin = signed[i] * (features[i] @ weights + bias)
            weights *= 1.0 - eta * lam
            if margin < 1.0:
                weights += eta * signed[i] * features[i]
                bias += eta * signed[i]
        if not np.all(np.isfinite(weights)) or not np.isfinite(bias):
            raise TrainingDivergedError(
                f"SVM parameters became non-finite at epoch {epoch}",
                iteration=epoch, loss=None)
    return SvmModel(weights=weights, bias=bias, lam=lam, epochs=epochs,
                    train_seed=seed)


def predict_scores(model: SvmModel, features: np.ndarray) -> np.ndarray:
    """Raw margins; threshold at zero for hard labels."""
    features = np.asarray(features, dtype=float)
    if features.shape[-1] != model.feature_dim:
        raise DimensionError(f"expected {model.feature_dim} features, "
                             f"got {features.shape[-1]}")
    return features @ model.weights + model.bias
