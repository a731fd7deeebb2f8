"""Logistic regression trained by full-batch gradient descent.

Loss is mean binary cross-entropy plus 0.5 * l2 * ||w||^2; the bias is
not regularized. Weights start at zero, so training is deterministic
independent of the seed (recorded anyway for the model file).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ConfigError, DimensionError, TrainingDivergedError

_CLIP = 1e-12


def sigmoid(z: np.ndarray) -> np.ndarray:
    """Numerically stable logistic function."""
    z = np.asarray(z, dtype=float)
    out = np.empty_like(z)
    positive = z >= 0
    out[positive] = 1.0 / (1.0 + np.exp(-z[positive]))
    exp_z = np.exp(z[~positive])
    out[~positive] = exp_z / (1.0 + exp_z)
    return out


@dataclass(frozen=True)
class LogregModel:
    weights: np.ndarray
    bias: float
    learning_rate: float
    epochs: int
    l2: float
    train_seed: int

    kind = "LOGREG"

    @property
    def feature_dim(self) -> int:
        return self.weights.shape[0]


def loss_and_grad(weights: np.ndarray, bias: float, features: np.ndarray,
                  labels: np.ndarray, l2: float,
                  ) -> tuple[float, np.ndarray, float]:
    """Regularized BCE loss with its analytic gradient."""
    n = features.shape[0]
    probabilities = sigmoid(features @ weights + bias)
    clipped = np.clip(probabilities, _CLIP, 1.0 - _CLIP)
    loss = -np.mean(labels * np.log(clipped)
                    + (1 - labels) * np.log(1 - clipped))
    loss += 0.5 * l2 * float(weights @ weights)
    residual = probabilities - labels
    grad_w = features.T @ residual / n + l2 * weights
    grad_b = float(np.mean(residual))
    return float(loss), grad_w, grad_b


def train_logreg(data, learning_rate: float = 0.1, epochs: int = 500,
                 l2: float = 1e-4, seed: int = 0) -> LogregModel:
    if learning_rate <= 0:
        raise ConfigError(f"learning_rate must be > 0, got {learning_rate}")
    if epochs < 1:
        raise ConfigError(f"epochs must be >= 1, got {epochs}")
    if l2 < 0:
        raise ConfigError(f"l2 must be >= 0, got {l2}")
    features = data.features
    labels = data.labels.astype(float)
    weights = np.zeros(features.shape[1])
    bias = 0.0
    for epoch in range(epochs):
        loss, grad_w, grad_b = loss_and_grad(weights, bias, features,
                                             labels, l2)
        if not np.isfinite(loss):
            raise TrainingDivergedError(
                f"logistic regression diverged at epoch {epoch} "
                f"(loss={loss})", iteration=epoch, loss=loss)
        weights = weights - learning_rate * grad_w
        bias = bias - learning_rate * grad_b
    if not np.all(np.isfinite(weights)) or not np.isfinite(bias):
        raise TrainingDivergedError("logistic regression produced "
                                    "non-finite parameters",
                                    iteration=epochs, loss=None)
    return LogregModel(weights=weights, bias=bias,
                       learning_rate=learning_rate, epochs=epochs, l2=l2,
                       train_seed=seed)


def predict_scores(model: LogregModel, features: np.ndarray) -> np.ndarray:
    features = np.asarray(features, dtype=float)
    if features.shape[-1] != model.feature_dim:
        raise DimensionError(f"expected {model.feature_dim} features, "
                             f"got {features.shape[-1]}")
    return sigmoid(features @ model.weights + model.bias)


def logreg_top_features(model: LogregModel, vocabulary: dict[str, int],
                        top_n: int = 10,
                        ) -> tuple[list[tuple[str, float]],
                                   list[tuple[str, float]]]:
    """Most-positive and most-negative weighted terms.

    Both lists are ordered by influence (descending weight for the
    positive list, ascending for the negative); ties break by term.
    """
    if getattr(model, "kind", None) != "LOGREG":
        raise ConfigError(f"top-feature report requires a LOGREG model, "
                          f"got {type(model).__name__}")
    if len(vocabulary) != model.feature_dim:
        raise ConfigError(f"vocabulary size {len(vocabulary)} does not "
                          f"match feature dimension {model.feature_dim}")
    weighted = [(term, float(model.weights[index]))
                for term, index in vocabulary.items()]
    positive = sorted(weighted, key=lambda item: (-item[1], item[0]))[:top_n]
    negative = sorted(weighted, key=lambda item: (item[1], item[0]))[:top_n]
    return positive, negative
