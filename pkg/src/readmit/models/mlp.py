"""Multilayer perceptron with ReLU hidden layers and a sigmoid output.

Weights initialize uniform in +-sqrt(6 / (fan_in + fan_out)) from the
seed; biases start at zero. Training is mini-batch gradient descent on
binary cross-entropy, with each epoch's batch order drawn from the same
seeded generator, so runs are fully deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigError, DimensionError, TrainingDivergedError
from .logreg import sigmoid

_CLIP = 1e-12


@dataclass
class MlpSpec:
    layer_sizes: list[int]
    learning_rate: float = 0.01
    epochs: int = 30
    batch_size: int = 64
    l2: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if len(self.layer_sizes) < 2:
            raise ConfigError("layer_sizes needs at least input and output")
        if self.layer_sizes[-1] != 1:
            raise ConfigError(f"output layer size must be 1, got "
                              f"{self.layer_sizes[-1]}")
        if any(size < 1 for size in self.layer_sizes):
            raise ConfigError(f"layer sizes must be >= 1: "
                              f"{self.layer_sizes}")
        if self.learning_rate <= 0 or self.batch_size < 1:
            raise ConfigError("learning_rate must be > 0 and "
                              "batch_size >= 1")


@dataclass(frozen=True)
class MlpModel:
    weights: tuple[np.ndarray, ...]
    biases: tuple[np.ndarray, ...]
    spec: MlpSpec = field(repr=False)

    kind = "MLP"

    @property
    def feature_dim(self) -> int:
        return self.weights[0].shape[0]


def init_params(spec: MlpSpec,
                rng: np.random.Generator,
                ) -> tuple[list[np.ndarray], list[np.ndarray]]:
    weights, biases = [], []
    for fan_in, fan_out in zip(spec.layer_sizes, spec.layer_sizes[1:]):
        limit = np.sqrt(6.0 / (fan_in + fan_out))
        weights.append(rng.uniform(-limit, limit, (fan_in, fan_out)))
        biases.append(np.zeros(fan_out))
    return weights, biases


def _forward(weights, biases, features):
    """Returns per-layer activations; last entry is the output column."""
    activations = [features]
    current = features
    last = len(weights) - 1
    for i, (w, b) in enumerate(zip(weights, biases)):
        z = current @ w + b
        current = sigmoid(z) if i == last else np.maximum(z, 0.0)
        activations.append(current)
    return activations


def loss_and_grad(weights, biases, features, labels, l2):
    """BCE loss (plus L2 on weights) and gradients per layer."""
    n = features.shape[0]
    activations = _forward(weights, biases, features)
    output = activations[-1][:, 0]
    clipped = np.clip(output, _CLIP, 1.0 - _CLIP)
    loss = -np.mean(labels * np.log(clipped)
                    + (1 - labels) * np.log(1 - clipped))
    loss += 0.5 * l2 * sum(float(np.sum(w * w)) for w in weights)

    delta = (output - labels)[:, None] / n
    grad_w = [None] * len(weights)
    grad_b = [None] * len(weights)
    for layer in range(len(weights) - 1, -1, -1):
        grad_w[layer] = activations[layer].T @ delta + l2 * weights[layer]
        grad_b[layer] = delta.sum(axis=0)
        if layer > 0:
            delta = (delta @ weights[layer].T) * (activations[layer] > 0)
    return float(loss), grad_w, grad_b


def train_mlp(data, spec: MlpSpec) -> MlpModel:
    if spec.layer_sizes[0] != data.n_features:
        raise ConfigError(f"input layer size {spec.layer_sizes[0]} does "
                          f"not match {data.n_features} features")
    features = data.features
    labels = data.labels.astype(float)
    rng = np.random.default_rng(spec.seed)
    weights, biases = init_params(spec, rng)
    n = features.shape[0]
    for epoch in range(spec.epochs):
        order = rng.permutation(n)
        for start in range(0, n, spec.batch_size):
            batch = order[start:start + spec.batch_size]
            loss, grad_w, grad_b = loss_and_grad(weights, biases,
                                                 features[batch],
                                                 labels[batch], spec.l2)
            if not np.isfinite(loss):
                raise TrainingDivergedError(
                    f"MLP diverged at epoch {epoch} (loss={loss})",
                    iteration=epoch, loss=loss)
            for layer in range(len(weights)):
                weights[layer] = weights[layer] \
                    - spec.learning_rate * grad_w[layer]
                biases[layer] = biases[layer] \
                    - spec.learning_rate * grad_b[layer]
    return MlpModel(weights=tuple(weights), biases=tuple(biases), spec=spec)


def predict_scores(model: MlpModel, features: np.ndarray) -> np.ndarray:
    features = np.asarray(features, dtype=float)
    single = features.ndim == 1
    if single:
        features = features[None, :]
    if features.shape[1] != model.feature_dim:
        raise DimensionError(f"expected {model.feature_dim} features, "
                             f"got {features.shape[1]}")
    output = _forward(list(model.weights), list(model.biases),
                      features)[-1][:, 0]
    return output[0] if single else output
