"""Gaussian naive Bayes with per-class diagonal covariance.

Per-class variances use the N_c divisor and are floored at
var_smoothing times the largest overall feature variance. Posteriors
are computed in log space and normalized with log-sum-exp.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import ConfigError, DimensionError

LOG_2PI = math.log(2.0 * math.pi)


@dataclass(frozen=True)
class GnbModel:
    log_priors: np.ndarray
    means: np.ndarray
    variances: np.ndarray
    var_smoothing: float

    kind = "GNB"

    @property
    def feature_dim(self) -> int:
        return self.means.shape[1]


def train_gnb(data, var_smoothing: float = 1e-9) -> GnbModel:
    if var_smoothing < 0:
        raise ConfigError(f"var_smoothing must be >= 0, "
                          f"got {var_smoothing}")
    features, labels = data.features, data.labels
    counts = np.array([(labels == c).sum() for c in (0, 1)])
    if counts.min() == 0:
        missing = int(np.argmin(counts))
        raise ConfigError(f"class {missing} absent from training data")

    means = np.stack([features[labels == c].mean(axis=0) for c in (0, 1)])
    variances = np.stack([features[labels == c].var(axis=0)
                          for c in (0, 1)])
    floor = var_smoothing * float(features.var(axis=0).max())
    if floor <= 0.0:
        floor = var_smoothing
    variances = np.maximum(variances, floor)
    log_priors = np.log(counts / labels.shape[0])
    return GnbModel(log_priors=log_priors, means=means,
                    variances=variances, var_smoothing=var_smoothing)


def _joint_log_likelihood(model: GnbModel,
                          features: np.ndarray) -> np.ndarray:
    """Log prior plus Gaussian log density, one column per class."""
    columns = []
    for c in (0, 1):
        diff = features - model.means[c]
        log_density = -0.5 * np.sum(
            LOG_2PI + np.log(model.variances[c])
            + diff ** 2 / model.variances[c], axis=1)
        columns.append(model.log_priors[c] + log_density)
    return np.stack(columns, axis=1)


def predict_scores(model: GnbModel, features: np.ndarray) -> np.ndarray:
    features = np.asarray(features, dtype=float)
    if features.ndim == 1:
        features = features[None, :]
    if features.shape[1] != model.feature_dim:
        raise DimensionError(f"expected {model.feature_dim} features, "
                             f"got {features.shape[1]}")
    joint = _joint_log_likelihood(model, features)
    peak = joint.max(axis=1, keepdims=True)
    log_norm = peak[:, 0] + np.log(np.sum(np.exp(joint - peak), axis=1))
    return np.exp(joint[:, 1] - log_norm)
