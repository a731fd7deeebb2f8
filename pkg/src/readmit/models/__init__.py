"""Six from-scratch binary classifiers producing positive-class scores."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ConfigError, DimensionError
from . import forest, gnb, knn, logreg, mlp, svm
from .forest import ForestModel, train_rf
from .gnb import GnbModel, train_gnb
from .gradcheck import central_difference, gradient_check
from .knn import KnnModel, train_knn
from .logreg import LogregModel, logreg_top_features, train_logreg
from .mlp import MlpModel, MlpSpec, train_mlp
from .serialize import load_model, save_model
from .svm import SvmModel, train_svm

MODEL_KINDS = ("LOGREG", "KNN", "GNB", "RF", "SVM", "MLP")

_SCORERS = {
    LogregModel: logreg.predict_scores,
    KnnModel: knn.predict_scores,
    GnbModel: gnb.predict_scores,
    ForestModel: forest.predict_scores,
    SvmModel: svm.predict_scores,
    MlpModel: mlp.predict_scores,
}

# Probability-like scores threshold at 0.5; raw SVM margins at 0.
_THRESHOLDS = {SvmModel: 0.0}


@dataclass(frozen=True)
class Dataset:
    """Dense feature matrix with binary labels."""

    features: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        features = np.asarray(self.features, dtype=float)
        labels = np.asarray(self.labels)
        if features.ndim != 2:
            raise DimensionError(f"features must be 2-D, got shape "
                                 f"{features.shape}")
        if labels.shape != (features.shape[0],):
            raise DimensionError(f"labels shape {labels.shape} does not "
                                 f"match {features.shape[0]} rows")
        if features.shape[0] < 1:
            raise ConfigError("dataset must contain at least one row")
        if not np.all(np.isfinite(features)):
            raise ConfigError("features contain non-finite values")
        if not np.all(np.isin(labels, (0, 1))):
            raise ConfigError("labels must be binary 0/1")
        object.__setattr__(self, "features", features)
        object.__setattr__(self, "labels", labels.astype(int))

    @property
    def n_rows(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]


def predict_scores(model, features: np.ndarray) -> np.ndarray:
    """Positive-class scores from any trained model kind."""
    scorer = _SCORERS.get(type(model))
    if scorer is None:
        raise ConfigError(f"unknown model type {type(model).__name__}")
    return scorer(model, features)


def predict_labels(model, features: np.ndarray) -> np.ndarray:
    """Hard 0/1 predictions for confusion-matrix metrics."""
    threshold = _THRESHOLDS.get(type(model), 0.5)
    return (predict_scores(model, features) >= threshold).astype(int)


def train_model(kind: str, data: Dataset, seed: int = 0,
                **hyperparameters):
    """Train any model kind by name with its keyword hyperparameters."""
    kind = kind.upper()
    if kind == "LOGREG":
        return train_logreg(data, seed=seed, **hyperparameters)
    if kind == "KNN":
        return train_knn(data, **hyperparameters)
    if kind == "GNB":
        return train_gnb(data, **hyperparameters)
    if kind == "RF":
        return train_rf(data, seed=seed, **hyperparameters)
    if kind == "SVM":
        return train_svm(data, seed=seed, **hyperparameters)
    if kind == "MLP":
        spec = MlpSpec(layer_sizes=[data.n_features,
                                    *hyperparameters.pop("hidden", [32]), 1],
                       seed=seed, **hyperparameters)
        return train_mlp(data, spec)
    raise ConfigError(f"unknown model kind {kind!r}; expected one of "
                      f"{', '.join(MODEL_KINDS)}")


__all__ = [
    "MODEL_KINDS", "Dataset", "predict_scores", "predict_labels",
    "train_model", "save_model", "load_model",
    "LogregModel", "train_logreg", "logreg_top_features",
    "KnnModel", "train_knn", "GnbModel", "train_gnb",
    "ForestModel", "train_rf", "SvmModel", "train_svm",
    "MlpModel", "MlpSpec", "train_mlp",
    "gradient_check", "central_difference",
]
