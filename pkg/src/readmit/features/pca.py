"""Principal component analysis via singular value decomposition.

Components are the top-k right singular vectors of the mean-centered
data; explained variance uses the N-1 divisor. A deterministic sign
convention (largest-magnitude entry positive) makes model files
byte-reproducible.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass

import numpy as np

from ..errors import ConfigError, DimensionError, SchemaError

logger = logging.getLogger(__name__)

PCA_FORMAT_VERSION = 1
DEFAULT_COMPONENTS = 50


@dataclass(frozen=True)
class PcaModel:
    input_dim: int
    k: int
    mean: np.ndarray
    components: np.ndarray
    explained_variance: np.ndarray


def pca_fit(matrix: np.ndarray, k: int = DEFAULT_COMPONENTS) -> PcaModel:
    """Fit PCA on an N x D matrix; requires k <= min(N - 1, D)."""
    matrix = np.asarray(matrix, dtype=float)
    if matrix.ndim != 2:
        raise DimensionError(f"expected a 2-D matrix, got shape "
                             f"{matrix.shape}")
    n, d = matrix.shape
    if n < 2:
        raise ConfigError(f"PCA needs at least 2 rows, got {n}")
    if not 1 <= k <= min(n - 1, d):
        raise ConfigError(f"k must satisfy 1 <= k <= min(N-1, D) = "
                          f"{min(n - 1, d)}, got {k}")

    mean = matrix.mean(axis=0)
    centered = matrix - mean
    _, singular_values, vt = np.linalg.svd(centered, full_matrices=False)
    components = vt[:k].copy()
    explained_variance = (singular_values[:k] ** 2) / (n - 1)

    if not np.any(singular_values > 0):
        logger.warning("input has zero variance; components are an "
                       "arbitrary orthonormal basis")

    # Sign convention: largest-magnitude entry positive, ties by lowest
    # index (argmax picks the first maximum).
    for row in components:
        pivot = np.argmax(np.abs(row))
        if row[pivot] < 0:
            row *= -1.0
    return PcaModel(input_dim=d, k=k, mean=mean, components=components,
                    explained_variance=explained_variance)


def pca_transform(model: PcaModel, data: np.ndarray) -> np.ndarray:
    """Project vectors onto the components: components . (x - mean)."""
    data = np.asarray(data, dtype=float)
    if data.shape[-1] != model.input_dim:
        raise DimensionError(f"expected last dimension {model.input_dim}, "
                             f"got {data.shape[-1]}")
    return (data - model.mean) @ model.components.T


def save_pca(model: PcaModel, path) -> None:
    payload = {
        "format_version": PCA_FORMAT_VERSION,
        "input_dim": model.input_dim,
        "k": model.k,
        "mean": model.mean.tolist(),
        "components": model.components.tolist(),
        "explained_variance": model.explained_variance.tolist(),
    }
    with open(path, "w", encoding="utf-8") as stream:
        json.dump(payload, stream, sort_keys=True, indent=2)
        stream.write("\n")


def load_pca(path) -> PcaModel:
    with open(path, "r", encoding="utf-8") as stream:
        payload = json.load(stream)
    if payload.get("format_version") != PCA_FORMAT_VERSION:
        raise SchemaError(f"unsupported PCA model version "
                          f"{payload.get('format_version')!r}")
    return PcaModel(
        input_dim=payload["input_dim"],
        k=payload["k"],
        mean=np.array(payload["mean"]),
        components=np.array(payload["components"]),
        explained_variance=np.array(payload["explained_variance"]),
    )
