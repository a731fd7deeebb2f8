"""Finite-difference verification of the analytic training gradients."""

from __future__ import annotations

import numpy as np

from ..errors import ConfigError
from . import logreg, mlp

_DENOM_FLOOR = 1e-8


def central_difference(loss_fn, params: np.ndarray,
                       h: float = 1e-5) -> np.ndarray:
    """Numeric gradient of loss_fn at params, one coordinate at a time."""
    params = np.asarray(params, dtype=float)
    grad = np.empty_like(params)
    for i in range(params.shape[0]):
        bumped = params.copy()
        bumped[i] = params[i] + h
        upper = loss_fn(bumped)
        bumped[i] = params[i] - h
        lower = loss_fn(bumped)
        grad[i] = (upper - lower) / (2.0 * h)
    return grad


def _max_relative_error(analytic: np.ndarray,
                        numeric: np.ndarray) -> float:
    denom = np.maximum(np.abs(analytic) + np.abs(numeric), _DENOM_FLOOR)
    return float(np.max(np.abs(analytic - numeric) / denom))


def _logreg_flat(params, features, labels, l2):
    weights, bias = params[:-1], float(params[-1])
    loss, grad_w, grad_b = logreg.loss_and_grad(weights, bias, features,
                                                labels, l2)
    return loss, np.concatenate([grad_w, [grad_b]])


def _mlp_shapes(layer_sizes):
    shapes = []
    for fan_in, fan_out in zip(layer_sizes, layer_sizes[1:]):
        shapes.append((fan_in, fan_out))
    return shapes


def _mlp_unpack(params, layer_sizes):
    shapes = _mlp_shapes(layer_sizes)
    weights, biases = [], []
    cursor = 0
    for fan_in, fan_out in shapes:
        weights.append(params[cursor:cursor + fan_in * fan_out]
                       .reshape(fan_in, fan_out))
        cursor += fan_in * fan_out
    for _, fan_out in shapes:
        biases.append(params[cursor:cursor + fan_out])
        cursor += fan_out
    return weights, biases


def _mlp_flat(params, layer_sizes, features, labels, l2):
    weights, biases = _mlp_unpack(params, layer_sizes)
    loss, grad_w, grad_b = mlp.loss_and_grad(weights, biases, features,
                                             labels, l2)
    flat = np.concatenate([g.ravel() for g in grad_w]
                          + [g for g in grad_b])
    return loss, flat


def gradient_check(model_kind: str, features: np.ndarray,
                   labels: np.ndarray, h: float = 1e-5,
                   n_draws: int = 10, seed: int = 0,
                   hidden: tuple[int, ...] = (3,),
                   l2: float = 1e-3) -> float:
    """Worst relative error between analytic and numeric gradients.

    Draws random parameter vectors, evaluates both gradients of the
    training loss at each, and returns the maximum relative error seen.
    """
    features = np.asarray(features, dtype=float)
    labels = np.asarray(labels, dtype=float)
    d = features.shape[1]
    kind = model_kind.upper()
    if kind == "LOGREG":
        n_params = d + 1

        def evaluate(params):
            return _logreg_flat(params, features, labels, l2)
    elif kind == "MLP":
        layer_sizes = [d, *hidden, 1]
        shapes = _mlp_shapes(layer_sizes)
        n_params = sum(fi * fo for fi, fo in shapes) \
            + sum(fo for _, fo in shapes)

        def evaluate(params):
            return _mlp_flat(params, layer_sizes, features, labels, l2)
    else:
        raise ConfigError(f"gradient check supports LOGREG and MLP, "
                          f"got {model_kind!r}")

    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_draws):
        params = rng.normal(0.0, 0.5, n_params)
        _, analytic = evaluate(params)
        numeric = central_difference(lambda p: evaluate(p)[0], params, h)
        worst = max(worst, _max_relative_error(analytic, numeric))
    return worst
