"""JSON model files shared by all six classifier kinds."""

from __future__ import annotations

import json

import numpy as np

from ..errors import SchemaError
from .forest import ForestModel, TreeNode
from .gnb import GnbModel
from .knn import KnnModel
from .logreg import LogregModel
from .mlp import MlpModel, MlpSpec
from .svm import SvmModel

MODEL_FORMAT_VERSION = 1


def _tree_to_dict(node: TreeNode) -> dict:
    if node.is_leaf:
        return {"feature": -1, "prediction": node.prediction}
    return {
        "feature": node.feature,
        "threshold": node.threshold,
        "prediction": node.prediction,
        "left": _tree_to_dict(node.left),
        "right": _tree_to_dict(node.right),
    }


def _tree_from_dict(payload: dict) -> TreeNode:
    if payload["feature"] < 0:
        return TreeNode(feature=-1, threshold=0.0, left=None, right=None,
                        prediction=payload["prediction"])
    return TreeNode(
        feature=payload["feature"],
        threshold=payload["threshold"],
        left=_tree_from_dict(payload["left"]),
        right=_tree_from_dict(payload["right"]),
        prediction=payload["prediction"],
    )


def _encode(model) -> dict:
    if isinstance(model, LogregModel):
        return {
            "hyperparameters": {"learning_rate": model.learning_rate,
                                "epochs": model.epochs, "l2": model.l2},
            "parameters": {"weights": model.weights.tolist(),
                           "bias": model.bias},
            "train_seed": model.train_seed,
        }
    if isinstance(model, KnnModel):
        return {
            "hyperparameters": {"k": model.k},
            "parameters": {
                "train_features": model.train_features.tolist(),
                "train_labels": model.train_labels.tolist(),
            },
            "train_seed": 0,
        }
    if isinstance(model, GnbModel):
        return {
            "hyperparameters": {"var_smoothing": model.var_smoothing},
            "parameters": {"log_priors": model.log_priors.tolist(),
                           "means": model.means.tolist(),
                           "variances": model.variances.tolist()},
            "train_seed": 0,
        }
    if isinstance(model, ForestModel):
        return {
            "hyperparameters": {"n_trees": model.n_trees,
                                "max_depth": model.max_depth,
                                "min_leaf": model.min_leaf,
                                "bootstrap": model.bootstrap},
            "parameters": {"trees": [_tree_to_dict(t)
                                     for t in model.trees]},
            "train_seed": model.train_seed,
        }
    if isinstance(model, SvmModel):
        return {
            "hyperparameters": {"lambda": model.lam,
                                "epochs": model.epochs},
            "parameters": {"weights": model.weights.tolist(),
                           "bias": model.bias},
            "train_seed": model.train_seed,
        }
    if isinstance(model, MlpModel):
        spec = model.spec
        return {
            "hyperparameters": {"layer_sizes": list(spec.layer_sizes),
                                "learning_rate": spec.learning_rate,
                                "epochs": spec.epochs,
                                "batch_size": spec.batch_size,
                                "l2": spec.l2},
            "parameters": {"weights": [w.tolist() for w in model.weights],
                           "biases": [b.tolist() for b in model.biases]},
            "train_seed": spec.seed,
        }
    raise SchemaError(f"cannot serialize model type "
                      f"{type(model).__name__}")


def save_model(model, path) -> None:
    payload = _encode(model)
    payload["format_version"] = MODEL_FORMAT_VERSION
    payload["kind"] = model.kind
    payload["feature_dim"] = model.feature_dim
    with open(path, "w", encoding="utf-8") as stream:
        json.dump(payload, stream, sort_keys=True, indent=2)
        stream.write("\n")


def load_model(path):
    with open(path, "r", encoding="utf-8") as stream:
        payload = json.load(stream)
    if payload.get("format_version") != MODEL_FORMAT_VERSION:
        raise SchemaError(f"unsupported model file version "
                          f"{payload.get('format_version')!r}")
    kind = payload.get("kind")
    hyper = payload["hyperparameters"]
    params = payload["parameters"]
    seed = payload["train_seed"]
    if kind == "LOGREG":
        return LogregModel(weights=np.array(params["weights"]),
                           bias=params["bias"],
                           learning_rate=hyper["learning_rate"],
                           epochs=hyper["epochs"], l2=hyper["l2"],
                           train_seed=seed)
    if kind == "KNN":
        return KnnModel(
            train_features=np.array(params["train_features"]),
            train_labels=np.array(params["train_labels"], dtype=int),
            k=hyper["k"])
    if kind == "GNB":
        return GnbModel(log_priors=np.array(params["log_priors"]),
                        means=np.array(params["means"]),
                        variances=np.array(params["variances"]),
                        var_smoothing=hyper["var_smoothing"])
    if kind == "RF":
        return ForestModel(
            trees=tuple(_tree_from_dict(t) for t in params["trees"]),
            n_trees=hyper["n_trees"], max_depth=hyper["max_depth"],
            min_leaf=hyper["min_leaf"], bootstrap=hyper["bootstrap"],
            train_seed=seed, feature_dim=payload["feature_dim"])
    if kind == "SVM":
        return SvmModel(weights=np.array(params["weights"]),
                        bias=params["bias"], lam=hyper["lambda"],
                        epochs=hyper["epochs"], train_seed=seed)
    if kind == "MLP":
        spec = MlpSpec(layer_sizes=list(hyper["layer_sizes"]),
                       learning_rate=hyper["learning_rate"],
                       epochs=hyper["epochs"],
                       batch_size=hyper["batch_size"], l2=hyper["l2"],
                       seed=seed)
        return MlpModel(
            weights=tuple(np.array(w) for w in params["weights"]),
            biases=tuple(np.array(b) for b in params["biases"]),
            spec=spec)
    raise SchemaError(f"unknown model kind {kind!r} in file")
