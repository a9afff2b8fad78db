"""Versioned JSON model files with 17-significant-digit floats."""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np
import scipy.sparse as sp

from .base import TrainedModel
from .knn import KNNModel
from .logistic import LogisticModel
from .mlp import MLPModel
from .naive_bayes import NaiveBayesModel
from .tree import DecisionTreeModel

FORMAT = "newsbarriers-model"
VERSION = 1


def _float(x: float) -> str:
    if math.isnan(x):
        return '"NaN"'
    if math.isinf(x):
        return '"Infinity"' if x > 0 else '"-Infinity"'
    return format(x, ".17g")


def _encode(obj) -> str:
    if isinstance(obj, np.ndarray):
        if obj.dtype.kind in "iub":
            return _encode({"shape": list(obj.shape), "dtype": "int", "data": [int(v) for v in obj.ravel()]})
        return _encode({"shape": list(obj.shape), "dtype": "float", "data": obj.astype(float).ravel().tolist()})
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {_encode(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(_encode(v) for v in obj) + "]"
    if isinstance(obj, (bool, np.bool_)) or obj is None or isinstance(obj, str):
        return json.dumps(obj if not isinstance(obj, np.bool_) else bool(obj))
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _float(float(obj))
    raise TypeError(f"cannot encode {type(obj).__name__}")


def model_to_json(model: TrainedModel) -> str:
    doc = {
        "format": FORMAT,
        "version": VERSION,
        "kind": model.kind,
        "classes": list(model.classes),
        "n_features": model.n_features,
        "vocab_fingerprint": model.vocab_fingerprint,
        "params": model.parameters(),
    }
    return _encode(doc) + "\n"


def save_model(path: str | Path, model: TrainedModel) -> None:
    Path(path).write_text(model_to_json(model), encoding="utf-8")


def _array(spec) -> np.ndarray:
    dtype = np.int64 if spec["dtype"] == "int" else float
    data = [float(v) if isinstance(v, str) else v for v in spec["data"]]
    return np.array(data, dtype=dtype).reshape(spec["shape"])


def model_from_json(text: str) -> TrainedModel:
    doc = json.loads(text)
    if doc.get("format") != FORMAT or doc.get("version") != VERSION:
        raise ValueError("not a supported model file")
    p = doc["params"]
    common = dict(classes=tuple(doc["classes"]), n_features=doc["n_features"],
                  vocab_fingerprint=doc["vocab_fingerprint"])
    kind = doc["kind"]
    if kind == "logistic":
        return LogisticModel(weights=_array(p["weights"]), bias=_array(p["bias"]), **common)
    if kind == "naive_bayes":
        return NaiveBayesModel(log_prior=_array(p["log_prior"]), log_likelihood=_array(p["log_likelihood"]), **common)
    if kind == "mlp":
        n_layers = sum(1 for k in p if k.startswith("W"))
        return MLPModel(weights=[_array(p[f"W{i}"]) for i in range(n_layers)],
                        biases=[_array(p[f"b{i}"]) for i in range(n_layers)], **common)
    if kind == "knn":
        X = sp.csr_matrix((_array(p["data"]), _array(p["indices"]), _array(p["indptr"])), shape=tuple(p["shape"]))
        return KNNModel(k=p["k"], train_X=X, train_y=_array(p["labels"]), **common)
    if kind == "decision_tree":
        return DecisionTreeModel(feature=_array(p["feature"]), threshold=_array(p["threshold"]),
                                 left=_array(p["left"]), right=_array(p["right"]), value=_array(p["value"]), **common)
    raise ValueError(f"unknown model kind {kind!r}")


def load_model(path: str | Path) -> TrainedModel:
    return model_from_json(Path(path).read_text(encoding="utf-8"))
