from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.sparse as sp

from ..features import SparseVector, to_csr


class TrainingError(ValueError):
    pass


@dataclass(frozen=True)
class TrainConfig:
    hidden_layers: int = 3
    hidden_units: int = 64
    epochs: int = 10
    batch_size: int = 64
    dropout_rate: float = 0.001
    learning_rate: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    l2: float = 1e-4
    seed: int = 0

    def __post_init__(self):
        for name in ("hidden_layers", "hidden_units", "epochs", "batch_size"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if not 0 <= self.dropout_rate < 1:
            raise ValueError("dropout_rate must be in [0, 1)")


@dataclass
class PredictionBatch:
    predicted: list
    scores: np.ndarray
    classes: tuple


@dataclass(kw_only=True)
class TrainedModel:
    """Common surface of every fitted model.

    Subclasses implement :meth:`predict_proba` and :meth:`parameters`.
    """

    kind: str = field(init=False, default="")
    classes: tuple
    n_features: int
    vocab_fingerprint: str | None = None

    def predict_proba(self, X) -> np.ndarray:
        raise NotImplementedError

    def parameters(self) -> dict:
        raise NotImplementedError


def as_matrix(X, n_features: int | None = None):
    """Accept a CSR matrix, dense array or list of :class:`SparseVector`."""
    if isinstance(X, (list, tuple)):
        if X and isinstance(X[0], SparseVector):
            return to_csr(X, n_features)
        if not X:
            return sp.csr_matrix((0, n_features or 0))
        X = np.asarray(X, dtype=float)
    if sp.issparse(X):
        return sp.csr_matrix(X, dtype=float)
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise ValueError("feature matrix must be two-dimensional")
    return X


def encode_labels(y: Sequence, classes: Sequence | None = None):
    """Map labels onto indices of ``classes`` (default: sorted distinct labels)."""
    if classes is None:
        classes = sorted(set(y))
    classes = tuple(classes)
    pos = {c: i for i, c in enumerate(classes)}
    try:
        idx = np.array([pos[v] for v in y], dtype=np.int64)
    except KeyError as exc:
        raise TrainingError(f"label {exc.args[0]!r} not in class list {classes}") from None
    return idx, classes


def require_two_classes(idx: np.ndarray, classes):
    if len(np.unique(idx)) < 2:
        raise TrainingError(f"need at least two classes in the training labels, found {sorted({classes[i] for i in idx})}")


def softmax(z: np.ndarray) -> np.ndarray:
    z = z - z.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


def log_softmax(z: np.ndarray) -> np.ndarray:
    z = z - z.max(axis=1, keepdims=True)
    return z - np.log(np.exp(z).sum(axis=1, keepdims=True))


def minibatches(n: int, batch_size: int, rng: np.random.Generator):
    order = rng.permutation(n)
    for start in range(0, n, batch_size):
        yield order[start:start + batch_size]


def predict(model: TrainedModel, X) -> PredictionBatch:
    X = as_matrix(X, model.n_features)
    if X.shape[1] != model.n_features:
        raise ValueError(f"feature dimension {X.shape[1]} does not match model ({model.n_features})")
    scores = model.predict_proba(X)
    best = np.argmax(scores, axis=1) if len(scores) else np.zeros(0, dtype=int)
    return PredictionBatch([model.classes[i] for i in best], scores, model.classes)
