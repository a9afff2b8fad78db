"""k-nearest neighbours under cosine distance."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .base import TrainedModel, as_matrix, encode_labels

log = logging.getLogger(__name__)

# added to the winning class when vote ties are settled by mean distance,
# so the scores' argmax still names the prediction
TIE_NUDGE = 1e-9


def _unit_rows(X):
    if sp.issparse(X):
        norms = np.sqrt(np.asarray(X.multiply(X).sum(axis=1)).ravel())
        inv = np.divide(1.0, norms, out=np.zeros_like(norms), where=norms > 0)
        return sp.csr_matrix(sp.diags(inv) @ X)
    norms = np.linalg.norm(X, axis=1)
    inv = np.divide(1.0, norms, out=np.zeros_like(norms), where=norms > 0)
    return X * inv[:, None]


def cosine_distances(A, B) -> np.ndarray:
    """1 - cosine similarity; zero vectors have similarity 0 to everything."""
    sim = _unit_rows(A) @ _unit_rows(B).T
    sim = sim.toarray() if sp.issparse(sim) else np.asarray(sim)
    return 1.0 - sim


@dataclass(kw_only=True)
class KNNModel(TrainedModel):
    kind: str = field(init=False, default="knn")
    k: int
    train_X: object
    train_y: np.ndarray

    def vote(self, distances: np.ndarray):
        """Return (winning class index, vote fractions) for one row of distances."""
        n_cls = len(self.classes)
        # ties in distance are ordered by class so row order cannot matter
        order = np.lexsort((self.train_y, distances))[: self.k]
        labels = self.train_y[order]
        votes = np.bincount(labels, minlength=n_cls).astype(float)
        top = np.flatnonzero(votes == votes.max())
        winner = top[0]
        if len(top) > 1:
            means = [distances[order][labels == c].mean() for c in top]
            winner = top[int(np.argmin(means))]
        scores = votes / self.k
        if winner != top[0]:
            scores[winner] += TIE_NUDGE
            scores /= scores.sum()
        return int(winner), scores

    def predict_proba(self, X):
        D = cosine_distances(X, self.train_X)
        return np.array([self.vote(row)[1] for row in D]).reshape(len(D), len(self.classes))

    def parameters(self):
        X = sp.csr_matrix(self.train_X)
        return {"k": self.k, "indptr": X.indptr, "indices": X.indices, "data": X.data,
                "shape": list(X.shape), "labels": self.train_y}


def train_knn(X, y, k: int = 5, classes=None, vocab_fingerprint=None) -> KNNModel:
    if k < 1:
        raise ValueError("k must be >= 1")
    X = as_matrix(X)
    idx, classes = encode_labels(y, classes)
    if k > X.shape[0]:
        log.warning("k=%d exceeds training size %d; clamping", k, X.shape[0])
        k = X.shape[0]
    return KNNModel(classes=classes, n_features=X.shape[1], vocab_fingerprint=vocab_fingerprint,
                    k=k, train_X=X, train_y=idx)
