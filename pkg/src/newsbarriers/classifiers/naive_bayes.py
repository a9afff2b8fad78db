"""Multinomial naive Bayes over raw term counts."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .base import TrainedModel, as_matrix, encode_labels, softmax


@dataclass(kw_only=True)
class NaiveBayesModel(TrainedModel):
    kind: str = field(init=False, default="naive_bayes")
    log_prior: np.ndarray
    log_likelihood: np.ndarray  # classes x features

    def log_joint(self, X):
        return np.asarray(X @ self.log_likelihood.T) + self.log_prior

    def predict_proba(self, X):
        return softmax(self.log_joint(X))

    def parameters(self):
        return {"log_prior": self.log_prior, "log_likelihood": self.log_likelihood}


def train_naive_bayes(X_counts, y, alpha: float = 1.0, classes=None, vocab_fingerprint=None) -> NaiveBayesModel:
    """P(t|c) = (count(t, c) + alpha) / (sum_t count(t, c) + alpha * V)."""
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    X = as_matrix(X_counts)
    idx, classes = encode_labels(y, classes)
    n, d = X.shape
    onehot = np.zeros((n, len(classes)))
    onehot[np.arange(n), idx] = 1.0
    counts = np.asarray(X.T @ onehot).T  # classes x features
    lik = (counts + alpha) / (counts.sum(axis=1, keepdims=True) + alpha * d)
    prior = onehot.sum(axis=0) / n
    with np.errstate(divide="ignore"):
        log_prior = np.log(prior)
    return NaiveBayesModel(classes=classes, n_features=d, vocab_fingerprint=vocab_fingerprint,
                           log_prior=log_prior, log_likelihood=np.log(lik))
