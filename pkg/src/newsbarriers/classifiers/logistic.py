"""Multinomial logistic (softmax) regression trained with Adam."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..seeding import substream
from .base import (TrainConfig, TrainedModel, as_matrix, encode_labels, log_softmax, minibatches,
                   require_two_classes, softmax)
from .optim import Adam


@dataclass(kw_only=True)
class LogisticModel(TrainedModel):
    kind: str = field(init=False, default="logistic")
    weights: np.ndarray
    bias: np.ndarray
    history: list = field(default_factory=list)

    def predict_proba(self, X):
        return softmax(np.asarray(X @ self.weights) + self.bias)

    def parameters(self):
        return {"weights": self.weights, "bias": self.bias}


def loss_and_grad(weights, bias, X, y, l2=0.0):
    """Mean cross-entropy plus ``l2/2 * ||weights||^2`` and its gradients."""
    n = X.shape[0]
    logits = np.asarray(X @ weights) + bias
    logp = log_softmax(logits)
    loss = -logp[np.arange(n), y].mean() + 0.5 * l2 * np.sum(weights * weights)
    delta = np.exp(logp)
    delta[np.arange(n), y] -= 1.0
    delta /= n
    grad_w = np.asarray(X.T @ delta) + l2 * weights
    grad_b = delta.sum(axis=0)
    return loss, grad_w, grad_b


def train_logistic(X, y, config: TrainConfig = TrainConfig(), classes=None, vocab_fingerprint=None) -> LogisticModel:
    X = as_matrix(X)
    idx, classes = encode_labels(y, classes)
    require_two_classes(idx, classes)
    n, d = X.shape
    W = np.zeros((d, len(classes)))
    b = np.zeros(len(classes))
    opt = Adam([W, b], config.learning_rate, config.beta1, config.beta2, config.eps)
    rng = substream(config.seed, "shuffle")
    history = []
    for _ in range(config.epochs):
        losses = []
        for batch in minibatches(n, config.batch_size, rng):
            loss, gw, gb = loss_and_grad(W, b, X[batch], idx[batch], config.l2)
            opt.step([gw, gb])
            losses.append(loss)
        history.append(float(np.mean(losses)))
    return LogisticModel(classes=classes, n_features=d, vocab_fingerprint=vocab_fingerprint,
                         weights=W, bias=b, history=history)
