"""Feed-forward network: ReLU hidden layers, softmax output, Adam."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..seeding import substream
from .base import (TrainConfig, TrainedModel, as_matrix, encode_labels, log_softmax, minibatches,
                   require_two_classes, softmax)
from .optim import Adam


@dataclass(kw_only=True)
class MLPModel(TrainedModel):
    kind: str = field(init=False, default="mlp")
    weights: list
    biases: list
    history: list = field(default_factory=list)

    def predict_proba(self, X):
        return softmax(forward(self.weights, self.biases, X)[0])

    def parameters(self):
        out = {}
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            out[f"W{i}"] = w
            out[f"b{i}"] = b
        return out


def init_params(sizes, rng: np.random.Generator):
    """He-normal weights, zero biases."""
    weights = [rng.standard_normal((a, b)) * np.sqrt(2.0 / a) for a, b in zip(sizes[:-1], sizes[1:])]
    biases = [np.zeros(b) for b in sizes[1:]]
    return weights, biases


def forward(weights, biases, X, masks=None):
    """Return output logits and the cached hidden activations.

    ``masks`` holds one (already rescaled) dropout multiplier per hidden layer.
    """
    acts = [X]
    h = X
    for i, (w, b) in enumerate(zip(weights[:-1], biases[:-1])):
        z = np.asarray(h @ w) + b
        h = np.maximum(z, 0.0)
        if masks is not None:
            h = h * masks[i]
        acts.append(h)
    logits = np.asarray(h @ weights[-1]) + biases[-1]
    return logits, acts


def loss_and_grads(weights, biases, X, y, masks=None):
    """Mean cross-entropy over the batch and gradients for every layer."""
    n = X.shape[0]
    logits, acts = forward(weights, biases, X, masks)
    logp = log_softmax(logits)
    loss = -logp[np.arange(n), y].mean()
    delta = np.exp(logp)
    delta[np.arange(n), y] -= 1.0
    delta /= n
    gw = [None] * len(weights)
    gb = [None] * len(biases)
    for layer in range(len(weights) - 1, -1, -1):
        a = acts[layer]
        gw[layer] = np.asarray(a.T @ delta)
        gb[layer] = delta.sum(axis=0)
        if layer == 0:
            break
        delta = delta @ weights[layer].T
        if masks is not None:
            delta = delta * masks[layer - 1]
        # masked activation > 0 iff pre-activation > 0 and the unit was kept
        delta = np.where(acts[layer] > 0, delta, 0.0)
    return loss, gw, gb


def dropout_masks(rng, n, sizes, rate):
    if rate <= 0:
        return None
    keep = 1.0 - rate
    return [(rng.random((n, s)) < keep) / keep for s in sizes]


def train_mlp(X, y, config: TrainConfig = TrainConfig(), classes=None, vocab_fingerprint=None) -> MLPModel:
    X = as_matrix(X)
    idx, classes = encode_labels(y, classes)
    require_two_classes(idx, classes)
    n, d = X.shape
    hidden = [config.hidden_units] * config.hidden_layers
    weights, biases = init_params([d, *hidden, len(classes)], substream(config.seed, "init"))
    opt = Adam(weights + biases, config.learning_rate, config.beta1, config.beta2, config.eps)
    shuffle = substream(config.seed, "shuffle")
    drop = substream(config.seed, "dropout")
    history = []
    for _ in range(config.epochs):
        losses = []
        for batch in minibatches(n, config.batch_size, shuffle):
            masks = dropout_masks(drop, len(batch), hidden, config.dropout_rate)
            loss, gw, gb = loss_and_grads(weights, biases, X[batch], idx[batch], masks)
            opt.step(gw + gb)
            losses.append(loss)
        history.append(float(np.mean(losses)))
    return MLPModel(classes=classes, n_features=d, vocab_fingerprint=vocab_fingerprint,
                    weights=weights, biases=biases, history=history)
