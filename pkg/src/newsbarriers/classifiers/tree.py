"""CART decision tree with Gini impurity."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .base import TrainedModel, as_matrix, encode_labels

MIN_GAIN = 1e-12


def gini(counts) -> float:
    counts = np.asarray(counts, dtype=float)
    n = counts.sum()
    if n == 0:
        return 0.0
    p = counts / n
    return float(1.0 - np.sum(p * p))


@dataclass(kw_only=True)
class DecisionTreeModel(TrainedModel):
    """Nodes are stored in flat arrays; leaves have ``feature == -1``.

    Samples with ``x[feature] <= threshold`` go to the left child.
    """

    kind: str = field(init=False, default="decision_tree")
    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray  # node x classes, class distribution of training samples

    @property
    def n_nodes(self) -> int:
        return len(self.feature)

    def apply(self, X) -> np.ndarray:
        X = X.toarray() if sp.issparse(X) else np.asarray(X)
        out = np.empty(X.shape[0], dtype=np.int64)
        for i, row in enumerate(X):
            node = 0
            while self.feature[node] >= 0:
                node = self.left[node] if row[self.feature[node]] <= self.threshold[node] else self.right[node]
            out[i] = node
        return out

    def predict_proba(self, X):
        counts = self.value[self.apply(X)]
        return counts / counts.sum(axis=1, keepdims=True)

    def parameters(self):
        return {"feature": self.feature, "threshold": self.threshold, "left": self.left,
                "right": self.right, "value": self.value}


def best_split(X: np.ndarray, y: np.ndarray, n_classes: int, min_leaf: int):
    """Lowest weighted child Gini split of the rows ``X``.

    Returns ``(feature, threshold, child_impurity_sum)`` or ``None``.  Ties go
    to the lowest feature index, then the lowest threshold.
    """
    n, d = X.shape
    if n < 2 * min_leaf:
        return None
    order = np.argsort(X, axis=0, kind="stable")
    xs = np.take_along_axis(X, order, axis=0)
    ys = y[order]
    # left side holds the first i samples, i = 1..n-1
    left = np.stack([np.cumsum(ys == c, axis=0)[:-1] for c in range(n_classes)], axis=-1).astype(float)
    total = np.bincount(y, minlength=n_classes).astype(float)
    right = total - left
    n_left = np.arange(1, n, dtype=float)[:, None]
    n_right = n - n_left
    # n_side * gini(side) = n_side - sum(count^2) / n_side
    impurity = (n_left - (left ** 2).sum(-1) / n_left) + (n_right - (right ** 2).sum(-1) / n_right)
    valid = xs[1:] > xs[:-1]
    sizes_ok = (n_left >= min_leaf) & (n_right >= min_leaf)
    impurity = np.where(valid & sizes_ok, impurity, np.inf)
    flat = impurity.T.ravel()  # feature-major, so argmin prefers low features then low thresholds
    pos = int(np.argmin(flat))
    if not np.isfinite(flat[pos]):
        return None
    feat, i = divmod(pos, n - 1)
    thr = (xs[i, feat] + xs[i + 1, feat]) / 2.0
    return int(feat), float(thr), float(flat[pos])


def train_decision_tree(X, y, max_depth: int = 20, min_leaf: int = 2, classes=None,
                        vocab_fingerprint=None) -> DecisionTreeModel:
    X = as_matrix(X)
    dense = X.toarray() if sp.issparse(X) else np.asarray(X)
    idx, classes = encode_labels(y, classes)
    n_cls = len(classes)
    feature, threshold, left, right, value = [], [], [], [], []

    def new_node(rows):
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        value.append(np.bincount(idx[rows], minlength=n_cls).astype(float))
        return len(feature) - 1

    root = new_node(np.arange(len(idx)))
    stack = [(root, np.arange(len(idx)), 0)]
    while stack:
        node, rows, depth = stack.pop()
        counts = value[node]
        parent = len(rows) * gini(counts)
        if depth >= max_depth or parent <= MIN_GAIN:
            continue
        split = best_split(dense[rows], idx[rows], n_cls, min_leaf)
        if split is None or parent - split[2] <= MIN_GAIN:
            continue
        feat, thr, _ = split
        mask = dense[rows, feat] <= thr
        feature[node], threshold[node] = feat, thr
        left_rows, right_rows = rows[mask], rows[~mask]
        left[node] = new_node(left_rows)
        right[node] = new_node(right_rows)
        stack.append((right[node], right_rows, depth + 1))
        stack.append((left[node], left_rows, depth + 1))

    return DecisionTreeModel(
        classes=classes,
        n_features=dense.shape[1],
        vocab_fingerprint=vocab_fingerprint,
        feature=np.array(feature, dtype=np.int64),
        threshold=np.array(threshold),
        left=np.array(left, dtype=np.int64),
        right=np.array(right, dtype=np.int64),
        value=np.array(value).reshape(len(feature), n_cls),
    )
