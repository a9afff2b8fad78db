import logging

import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from newsbarriers.classifiers import (Adam, TrainConfig, TrainingError, gini, load_model, model_from_json,
                                      model_to_json, predict, save_model, train_decision_tree, train_knn,
                                      train_logistic, train_mlp, train_naive_bayes)
from newsbarriers.classifiers.base import softmax

SEPARABLE_X = np.array([[1.0, 0.0], [0.9, 0.1], [0.0, 1.0], [0.1, 0.9]])
SEPARABLE_Y = ["A", "A", "B", "B"]


def toy(seed=0, n=60, d=6, c=3):
    rng = np.random.default_rng(seed)
    centers = rng.standard_normal((c, d)) * 2
    y = np.arange(n) % c
    X = centers[y] + rng.standard_normal((n, d)) * 0.5
    return X, y


def every_model(X, y):
    counts = np.abs(np.round(X * 3))
    return {
        "lr": train_logistic(X, y, TrainConfig(epochs=5)),
        "nb": train_naive_bayes(counts, y),
        "knn": train_knn(X, y, k=3),
        "dt": train_decision_tree(X, y),
        "mlp": train_mlp(X, y, TrainConfig(epochs=3, hidden_units=8)),
    }


class TestAdam:
    def test_first_step_is_minus_lr(self):
        p = np.zeros(1)
        Adam([p], lr=1e-3).step([np.ones(1)])
        assert p[0] == pytest.approx(-1e-3, rel=1e-7)


class TestLogistic:
    def test_separating_hyperplane_exists(self):
        # brute-force oracle over a grid of directions and offsets
        angles = np.linspace(0, 2 * np.pi, 360, endpoint=False)
        signs = np.array([1 if c == "A" else -1 for c in SEPARABLE_Y])
        found = any(
            np.all(signs * (SEPARABLE_X @ np.array([np.cos(a), np.sin(a)]) - b) > 0)
            for a in angles for b in np.linspace(-1, 1, 41)
        )
        assert found

    def test_separable_fit(self):
        model = train_logistic(SEPARABLE_X, SEPARABLE_Y, TrainConfig(epochs=10))
        batch = predict(model, SEPARABLE_X)
        assert batch.predicted == SEPARABLE_Y
        assert batch.scores[0, 0] > 0.5

    def test_zero_features_predict_majority(self):
        X = np.zeros((5, 3))
        model = train_logistic(X, ["a", "a", "a", "b", "b"], TrainConfig(epochs=50, batch_size=5))
        assert predict(model, X).predicted == ["a"] * 5

    def test_single_class_fatal(self):
        with pytest.raises(TrainingError, match="two classes"):
            train_logistic(SEPARABLE_X, ["A"] * 4)

    def test_loss_sanity_band(self):
        X, y = toy()
        for model in (train_logistic(X, y, TrainConfig(epochs=10, batch_size=8)),
                      train_mlp(X, y, TrainConfig(epochs=10, batch_size=8))):
            h = model.history
            assert all(b <= 1.1 * a for a, b in zip(h, h[1:]))

    def test_sparse_input_matches_dense(self):
        X, y = toy()
        a = train_logistic(X, y, TrainConfig(epochs=2))
        b = train_logistic(sp.csr_matrix(X), y, TrainConfig(epochs=2))
        np.testing.assert_allclose(a.weights, b.weights, atol=1e-12)


class TestNaiveBayes:
    def test_token_seen_only_in_class(self):
        X = np.array([[2, 0, 1], [0, 3, 1]], dtype=float)
        model = train_naive_bayes(X, ["c1", "c2"])
        assert predict(model, np.array([[0.0, 1.0, 0.0]])).predicted == ["c2"]

    def test_empty_doc_gives_prior(self):
        X = np.array([[1, 0], [1, 0], [0, 1]], dtype=float)
        model = train_naive_bayes(X, ["a", "a", "b"])
        np.testing.assert_allclose(predict(model, np.zeros((1, 2))).scores[0], [2 / 3, 1 / 3], atol=1e-12)

    def test_log_posterior_matches_direct_sum(self):
        rng = np.random.default_rng(3)
        X = rng.integers(0, 4, (20, 7)).astype(float)
        y = rng.integers(0, 3, 20)
        model = train_naive_bayes(X, y, alpha=0.5)
        doc = rng.integers(0, 3, 7).astype(float)
        for c in range(3):
            rows = X[y == c]
            direct = np.log(len(rows) / 20)
            for t in range(7):
                p = (rows[:, t].sum() + 0.5) / (rows.sum() + 0.5 * 7)
                direct += doc[t] * np.log(p)
            assert abs(model.log_joint(doc[None, :])[0, c] - direct) <= 1e-9

    def test_alpha_positive(self):
        with pytest.raises(ValueError):
            train_naive_bayes(np.eye(2), [0, 1], alpha=0)


class TestKNN:
    def test_identical_query(self):
        X, y = toy()
        model = train_knn(X, y, k=1)
        assert predict(model, X[7:8]).predicted == [y[7]]

    def test_global_vote(self):
        X = np.array([[1, 0], [0.9, 0.2], [0.8, 0.1], [0, 1.0]])
        model = train_knn(X, ["a", "a", "a", "b"], k=4)
        assert predict(model, np.array([[0, 1.0], [1, 1.0]])).predicted == ["a", "a"]

    def test_four_point_hand_table(self):
        # unit vectors at 0, 30, 90 and 100 degrees; query at 80 degrees
        ang = np.radians([0, 30, 90, 100])
        X = np.c_[np.cos(ang), np.sin(ang)]
        q = np.array([[np.cos(np.radians(80)), np.sin(np.radians(80))]])
        # distances 1-cos: 80 -> 0.826, 50 -> 0.357, 10 -> 0.015, 20 -> 0.060
        model = train_knn(X, ["x", "y", "x", "y"], k=3)
        # nearest three: x (0.015), y (0.060), y (0.357) -> y by vote
        assert predict(model, q).predicted == ["y"]

    def test_vote_tie_uses_mean_distance(self):
        X = np.array([[1.0, 0.0], [0.0, 1.0]])
        model = train_knn(X, ["a", "b"], k=2)
        batch = predict(model, np.array([[0.2, 1.0]]))
        assert batch.predicted == ["b"]
        assert np.argmax(batch.scores[0]) == 1

    def test_k_clamped(self, caplog):
        with caplog.at_level(logging.WARNING):
            model = train_knn(np.eye(3), [0, 1, 1], k=10)
        assert model.k == 3 and "clamping" in caplog.text

    def test_permutation_invariance(self):
        X, y = toy(seed=4)
        q = np.random.default_rng(1).standard_normal((15, X.shape[1]))
        base = predict(train_knn(X, y, k=5, classes=(0, 1, 2)), q).predicted
        for s in range(5):
            perm = np.random.default_rng(s).permutation(len(y))
            assert predict(train_knn(X[perm], y[perm], k=5, classes=(0, 1, 2)), q).predicted == base


class TestTree:
    def test_pure_is_single_leaf(self):
        model = train_decision_tree(np.random.default_rng(0).random((6, 3)), ["a"] * 6)
        assert model.n_nodes == 1 and model.feature[0] == -1

    def test_gini(self):
        assert gini([2, 2]) == 0.5
        assert gini([4, 0]) == 0.0

    def test_feature_tie_break_lowest_column(self):
        X = np.array([[0, 0], [0, 0], [1, 1], [1, 1]], dtype=float)
        model = train_decision_tree(X, list("aabb"))
        assert model.feature[0] == 0

    def test_splits_strictly_decrease_impurity(self):
        X, y = toy(seed=2, n=90)
        model = train_decision_tree(X, y, max_depth=6, min_leaf=2)
        for node in range(model.n_nodes):
            if model.feature[node] < 0:
                continue
            l, r = model.left[node], model.right[node]
            parent = model.value[node].sum() * gini(model.value[node])
            children = model.value[l].sum() * gini(model.value[l]) + model.value[r].sum() * gini(model.value[r])
            assert children < parent
            assert model.value[l].sum() >= 2 and model.value[r].sum() >= 2

    def test_max_depth(self):
        X, y = toy(seed=2, n=90)
        model = train_decision_tree(X, y, max_depth=1)
        assert model.n_nodes == 3


class TestMLP:
    def test_reproducible_without_dropout(self):
        X, y = toy()
        cfg = TrainConfig(epochs=3, dropout_rate=0.0, seed=9)
        a, b = train_mlp(X, y, cfg), train_mlp(X, y, cfg)
        assert a.history == b.history
        assert all(np.array_equal(p, q) for p, q in zip(a.weights, b.weights))

    def test_architecture(self):
        X, y = toy()
        model = train_mlp(X, y, TrainConfig(epochs=1))
        assert [w.shape for w in model.weights] == [(6, 64), (64, 64), (64, 64), (64, 3)]

    def test_single_class_fatal(self):
        with pytest.raises(TrainingError):
            train_mlp(np.eye(3), [1, 1, 1])

    def test_seed_changes_weights(self):
        X, y = toy()
        a = train_mlp(X, y, TrainConfig(epochs=1, seed=1))
        b = train_mlp(X, y, TrainConfig(epochs=1, seed=2))
        assert not np.array_equal(a.weights[0], b.weights[0])


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-1e3, 1e3), min_size=2, max_size=6))
def test_softmax_normalized(z):
    p = softmax(np.array([z]))
    assert abs(p.sum() - 1.0) <= 1e-6 and np.all(p >= 0)


@pytest.fixture(scope="module")
def models():
    X, y = toy(seed=8)
    return X, every_model(X, y)


class TestPredictContract:
    def test_argmax_and_normalization(self, models):
        X, ms = models
        for name, model in ms.items():
            batch = predict(model, X[:20])
            np.testing.assert_allclose(batch.scores.sum(axis=1), 1.0, atol=1e-6)
            assert [batch.classes[i] for i in np.argmax(batch.scores, axis=1)] == batch.predicted, name

    def test_dimension_mismatch(self, models):
        _, ms = models
        for model in ms.values():
            with pytest.raises(ValueError, match="dimension"):
                predict(model, np.zeros((1, 2)))

    def test_serialization_round_trip(self, models, tmp_path):
        X, ms = models
        for name, model in ms.items():
            text = model_to_json(model)
            assert model_to_json(model_from_json(text)) == text
            save_model(tmp_path / f"{name}.json", model)
            back = load_model(tmp_path / f"{name}.json")
            np.testing.assert_array_equal(predict(back, X).scores, predict(model, X).scores)

    def test_unsupported_file(self):
        with pytest.raises(ValueError):
            model_from_json('{"format": "other", "version": 1}')
