"""From-scratch classifiers sharing one prediction surface."""

from .base import PredictionBatch, TrainConfig, TrainedModel, TrainingError, predict
from .knn import KNNModel, train_knn
from .logistic import LogisticModel, train_logistic
from .mlp import MLPModel, train_mlp
from .naive_bayes import NaiveBayesModel, train_naive_bayes
from .optim import Adam
from .serialize import load_model, model_from_json, model_to_json, save_model
from .tree import DecisionTreeModel, gini, train_decision_tree

MODEL_NAMES = ("lr", "nb", "knn", "dt", "mlp")

__all__ = [
    "Adam", "DecisionTreeModel", "KNNModel", "LogisticModel", "MLPModel", "MODEL_NAMES",
    "NaiveBayesModel", "PredictionBatch", "TrainConfig", "TrainedModel", "TrainingError",
    "gini", "load_model", "model_from_json", "model_to_json", "predict", "save_model",
    "train_decision_tree", "train_knn", "train_logistic", "train_mlp", "train_naive_bayes",
]
