import json

import numpy as np
import pytest

from doccat.errors import SingleClassError
from doccat.features import SparseVector
from doccat.models import (
    LinearModel,
    TrainHyperparams,
    hinge_objective,
    model_to_dict,
    predict_linear,
    train_from_tokens,
    train_sgd,
)


def vec(pairs):
    return SparseVector(entries=tuple(sorted(pairs.items())))


def separable_two_class(n_per_class=10):
    """Two disjoint one-hot features; trivially separable."""
    X, y = [], []
    for i in range(n_per_class):
        X.append(vec({0: 1.0}))
        y.append("neg")
        X.append(vec({1: 1.0}))
        y.append("pos")
    return X, y


class TestTrainSGD:
    def test_separable_data_reaches_full_accuracy(self):
        X, y = separable_two_class()
        model = train_sgd(X, y, TrainHyperparams(), n_features=2)
        correct = sum(predict_linear(model, x)[0] == label for x, label in zip(X, y))
        assert correct == len(y)

    def test_objective_descends_after_first_epoch(self):
        X, y = separable_two_class()
        model = train_sgd(X, y, TrainHyperparams(), n_features=2)
        for label, info in model.fit_info.items():
            assert info["objective_final"] <= info["objective_epoch1"]

    def test_huge_regularization_shrinks_weights(self):
        X, y = separable_two_class()
        hyper = TrainHyperparams(sgd_alpha=1e6, sgd_epochs=5)
        model = train_sgd(X, y, hyper, n_features=2)
        assert np.linalg.norm(model.weights) < 1e-3

    def test_symmetric_problem_mirrors_weights(self):
        # one example per class with identical features: the two one-vs-rest
        # problems are exact mirrors, so weights and biases cancel
        X = [vec({0: 1.0}), vec({0: 1.0})]
        model = train_sgd(X, ["a", "b"], TrainHyperparams(sgd_epochs=10), n_features=1)
        assert model.weights[0] == pytest.approx(-model.weights[1], abs=0.0)
        assert model.biases[0] == pytest.approx(-model.biases[1], abs=0.0)
        _, scores = predict_linear(model, vec({0: 1.0}))
        assert scores["a"] == pytest.approx(-scores["b"], abs=0.0)

    def test_single_class_rejected(self):
        with pytest.raises(SingleClassError):
            train_sgd([vec({0: 1.0}), vec({0: 2.0})], ["c", "c"], TrainHyperparams())

    def test_deterministic_given_seed(self, synth_train_tokens, default_cfg):
        runs = [
            train_from_tokens(
                synth_train_tokens, "tfidf", "sgd", TrainHyperparams(seed=7), default_cfg.digest(),
                created_unix_seconds=0,
            )
            for _ in range(2)
        ]
        payloads = [json.dumps(model_to_dict(m)) for m in runs]
        assert payloads[0] == payloads[1]

    def test_different_seeds_differ(self, synth_train_tokens, default_cfg):
        m1 = train_from_tokens(
            synth_train_tokens, "tfidf", "sgd", TrainHyperparams(seed=1), default_cfg.digest()
        )
        m2 = train_from_tokens(
            synth_train_tokens, "tfidf", "sgd", TrainHyperparams(seed=2), default_cfg.digest()
        )
        assert not np.array_equal(m1.model.weights, m2.model.weights)


class TestPredictLinear:
    def test_sign_check(self):
        model = LinearModel(
            class_labels=("c1", "c2"),
            weights=np.array([[1.0], [-1.0]]),
            biases=np.zeros(2),
            trainer_tag="sgd",
        )
        label, scores = predict_linear(model, vec({0: 1.0}))
        assert label == "c1"
        assert scores == {"c1": 1.0, "c2": -1.0}

    def test_empty_vector_scores_biases(self):
        model = LinearModel(
            class_labels=("a", "b"),
            weights=np.zeros((2, 3)),
            biases=np.array([-1.0, 2.0]),
            trainer_tag="sgd",
        )
        label, scores = predict_linear(model, vec({}))
        assert label == "b"
        assert scores == {"a": -1.0, "b": 2.0}

    def test_all_equal_scores_tie_to_first(self):
        model = LinearModel(
            class_labels=("a", "b", "c"),
            weights=np.zeros((3, 2)),
            biases=np.zeros(3),
            trainer_tag="sgd",
        )
        assert predict_linear(model, vec({0: 5.0}))[0] == "a"

    def test_index_out_of_range(self):
        model = LinearModel(
            class_labels=("a", "b"),
            weights=np.zeros((2, 2)),
            biases=np.zeros(2),
            trainer_tag="sgd",
        )
        with pytest.raises(IndexError):
            predict_linear(model, vec({2: 1.0}))


class TestHingeObjective:
    def test_manual_computation(self):
        X = [vec({0: 1.0}), vec({0: -2.0})]
        targets = [1.0, -1.0]
        w = np.array([0.5])
        # margins: 1*(0.5+0.1)=0.6 -> hinge 0.4; -1*(-1.0+0.1)=0.9 -> hinge 0.1
        expected = 0.5 * 0.1 * 0.25 + (0.4 + 0.1) / 2
        assert hinge_objective(X, targets, w, 0.1, 0.1) == pytest.approx(expected, abs=1e-12)

    def test_zero_loss_beyond_margin(self):
        X = [vec({0: 2.0}), vec({0: -2.0})]
        w = np.array([1.0])
        assert hinge_objective(X, [1.0, -1.0], w, 0.0, 0.0) == 0.0
