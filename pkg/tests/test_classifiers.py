"""Tests for the three line classifiers and the model file format."""

import io
import math
from unittest.mock import patch

import numpy as np
import pytest

from src.docstruct.classifiers import (
    DecisionTree,
    best_split,
    gini_impurity,
    gini_index,
    load_model,
    load_model_file,
    model_from_dict,
    model_to_dict,
    predict,
    predict_batch,
    resolve_kind,
    save_model,
    save_model_file,
    train,
)
from src.docstruct.classifiers.decision_tree import MIN_GAIN
from src.docstruct.models.dataset import LabeledDataset
from src.docstruct.utils.error_handler import ContractError, ModelFormatError, UsageError


def _ds(X, y, alphabet=None):
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=np.int64)
    alphabet = alphabet or tuple(sorted({int(v) for v in y}))
    return LabeledDataset(X=X, y=y, class_alphabet=alphabet)


def _clusters(centers, per_class=20, spread=0.3, seed=0):
    rng = np.random.default_rng(seed)
    X = np.vstack([rng.normal(center, spread, size=(per_class, len(center))) for center in centers])
    y = np.repeat(np.arange(len(centers)), per_class)
    return _ds(X, y)


def _brute_force_split(X, y, n_classes, min_samples_leaf):
    """Exhaustive reference for best_split with the same tie rules."""
    totals = np.bincount(y, minlength=n_classes)
    parent = int(np.dot(totals, totals)) / len(y)
    best = None
    for feature in range(X.shape[1]):
        values = sorted(set(X[:, feature]))
        for low, high in zip(values, values[1:]):
            threshold = (low + high) / 2.0
            left = X[:, feature] <= threshold
            n_left, n_right = int(left.sum()), int((~left).sum())
            if n_left < min_samples_leaf or n_right < min_samples_leaf:
                continue
            lc = np.bincount(y[left], minlength=n_classes)
            rc = np.bincount(y[~left], minlength=n_classes)
            score = int(np.dot(lc, lc)) / n_left + int(np.dot(rc, rc)) / n_right
            if best is None or score > best[2]:
                best = (feature, threshold, score)
    if best is None or best[2] - parent <= MIN_GAIN:
        return None
    return best


class TestGini:
    """Test cases for gini purity."""

    def test_uniform_binary(self):
        """Test (0.5, 0.5)."""
        assert gini_index([0.5, 0.5]) == pytest.approx(0.5)
        assert gini_impurity([0.5, 0.5]) == pytest.approx(0.5)

    def test_skewed_binary(self):
        """Test (0.8, 0.2)."""
        assert gini_index([0.8, 0.2]) == pytest.approx(0.68)

    def test_pure_node(self):
        """Test that a pure node has purity 1."""
        assert gini_index([0.0, 1.0, 0.0]) == 1.0

    @pytest.mark.parametrize("fractions", [[0.5, 0.6], [-0.1, 1.1], []])
    def test_not_a_distribution(self, fractions):
        """Test that non-distributions are rejected."""
        with pytest.raises(ContractError):
            gini_index(fractions)


class TestBestSplit:
    """Test cases for split search."""

    def test_separating_feature_is_found(self):
        """Test twelve points separable only on feature 6."""
        rows = np.arange(12)
        X = np.zeros((12, 8))
        for j in range(8):
            X[:, j] = (rows * j) % 5
        X[:, 6] = rows + np.where(rows >= 6, 4, 0)
        y = (rows >= 6).astype(np.int64)

        split = best_split(X, y, 2)
        assert split.feature == 6
        assert split.threshold == pytest.approx(7.5)
        assert split.score == pytest.approx(12.0)
        assert split.gain == pytest.approx(6.0)

    @pytest.mark.parametrize("seed", [0, 1, 2, 3, 4])
    def test_matches_exhaustive_search(self, seed):
        """Test against an exhaustive search on small integer data with ties."""
        rng = np.random.default_rng(seed)
        X = rng.integers(0, 5, size=(20, 4)).astype(float)
        y = rng.integers(0, 3, size=20)
        for min_leaf in (1, 3):
            expected = _brute_force_split(X, y, 3, min_leaf)
            split = best_split(X, y, 3, min_leaf)
            if expected is None:
                assert split is None
            else:
                assert (split.feature, split.threshold, split.score) == expected

    def test_pure_node_has_no_split(self):
        """Test that nothing improves a single-class node."""
        X = np.arange(10, dtype=float).reshape(-1, 1)
        assert best_split(X, np.zeros(10, dtype=np.int64), 2) is None

    def test_leaf_size_blocks_split(self):
        """Test that min_samples_leaf larger than half the rows prevents any split."""
        X = np.arange(6, dtype=float).reshape(-1, 1)
        y = np.array([0, 0, 0, 1, 1, 1])
        assert best_split(X, y, 2, min_samples_leaf=4) is None


class TestDecisionTree:
    """Test cases for the decision tree classifier."""

    def test_learns_threshold(self):
        """Test a one-feature threshold concept."""
        X = np.arange(20, dtype=float).reshape(-1, 1)
        y = (X[:, 0] > 9).astype(np.int64)
        model = train("dt", _ds(X, y), {"min_samples_leaf": 1})
        labels, _ = predict_batch(model, X)
        np.testing.assert_array_equal(labels, y)
        assert model.estimator.node_count == 3

    def test_max_depth_zero_is_a_prior(self):
        """Test that depth 0 predicts the majority class everywhere."""
        X = np.arange(10, dtype=float).reshape(-1, 1)
        y = np.array([0] * 7 + [1] * 3)
        model = train("dt", _ds(X, y), {"max_depth": 0})
        label, scores = predict(model, np.array([9.0]))
        assert label == 0
        np.testing.assert_allclose(scores, [0.7, 0.3])

    def test_params_round_trip(self):
        """Test that a tree rebuilt from its params predicts identically."""
        ds = _clusters([(0.0, 0.0), (3.0, 3.0)])
        model = train("dt", ds, {"min_samples_leaf": 2})
        rebuilt = DecisionTree.from_params(model.estimator.to_params())
        np.testing.assert_array_equal(rebuilt.apply(ds.X), model.estimator.apply(ds.X))


class TestNaiveBayes:
    """Test cases for multinomial Naive Bayes."""

    def test_hand_computed_posterior(self):
        """Test log-posteriors against a hand-worked three-record corpus."""
        model = train("nb", _ds([[2, 0], [1, 1], [0, 3]], [0, 0, 1]), {"alpha": 1.0})
        label, scores = predict(model, np.array([1.0, 1.0]))
        assert label == 0
        assert scores[0] == pytest.approx(math.log(75 / 102), abs=1e-9)
        assert scores[1] == pytest.approx(math.log(27 / 102), abs=1e-9)

    def test_tie_goes_to_lower_class(self):
        """Test that a symmetric query picks the first class."""
        model = train("nb", _ds([[1, 0], [0, 1]], [0, 1]))
        label, scores = predict(model, np.array([1.0, 1.0]))
        assert scores[0] == scores[1]
        assert label == 0

    def test_negative_features_rejected(self):
        """Test that counts must be non-negative."""
        with pytest.raises(ContractError):
            train("nb", _ds([[-1.0], [1.0]], [0, 1]))


class TestLinearSVM:
    """Test cases for the Pegasos linear SVM."""

    def test_separable_binary(self):
        """Test two well separated clusters."""
        ds = _clusters([(-3.0, -3.0), (3.0, 3.0)])
        model = train("svm", ds, {"epochs": 20}, seed=0)
        labels, scores = predict_batch(model, ds.X)
        np.testing.assert_array_equal(labels, ds.y)
        assert scores.shape == (len(ds), 2)

    def test_one_vs_rest(self):
        """Test three separable clusters."""
        ds = _clusters([(6.0, 0.0), (-6.0, 0.0), (0.0, 6.0)])
        model = train("svm", ds, {"epochs": 30}, seed=1)
        labels, _ = predict_batch(model, ds.X)
        assert np.mean(labels == ds.y) >= 0.9

    def test_seed_determinism(self):
        """Test identical weights for identical seeds."""
        ds = _clusters([(-1.0, 0.0), (1.0, 0.0)], spread=1.0)
        a = train("svm", ds, {"epochs": 3}, seed=5)
        b = train("svm", ds, {"epochs": 3}, seed=5)
        np.testing.assert_array_equal(a.estimator.weights_, b.estimator.weights_)


class TestTrainContract:
    """Test cases for training preconditions."""

    def test_empty_dataset(self):
        """Test that training needs records."""
        with pytest.raises(ContractError):
            train("nb", _ds(np.zeros((0, 2)), [], alphabet=(0, 1)))

    def test_single_class(self):
        """Test that training needs two classes."""
        with pytest.raises(ContractError):
            train("dt", _ds([[1.0], [2.0]], [1, 1], alphabet=(0, 1)))

    def test_non_finite_value_names_record(self):
        """Test that NaN features are reported with their record id."""
        ds = LabeledDataset(
            X=np.array([[1.0], [np.nan]]),
            y=np.array([0, 1]),
            class_alphabet=(0, 1),
            record_ids=("d:0", "d:1"),
        )
        with pytest.raises(ContractError, match="d:1"):
            train("svm", ds)

    def test_unknown_kind(self):
        """Test kind resolution."""
        assert resolve_kind("nb") == "naive_bayes"
        assert resolve_kind("linear_svm") == "linear_svm"
        with pytest.raises(ContractError):
            resolve_kind("forest")

    def test_training_is_logged(self):
        """Test that a trained model is announced."""
        with patch("src.docstruct.classifiers.model.logger") as mock_logger:
            train("nb", _ds([[1.0], [2.0]], [0, 1]))
        mock_logger.info.assert_called_once()

    def test_wrong_dimension_at_prediction(self):
        """Test that vectors must match the training dimension."""
        model = train("nb", _ds([[1.0, 0.0], [0.0, 1.0]], [0, 1]))
        with pytest.raises(ContractError):
            predict(model, np.array([1.0]))
        with pytest.raises(ContractError):
            predict(model, np.ones((2, 2)))


class TestModelFile:
    """Test cases for the binary model container."""

    @pytest.mark.parametrize("kind", ["nb", "dt", "svm"])
    def test_reloaded_model_predicts_identically(self, kind):
        """Test save then load for every classifier kind."""
        ds = _clusters([(2.0, 2.0), (5.0, 5.0), (2.0, 7.0)])
        model = train(kind, ds, {"epochs": 5} if kind == "svm" else None, seed=2)
        sink = io.BytesIO()
        save_model(model, sink)
        reloaded = load_model(io.BytesIO(sink.getvalue()))
        assert reloaded.kind == model.kind
        assert reloaded.class_alphabet == model.class_alphabet
        np.testing.assert_allclose(reloaded.scores(ds.X), model.scores(ds.X))

    def _bytes(self):
        sink = io.BytesIO()
        save_model(train("nb", _ds([[1.0], [2.0]], [0, 1])), sink)
        return sink.getvalue()

    def test_magic_and_version(self):
        """Test the fixed header fields."""
        data = self._bytes()
        assert data[:8] == b"DSMODEL\x00"
        assert data[8] == 1

    def test_truncated_file(self):
        """Test that a cut body is rejected."""
        with pytest.raises(ModelFormatError):
            load_model(io.BytesIO(self._bytes()[:-5]))

    def test_short_header(self):
        """Test that a file shorter than its header is rejected."""
        with pytest.raises(ModelFormatError):
            load_model(io.BytesIO(b"DSMO"))

    def test_newer_version(self):
        """Test that a newer format version is a version error."""
        data = bytearray(self._bytes())
        data[8] = 2
        with pytest.raises(ModelFormatError) as excinfo:
            load_model(io.BytesIO(bytes(data)))
        assert excinfo.value.error_code == "VERSION_ERROR"

    def test_foreign_magic(self):
        """Test that another container type is rejected."""
        data = b"DSTOPIC\x00" + self._bytes()[8:]
        with pytest.raises(ModelFormatError):
            load_model(io.BytesIO(data))

    def test_incomplete_body(self):
        """Test that a body without params is a format error."""
        body = model_to_dict(train("nb", _ds([[1.0], [2.0]], [0, 1])))
        del body["params"]
        with pytest.raises(ModelFormatError):
            model_from_dict(body)

    def test_file_helpers(self, tmp_path):
        """Test writing to a nested path and the missing-file error."""
        model = train("nb", _ds([[1.0], [2.0]], [0, 1]))
        path = tmp_path / "models" / "line.model"
        save_model_file(model, path)
        assert load_model_file(path).kind == "naive_bayes"
        with pytest.raises(UsageError):
            load_model_file(tmp_path / "absent.model")
