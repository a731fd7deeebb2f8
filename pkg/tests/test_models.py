"""Tests for the six from-scratch classifiers.

Each model is checked for determinism under a fixed seed, basic learning
ability on constructed data, and its specific numerical contract: logreg
and MLP against finite-difference gradients, KNN against a brute-force
neighbor search, GNB against a closed-form Gaussian posterior oracle,
the forest against hand-derived Gini splits, and the SVM against its
margin convention.  Serialization round trips must reproduce scores bit
for bit.
"""

import json
import math

import numpy as np
import pytest

from readmit.errors import ConfigError, DimensionError, SchemaError, \
    TrainingDivergedError
from readmit.models import (
    Dataset,
    load_model,
    predict_labels,
    predict_scores,
    save_model,
    train_model,
)
from readmit.models.forest import TreeNode, train_rf, tree_vote
from readmit.models.gnb import train_gnb
from readmit.models.gradcheck import central_difference, gradient_check
from readmit.models.knn import train_knn
from readmit.models.logreg import (
    loss_and_grad,
    logreg_top_features,
    sigmoid,
    train_logreg,
)
from readmit.models.mlp import MlpSpec, train_mlp
from readmit.models.svm import train_svm


def _separable(seed=0, n=60, d=4):
    """Linearly separable data with margin, labels from the first axis."""
    rng = np.random.default_rng(seed)
    features = rng.normal(size=(n, d))
    features[:, 0] += np.where(features[:, 0] > 0, 1.0, -1.0)
    labels = (features[:, 0] > 0).astype(int)
    return Dataset(features=features, labels=labels)


def _rings(seed=5, n=80):
    """Two concentric rings; not linearly separable."""
    rng = np.random.default_rng(seed)
    radius = np.concatenate([rng.uniform(0.0, 1.0, n // 2),
                             rng.uniform(2.0, 3.0, n // 2)])
    angle = rng.uniform(0, 2 * np.pi, n)
    features = np.stack([radius * np.cos(angle),
                         radius * np.sin(angle)], axis=1)
    labels = np.concatenate([np.zeros(n // 2, int), np.ones(n // 2, int)])
    return Dataset(features=features, labels=labels)


class TestDataset:
    """Input validation on the shared feature/label carrier."""

    def test_accepts_lists(self):
        data = Dataset(features=[[1.0, 2.0], [3.0, 4.0]], labels=[0, 1])
        assert data.n_rows == 2 and data.n_features == 2
        assert data.labels.dtype == int

    def test_rejects_bad_shapes(self):
        with pytest.raises(DimensionError):
            Dataset(features=np.zeros(3), labels=[0, 0, 0])
        with pytest.raises(DimensionError):
            Dataset(features=np.zeros((3, 2)), labels=[0, 1])

    def test_rejects_bad_values(self):
        with pytest.raises(ConfigError):
            Dataset(features=[[np.nan, 1.0]], labels=[0])
        with pytest.raises(ConfigError):
            Dataset(features=[[1.0]], labels=[2])
        with pytest.raises(ConfigError):
            Dataset(features=np.zeros((0, 2)), labels=np.zeros(0, int))


class TestSigmoid:
    """Numerically stable logistic function."""

    def test_extreme_inputs_saturate_without_overflow(self):
        z = np.array([-1000.0, -40.0, 0.0, 40.0, 1000.0])
        s = sigmoid(z)
        assert np.all(np.isfinite(s))
        assert s[0] == 0.0 or s[0] < 1e-300
        assert s[2] == 0.5
        assert s[4] == 1.0 or s[4] > 1.0 - 1e-16

    def test_symmetry(self):
        rng = np.random.default_rng(7)
        z = rng.uniform(-30, 30, size=1000)
        np.testing.assert_allclose(sigmoid(z) + sigmoid(-z), 1.0, atol=1e-12)


class TestLogreg:
    """Full-batch gradient descent on binary cross entropy."""

    def test_learns_separable_data(self):
        data = _separable()
        model = train_logreg(data, learning_rate=0.5, epochs=300)
        accuracy = (predict_labels(model, data.features) == data.labels).mean()
        assert accuracy >= 0.95
        scores = predict_scores(model, data.features)
        assert np.all((scores > 0) & (scores < 1))

    def test_deterministic(self):
        data = _separable(seed=1)
        a = train_logreg(data, learning_rate=0.1, epochs=50)
        b = train_logreg(data, learning_rate=0.1, epochs=50)
        np.testing.assert_array_equal(a.weights, b.weights)
        assert a.bias == b.bias

    def test_gradient_matches_central_difference(self):
        rng = np.random.default_rng(139)
        for _ in range(5):
            n, d = int(rng.integers(3, 12)), int(rng.integers(1, 6))
            features = rng.normal(size=(n, d))
            labels = rng.integers(0, 2, size=n).astype(float)
            weights = rng.normal(size=d)
            bias = float(rng.normal())
            l2 = 1e-3
            _, grad_w, grad_b = loss_and_grad(weights, bias, features,
                                              labels, l2)

            def loss_fn(packed):
                value, _, _ = loss_and_grad(packed[:-1], float(packed[-1]),
                                            features, labels, l2)
                return value

            packed = np.concatenate([weights, [bias]])
            numeric = central_difference(loss_fn, packed, h=1e-6)
            analytic = np.concatenate([grad_w, [grad_b]])
            np.testing.assert_allclose(analytic, numeric, atol=1e-6)

    def test_l2_shrinks_weights(self):
        data = _separable(seed=2)
        loose = train_logreg(data, learning_rate=0.5, epochs=200, l2=0.0)
        tight = train_logreg(data, learning_rate=0.5, epochs=200, l2=1.0)
        assert np.linalg.norm(tight.weights) < np.linalg.norm(loose.weights)

    def test_bias_not_regularized(self):
        """With all-positive labels and zero features, the bias grows
        freely while weights stay put."""
        data = Dataset(features=np.zeros((8, 2)), labels=np.ones(8, int))
        model = train_logreg(data, learning_rate=1.0, epochs=100, l2=10.0)
        np.testing.assert_array_equal(model.weights, 0.0)
        assert model.bias > 1.0

    def test_divergence_raises(self):
        data = _separable(seed=3)
        with np.errstate(over="ignore", invalid="ignore"):
            with pytest.raises(TrainingDivergedError):
                train_logreg(data, learning_rate=1e200, epochs=5)

    def test_hyperparameter_validation(self):
        data = _separable()
        with pytest.raises(ConfigError):
            train_logreg(data, learning_rate=0.0)
        with pytest.raises(ConfigError):
            train_logreg(data, epochs=0)
        with pytest.raises(ConfigError):
            train_logreg(data, l2=-1.0)


class TestLogregTopFeatures:
    """Weight-ranked vocabulary terms for model inspection."""

    def _model_with_weights(self, weights):
        data = Dataset(features=np.zeros((2, len(weights))), labels=[0, 1])
        model = train_logreg(data, epochs=1)
        return type(model)(weights=np.array(weights, dtype=float),
                           bias=0.0, learning_rate=0.1, epochs=1,
                           l2=1e-4, train_seed=0)

    def test_ranking_both_sides(self):
        model = self._model_with_weights([3.0, -2.0, 0.5, -4.0])
        vocabulary = {"up": 0, "down": 1, "mid": 2, "worst": 3}
        positive, negative = logreg_top_features(model, vocabulary, top_n=2)
        assert [t for t, _ in positive] == ["up", "mid"]
        assert positive[0][1] == pytest.approx(3.0)
        assert [t for t, _ in negative] == ["worst", "down"]
        assert negative[0][1] == pytest.approx(-4.0)

    def test_weight_ties_break_by_term(self):
        model = self._model_with_weights([1.0, 1.0])
        positive, _ = logreg_top_features(model, {"beta": 0, "alfa": 1},
                                          top_n=2)
        assert [t for t, _ in positive] == ["alfa", "beta"]

    def test_vocabulary_size_must_match(self):
        model = self._model_with_weights([1.0, 2.0])
        with pytest.raises(ConfigError):
            logreg_top_features(model, {"only": 0}, top_n=1)


class TestKnn:
    """Neighbor-fraction scores against a brute-force oracle."""

    def test_k_one_memorizes(self):
        data = _separable(seed=4, n=30)
        model = train_knn(data, k=1)
        np.testing.assert_array_equal(
            predict_scores(model, data.features), data.labels.astype(float))

    def test_matches_brute_force(self):
        rng = np.random.default_rng(149)
        for _ in range(20):
            n = int(rng.integers(5, 40))
            d = int(rng.integers(1, 5))
            k = int(rng.integers(1, n + 1))
            train = rng.normal(size=(n, d))
            labels = rng.integers(0, 2, size=n)
            model = train_knn(Dataset(features=train, labels=labels), k=k)
            queries = rng.normal(size=(6, d))
            scores = predict_scores(model, queries)
            for qi, query in enumerate(queries):
                dists = [(float(np.sum((row - query) ** 2)), i)
                         for i, row in enumerate(train)]
                dists.sort()  # squared distance, then training index
                picked = [labels[i] for _, i in dists[:k]]
                assert scores[qi] == pytest.approx(sum(picked) / k)

    def test_distance_tie_prefers_earlier_row(self):
        train = np.array([[1.0], [1.0], [5.0]])
        model = train_knn(Dataset(features=train, labels=[1, 0, 0]), k=1)
        assert predict_scores(model, np.array([[1.0]])) == pytest.approx(1.0)

    def test_k_bounds(self):
        data = _separable(n=10)
        with pytest.raises(ConfigError):
            train_knn(data, k=0)
        with pytest.raises(ConfigError):
            train_knn(data, k=11)

    def test_training_data_copied(self):
        features = np.ones((4, 2))
        data = Dataset(features=features, labels=[0, 1, 0, 1])
        model = train_knn(data, k=2)
        data.features[0, 0] = 99.0
        assert model.train_features[0, 0] == 1.0


class TestGnb:
    """Gaussian naive Bayes against a closed-form oracle."""

    def _oracle_scores(self, train_x, train_y, queries, var_smoothing):
        """Posterior P(y=1|x) from first principles with scalar math."""
        n = len(train_y)
        floor = var_smoothing * float(np.var(train_x, axis=0).max())
        if floor <= 0.0:
            floor = var_smoothing
        stats = {}
        for c in (0, 1):
            rows = train_x[train_y == c]
            stats[c] = (len(rows) / n, rows.mean(axis=0),
                        np.maximum(rows.var(axis=0), floor))
        out = []
        for x in queries:
            logs = {}
            for c in (0, 1):
                prior, mu, var = stats[c]
                log_like = sum(
                    -0.5 * (math.log(2 * math.pi * var[j])
                            + (x[j] - mu[j]) ** 2 / var[j])
                    for j in range(len(x)))
                logs[c] = math.log(prior) + log_like
            peak = max(logs.values())
            total = sum(math.exp(v - peak) for v in logs.values())
            out.append(math.exp(logs[1] - peak) / total)
        return np.array(out)

    def test_matches_oracle(self):
        rng = np.random.default_rng(151)
        for _ in range(20):
            n = int(rng.integers(6, 50))
            d = int(rng.integers(1, 6))
            features = rng.normal(size=(n, d)) * rng.uniform(0.5, 3.0)
            labels = rng.integers(0, 2, size=n)
            if labels.sum() in (0, n):
                continue
            model = train_gnb(Dataset(features=features, labels=labels),
                              var_smoothing=1e-9)
            queries = rng.normal(size=(5, d))
            got = predict_scores(model, queries)
            expected = self._oracle_scores(features, labels, queries, 1e-9)
            np.testing.assert_allclose(got, expected, atol=1e-12)
            assert np.all((got >= 0) & (got <= 1))

    def test_constant_feature_survives(self):
        """The variance floor prevents division by zero."""
        features = np.array([[1.0, 0.0], [1.0, 1.0], [1.0, 5.0], [1.0, 6.0]])
        model = train_gnb(Dataset(features=features, labels=[0, 0, 1, 1]))
        scores = predict_scores(model, features)
        assert np.all(np.isfinite(scores))
        assert scores[0] < 0.5 < scores[3]

    def test_all_constant_features_survive(self):
        features = np.ones((4, 2))
        model = train_gnb(Dataset(features=features, labels=[0, 0, 1, 1]))
        scores = predict_scores(model, features)
        np.testing.assert_allclose(scores, 0.5, atol=1e-12)

    def test_missing_class_rejected(self):
        with pytest.raises(ConfigError, match="class 1 absent"):
            train_gnb(Dataset(features=np.zeros((3, 2)), labels=[0, 0, 0]))

    def test_negative_smoothing_rejected(self):
        with pytest.raises(ConfigError):
            train_gnb(_separable(), var_smoothing=-1e-9)


class TestForest:
    """Bootstrap forest of Gini-split trees."""

    def test_deterministic_per_seed(self):
        data = _separable(seed=6, n=50)
        a = train_rf(data, n_trees=12, seed=9)
        b = train_rf(data, n_trees=12, seed=9)
        np.testing.assert_array_equal(predict_scores(a, data.features),
                                      predict_scores(b, data.features))

    def test_seed_changes_trees(self):
        data = _separable(seed=6, n=50)
        a = train_rf(data, n_trees=12, seed=9)
        b = train_rf(data, n_trees=12, seed=10)
        assert a.trees != b.trees

    def test_memorizes_without_bootstrap(self):
        data = _rings(seed=8, n=60)
        model = train_rf(data, n_trees=5, max_depth=16, min_leaf=1,
                         bootstrap=False, seed=0)
        np.testing.assert_array_equal(predict_labels(model, data.features),
                                      data.labels)

    def test_learns_separable_data(self):
        data = _separable(seed=7, n=80)
        model = train_rf(data, n_trees=30, seed=3)
        accuracy = (predict_labels(model, data.features) == data.labels).mean()
        assert accuracy >= 0.95

    def test_scores_are_vote_fractions(self):
        data = _separable(seed=9, n=40)
        model = train_rf(data, n_trees=8, seed=1)
        scores = predict_scores(model, data.features)
        np.testing.assert_allclose(scores * 8, np.round(scores * 8),
                                   atol=1e-12)

    def test_single_feature_split_point(self):
        """One feature, clean separation: every tree thresholds between
        the two value groups."""
        features = np.array([[0.0], [1.0], [10.0], [11.0]])
        data = Dataset(features=features, labels=[0, 0, 1, 1])
        model = train_rf(data, n_trees=10, min_leaf=1, bootstrap=False,
                         seed=2)
        # The split threshold is the 5.5 midpoint, so query past it
        queries = np.array([[-5.0], [6.0], [20.0]])
        np.testing.assert_array_equal(predict_labels(model, queries),
                                      [0, 1, 1])

    def test_tree_vote_walks_thresholds(self):
        leaf0 = TreeNode(feature=-1, threshold=0.0, left=None, right=None,
                         prediction=0)
        leaf1 = TreeNode(feature=-1, threshold=0.0, left=None, right=None,
                         prediction=1)
        root = TreeNode(feature=0, threshold=2.0, left=leaf0, right=leaf1,
                        prediction=0)
        assert tree_vote(root, np.array([2.0])) == 0  # <= goes left
        assert tree_vote(root, np.array([2.1])) == 1

    def test_hyperparameter_validation(self):
        data = _separable()
        with pytest.raises(ConfigError):
            train_rf(data, n_trees=0)
        with pytest.raises(ConfigError):
            train_rf(data, max_depth=0)
        with pytest.raises(ConfigError):
            train_rf(data, min_leaf=0)


class TestSvm:
    """Pegasos-style linear SVM with raw-margin scores."""

    def test_learns_separable_data(self):
        data = _separable(seed=11, n=80)
        model = train_svm(data, lam=1e-3, epochs=40, seed=0)
        accuracy = (predict_labels(model, data.features) == data.labels).mean()
        assert accuracy >= 0.95

    def test_scores_are_signed_margins(self):
        data = _separable(seed=12)
        model = train_svm(data, lam=1e-3, epochs=30, seed=0)
        scores = predict_scores(model, data.features)
        assert scores.min() < 0 < scores.max()
        np.testing.assert_array_equal(predict_labels(model, data.features),
                                      (scores >= 0).astype(int))

    def test_deterministic_per_seed(self):
        data = _separable(seed=13)
        a = train_svm(data, seed=4)
        b = train_svm(data, seed=4)
        np.testing.assert_array_equal(a.weights, b.weights)
        assert a.bias == b.bias

    def test_lambda_validation(self):
        with pytest.raises(ConfigError):
            train_svm(_separable(), lam=0.0)


class TestMlp:
    """Backprop network with ReLU hidden layers."""

    def test_learns_nonlinear_rings(self):
        data = _rings()
        model = train_mlp(data, MlpSpec(layer_sizes=[2, 16, 1],
                                        learning_rate=0.5, epochs=300,
                                        batch_size=16, seed=1))
        accuracy = (predict_labels(model, data.features) == data.labels).mean()
        assert accuracy >= 0.95

    def test_deterministic_per_seed(self):
        data = _rings(seed=6, n=40)
        spec = MlpSpec(layer_sizes=[2, 8, 1], learning_rate=0.1, epochs=20,
                       batch_size=10, seed=3)
        a = train_mlp(data, spec)
        b = train_mlp(data, spec)
        for wa, wb in zip(a.weights, b.weights):
            np.testing.assert_array_equal(wa, wb)
        for ba, bb in zip(a.biases, b.biases):
            np.testing.assert_array_equal(ba, bb)

    def test_scores_are_probabilities(self):
        data = _rings(seed=9, n=40)
        model = train_mlp(data, MlpSpec(layer_sizes=[2, 8, 1], epochs=30,
                                        seed=0))
        scores = predict_scores(model, data.features)
        assert np.all((scores > 0) & (scores < 1))

    def test_divergence_raises(self):
        data = _rings(seed=10, n=30)
        spec = MlpSpec(layer_sizes=[2, 8, 1], learning_rate=1e200,
                       epochs=5, batch_size=30, seed=0)
        with np.errstate(over="ignore", invalid="ignore"):
            with pytest.raises(TrainingDivergedError):
                train_mlp(data, spec)

    def test_spec_validation(self):
        with pytest.raises(ConfigError):
            MlpSpec(layer_sizes=[4])
        with pytest.raises(ConfigError):
            MlpSpec(layer_sizes=[4, 3, 2])  # output layer must be 1
        with pytest.raises(ConfigError):
            MlpSpec(layer_sizes=[4, 0, 1])
        with pytest.raises(ConfigError):
            MlpSpec(layer_sizes=[4, 3, 1], learning_rate=0.0)
        with pytest.raises(ConfigError):
            MlpSpec(layer_sizes=[4, 3, 1], batch_size=0)

    def test_input_width_checked(self):
        data = _rings(seed=11, n=20)
        with pytest.raises(ConfigError):
            train_mlp(data, MlpSpec(layer_sizes=[5, 4, 1], epochs=1))


class TestGradientCheckHarness:
    """The finite-difference harness itself, on a known quadratic."""

    def test_central_difference_on_quadratic(self):
        """loss = 0.5 * ||p||^2 has gradient exactly p."""
        rng = np.random.default_rng(157)
        params = rng.normal(size=12)
        numeric = central_difference(
            lambda p: 0.5 * float(p @ p), params, h=1e-5)
        np.testing.assert_allclose(numeric, params, atol=1e-9)

    def test_logreg_and_mlp_checks_pass(self):
        rng = np.random.default_rng(163)
        features = rng.normal(size=(12, 4))
        labels = rng.integers(0, 2, size=12).astype(float)
        assert gradient_check("LOGREG", features, labels, n_draws=3) < 1e-4
        assert gradient_check("MLP", features, labels, n_draws=3) < 1e-4

    def test_unknown_kind_rejected(self):
        with pytest.raises(ConfigError):
            gradient_check("KNN", np.zeros((3, 2)), np.zeros(3))


class TestTrainDispatch:
    """String-kind dispatch used by the CLI."""

    @pytest.mark.parametrize("kind", ["LOGREG", "KNN", "GNB", "RF", "SVM",
                                      "MLP"])
    def test_all_kinds_train_and_score(self, kind):
        data = _separable(seed=17, n=40)
        hyper = {"epochs": 10} if kind in ("LOGREG", "SVM", "MLP") else {}
        if kind == "RF":
            hyper = {"n_trees": 5}
        model = train_model(kind, data, seed=0, **hyper)
        assert model.kind == kind
        scores = predict_scores(model, data.features)
        assert scores.shape == (40,)
        labels = predict_labels(model, data.features)
        assert set(np.unique(labels)) <= {0, 1}

    def test_kind_case_insensitive(self):
        model = train_model("logreg", _separable(n=20), epochs=5)
        assert model.kind == "LOGREG"

    def test_unknown_kind(self):
        with pytest.raises(ConfigError, match="unknown model kind"):
            train_model("DECISION_STUMP", _separable())


class TestModelSerialization:
    """JSON round trips reproduce scores bit for bit."""

    @pytest.mark.parametrize("kind", ["LOGREG", "KNN", "GNB", "RF", "SVM",
                                      "MLP"])
    def test_round_trip(self, kind, tmp_path):
        data = _separable(seed=19, n=30)
        hyper = {"epochs": 8} if kind in ("LOGREG", "SVM", "MLP") else {}
        if kind == "RF":
            hyper = {"n_trees": 4}
        model = train_model(kind, data, seed=2, **hyper)
        path = tmp_path / f"{kind.lower()}.json"
        save_model(model, path)
        loaded = load_model(path)
        assert loaded.kind == kind
        np.testing.assert_array_equal(predict_scores(loaded, data.features),
                                      predict_scores(model, data.features))

    def test_saved_payload_shape(self, tmp_path):
        model = train_model("LOGREG", _separable(n=20), epochs=5)
        path = tmp_path / "model.json"
        save_model(model, path)
        payload = json.loads(path.read_text())
        assert payload["format_version"] == 1
        assert payload["kind"] == "LOGREG"
        assert "hyperparameters" in payload and "parameters" in payload

    def test_version_mismatch_rejected(self, tmp_path):
        model = train_model("LOGREG", _separable(n=20), epochs=5)
        path = tmp_path / "model.json"
        save_model(model, path)
        payload = json.loads(path.read_text())
        payload["format_version"] = 99
        path.write_text(json.dumps(payload))
        with pytest.raises(SchemaError):
            load_model(path)

    def test_saved_file_is_stable(self, tmp_path):
        """Training and saving twice yields byte-identical files."""
        data = _separable(seed=23, n=30)
        paths = []
        for name in ("a.json", "b.json"):
            model = train_model("MLP", data, seed=5, epochs=10, hidden=[4])
            path = tmp_path / name
            save_model(model, path)
            paths.append(path)
        assert paths[0].read_bytes() == paths[1].read_bytes()
