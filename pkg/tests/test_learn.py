import numpy as np
import pytest

from reqfuse import learn
from reqfuse.errors import (
    DimMismatch,
    DimZero,
    EmptySpace,
    NonFinite,
    SingleClass,
    UnknownAlgo,
)
from reqfuse.learn import ClassifierSpec, fit, predict, predict_scores, search_hyperparams

from conftest import make_blobs

ALL_SPECS = {
    "KNN": {"k": 3},
    "GNB": {},
    "BNB": {},
    "LOGR": {},
    "LINSVM": {},
    "QDA": {},
    "DT": {"max_depth": 8},
    "RF": {"n_trees": 20, "max_depth": 8},
    "ADABOOST": {"n_rounds": 20},
    "GBOOST": {"n_rounds": 30},
    "MLP": {"hidden": (16,), "epochs": 100},
}


@pytest.fixture(scope="module")
def blobs_xy():
    return make_blobs(n=200, margin=2.0, seed=7)


class TestEveryNativeAlgo:
    @pytest.mark.parametrize("algo", learn.NATIVE_ALGOS)
    def test_blobs_floor(self, algo, blobs_xy):
        X, y = blobs_xy
        model = fit(ClassifierSpec(algo, ALL_SPECS[algo], seed=7), X, y)
        acc = float(np.mean(predict(model, X) == y))
        assert acc >= 0.95, f"{algo} accuracy {acc}"

    @pytest.mark.parametrize("algo", learn.NATIVE_ALGOS)
    def test_deterministic_refit(self, algo, blobs_xy):
        X, y = blobs_xy
        spec = ClassifierSpec(algo, ALL_SPECS[algo], seed=11)
        p1 = predict(fit(spec, X, y), X)
        p2 = predict(fit(spec, X, y), X)
        assert np.array_equal(p1, p2)

    @pytest.mark.parametrize("algo", learn.NATIVE_ALGOS)
    def test_argmax_of_scores_is_predict(self, algo, blobs_xy):
        X, y = blobs_xy
        rng = np.random.default_rng(3)
        grid = rng.uniform(X.min() - 1, X.max() + 1, size=(100, 2))
        model = fit(ClassifierSpec(algo, ALL_SPECS[algo], seed=5), X, y)
        scores = predict_scores(model, grid)
        assert scores.shape == (100, 2)
        assert np.array_equal(model.classes[np.argmax(scores, axis=1)], predict(model, grid))

    @pytest.mark.parametrize("algo", [a for a in learn.NATIVE_ALGOS if a != "LINSVM"])
    def test_probabilistic_scores_sum_to_one(self, algo, blobs_xy):
        X, y = blobs_xy
        model = fit(ClassifierSpec(algo, ALL_SPECS[algo], seed=5), X, y)
        scores = predict_scores(model, X[:25])
        assert np.abs(scores.sum(axis=1) - 1.0).max() <= 1e-6
        assert (scores >= 0).all() and (scores <= 1 + 1e-12).all()


class TestKnn:
    def test_k1_memorizes_training_set(self, blobs_xy):
        X, y = blobs_xy
        model = fit(ClassifierSpec("KNN", {"k": 1}, seed=0), X, y)
        assert np.array_equal(predict(model, X), y)

    def test_distance_tie_prefers_lower_label_index(self):
        X = np.array([[0.0], [2.0]])
        y = np.array(["b_high", "a_low"])
        model = fit(ClassifierSpec("KNN", {"k": 2}), X, y)
        # query at 1.0 is equidistant; vote is tied 1:1 -> lower class index wins
        assert predict(model, np.array([[1.0]]))[0] == "a_low"


class TestGnb:
    def test_decision_threshold_near_midpoint(self):
        rng = np.random.default_rng(2)
        X = np.concatenate([rng.normal(0, 1, 50), rng.normal(10, 1, 50)]).reshape(-1, 1)
        y = np.array(["lo"] * 50 + ["hi"] * 50)
        model = fit(ClassifierSpec("GNB"), X, y)
        grid = np.linspace(0, 10, 2001).reshape(-1, 1)
        preds = predict(model, grid)
        flips = np.nonzero(preds[:-1] != preds[1:])[0]
        assert len(flips) >= 1
        threshold = float(grid[flips[0] + 1][0])
        assert 4.0 <= threshold <= 6.0


class TestLogr:
    def test_separable_blobs(self, blobs_xy):
        X, y = blobs_xy
        model = fit(ClassifierSpec("LOGR"), X, y)
        assert float(np.mean(predict(model, X) == y)) >= 0.99


class TestForest:
    def test_single_tree_equals_dt_without_sampling(self, blobs_xy):
        X, y = blobs_xy
        params = {"max_depth": 6, "min_samples_leaf": 2}
        dt = fit(ClassifierSpec("DT", params, seed=13), X, y)
        rf = fit(
            ClassifierSpec(
                "RF", {**params, "n_trees": 1, "bootstrap": False, "max_features": None}, seed=13
            ),
            X,
            y,
        )
        grid = np.random.default_rng(1).uniform(-3, 10, size=(200, 2))
        assert np.array_equal(predict(dt, grid), predict(rf, grid))
        assert np.array_equal(predict_scores(dt, grid), predict_scores(rf, grid))


class TestAdaBoost:
    def test_threshold_separable_1d_perfect_within_5_rounds(self):
        X = np.concatenate([np.linspace(0, 1, 20), np.linspace(2, 3, 20)]).reshape(-1, 1)
        y = np.array(["a"] * 20 + ["b"] * 20)
        model = fit(ClassifierSpec("ADABOOST", {"n_rounds": 5}), X, y)
        assert np.array_equal(predict(model, X), y)
        assert len(model.impl._stumps) <= 5


class TestGboost:
    def test_train_log_loss_non_increasing(self, blobs_xy):
        X, y = blobs_xy
        model = fit(ClassifierSpec("GBOOST", {"n_rounds": 40}), X, y)
        losses = model.impl.train_log_loss
        assert len(losses) == 40
        assert all(b <= a + 1e-12 for a, b in zip(losses, losses[1:]))


class TestValidationAndErrors:
    def test_single_class_rejected(self):
        X = np.zeros((4, 2))
        with pytest.raises(SingleClass):
            fit(ClassifierSpec("KNN", {"k": 1}), X, np.array(["a"] * 4))

    def test_non_finite_rejected(self):
        X = np.array([[1.0, np.nan], [0.0, 1.0]])
        with pytest.raises(NonFinite):
            fit(ClassifierSpec("GNB"), X, np.array(["a", "b"]))

    def test_zero_dim_rejected(self):
        with pytest.raises(DimZero):
            fit(ClassifierSpec("GNB"), np.zeros((4, 0)), np.array(["a", "b", "a", "b"]))

    def test_predict_dim_mismatch(self, blobs_xy):
        X, y = blobs_xy
        model = fit(ClassifierSpec("GNB"), X, y)
        with pytest.raises(DimMismatch):
            predict(model, np.zeros((3, 5)))

    @pytest.mark.parametrize(
        "algo,params",
        [
            ("KNN", {"k": 0}),
            ("RF", {"n_trees": 0}),
            ("MLP", {"hidden": ()}),
            ("MLP", {"hidden": (0,)}),
            ("GBOOST", {"lr": -1}),
            ("KNN", {"bogus_param": 3}),
        ],
    )
    def test_bad_hyperparams_rejected(self, algo, params, blobs_xy):
        X, y = blobs_xy
        with pytest.raises(ValueError):
            fit(ClassifierSpec(algo, params), X, y)

    def test_unknown_algo(self, blobs_xy):
        X, y = blobs_xy
        with pytest.raises(UnknownAlgo):
            fit(ClassifierSpec("SUPERNET"), X, y)


class TestPlugins:
    def test_plugin_only_algo_names_error(self, blobs_xy):
        X, y = blobs_xy
        with pytest.raises(UnknownAlgo, match="plugin"):
            fit(ClassifierSpec("XGBOOST"), X, y)

    def test_registered_plugin_round_trip(self, blobs_xy):
        class MajorityImpl:
            def __init__(self, hyperparams, seed):
                pass

            def fit(self, X, y_idx, n_classes):
                self._mode = int(np.argmax(np.bincount(y_idx, minlength=n_classes)))
                self._n = n_classes
                return self

            def predict_idx(self, X):
                return np.full(X.shape[0], self._mode)

            def predict_scores(self, X):
                scores = np.zeros((X.shape[0], self._n))
                scores[:, self._mode] = 1.0
                return scores

        learn.register_plugin("majority", MajorityImpl)
        X, y = blobs_xy
        model = fit(ClassifierSpec("MAJORITY"), X, y)
        assert set(predict(model, X)) == {y[0]} or set(predict(model, X)) == {y[-1]}
        assert "MAJORITY" in learn.registered_plugins()


class TestSearch:
    def inner_folds(self, y, k=2):
        folds = np.zeros(len(y), dtype=int)
        for label in np.unique(y):
            rows = np.nonzero(y == label)[0]
            folds[rows] = np.arange(len(rows)) % k
        return folds

    def test_budget_one_returns_single_sample(self, blobs_xy):
        X, y = blobs_xy
        best, trials = search_hyperparams(
            ClassifierSpec("KNN"), {"k": [3]}, budget=1, objective="accuracy",
            X=X, y=y, inner_folds=self.inner_folds(y), seed=0,
        )
        assert len(trials) == 1
        assert best.hyperparams["k"] == 3

    def test_dominant_config_wins(self):
        # 3 points per class: k=101 degenerates to the majority vote, k=1 is perfect
        X = np.array([[0.0], [0.1], [0.2], [5.0], [5.1], [5.2]])
        y = np.array(["a", "a", "a", "b", "b", "b"])
        best, trials = search_hyperparams(
            ClassifierSpec("KNN"), {"k": [1, 101]}, budget=8, objective="accuracy",
            X=X, y=y, inner_folds=self.inner_folds(y, k=3), seed=5,
        )
        assert best.hyperparams["k"] == 1
        sampled = {t["params"]["k"] for t in trials}
        assert sampled == {1, 101}

    def test_same_seed_identical_trials(self, blobs_xy):
        X, y = blobs_xy
        space = {"k": [1, 3, 5, 7], "bogus": None}
        space = {"k": [1, 3, 5, 7]}
        runs = [
            search_hyperparams(
                ClassifierSpec("KNN"), space, budget=5, objective="accuracy",
                X=X, y=y, inner_folds=self.inner_folds(y), seed=42,
            )
            for _ in range(2)
        ]
        assert runs[0][1] == runs[1][1]
        assert runs[0][0] == runs[1][0]

    def test_empty_space(self, blobs_xy):
        X, y = blobs_xy
        with pytest.raises(EmptySpace):
            search_hyperparams(
                ClassifierSpec("KNN"), {}, budget=2, objective="accuracy",
                X=X, y=y, inner_folds=self.inner_folds(y), seed=0,
            )
        with pytest.raises(EmptySpace):
            search_hyperparams(
                ClassifierSpec("KNN"), {"k": []}, budget=2, objective="accuracy",
                X=X, y=y, inner_folds=self.inner_folds(y), seed=0,
            )

    def test_range_sampling_and_f1_objective(self, blobs_xy):
        X, y = blobs_xy
        best, trials = search_hyperparams(
            ClassifierSpec("DT"),
            {"max_depth": {"low": 2, "high": 8, "type": "int"}},
            budget=4,
            objective=f"f1:{y[0]}",
            X=X, y=y, inner_folds=self.inner_folds(y), seed=1,
        )
        assert all(2 <= t["params"]["max_depth"] <= 8 for t in trials)
        assert all(0.0 <= t["objective"] <= 1.0 for t in trials)

    def test_trial_log_csv(self, tmp_path, blobs_xy):
        X, y = blobs_xy
        _, trials = search_hyperparams(
            ClassifierSpec("KNN"), {"k": [1, 3]}, budget=3, objective="accuracy",
            X=X, y=y, inner_folds=self.inner_folds(y), seed=2,
        )
        path = tmp_path / "trials.csv"
        learn.write_trial_log(trials, path)
        lines = path.read_text().strip().splitlines()
        assert lines[0] == "trial,k,objective"
        assert len(lines) == 4
