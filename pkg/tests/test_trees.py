import numpy as np
import numpy.testing as npt
import pytest

from omiq.errors import OmiqValidationError
from omiq.trees import DecisionTree, RandomForest, _best_split, _impurity_from_counts


class TestImpurity:
    def test_gini_values(self):
        npt.assert_allclose(
            _impurity_from_counts(np.array([0, 1, 2]), np.array([2, 2, 2]), "gini"),
            [0.0, 0.5, 0.0],
        )

    def test_entropy_values(self):
        # balanced binary split has 1 bit of entropy
        assert _impurity_from_counts(np.array([5]), np.array([10]), "entropy")[0] == 1.0
        assert _impurity_from_counts(np.array([0]), np.array([10]), "entropy")[0] == 0.0


class TestBestSplit:
    def test_perfect_separator(self):
        x = np.array([1.0, 2.0, 3.0, 4.0])
        y = np.array([0, 0, 1, 1])
        gain, thr = _best_split(x, y, "gini")
        assert thr == 2.5
        # parent impurity 0.5 over 4 samples, children pure
        assert gain == pytest.approx(2.0)

    def test_constant_feature(self):
        assert _best_split(np.ones(4), np.array([0, 1, 0, 1]), "gini") is None


class TestDecisionTree:
    def test_memorizes_separable(self):
        rng = np.random.default_rng(0)
        X = rng.standard_normal((50, 3))
        y = (X[:, 1] > 0).astype(int)
        tree = DecisionTree().fit(X, y)
        npt.assert_array_equal(tree.predict(X), y)
        assert np.argmax(tree.importances_) == 1

    def test_max_depth_limits(self):
        rng = np.random.default_rng(1)
        X = rng.standard_normal((100, 2))
        y = rng.integers(0, 2, 100)
        stump = DecisionTree(max_depth=1).fit(X, y)
        assert len(stump._feature) <= 3  # root + two leaves


class TestRandomForest:
    def test_deterministic_per_seed(self):
        rng = np.random.default_rng(2)
        X = rng.standard_normal((60, 5))
        y = (X[:, 0] + 0.3 * rng.standard_normal(60) > 0).astype(int)
        a = RandomForest(n_trees=20, seed=5).fit(X, y)
        b = RandomForest(n_trees=20, seed=5).fit(X, y)
        npt.assert_array_equal(a.predict_proba1(X), b.predict_proba1(X))
        npt.assert_array_equal(a.feature_importances_, b.feature_importances_)

    def test_importances_sum_to_one(self):
        rng = np.random.default_rng(3)
        X = rng.standard_normal((80, 4))
        y = (X[:, 2] > 0).astype(int)
        f = RandomForest(n_trees=15, seed=1).fit(X, y)
        assert f.feature_importances_.sum() == pytest.approx(1.0, abs=1e-12)
        assert np.argmax(f.feature_importances_) == 2

    def test_proba_is_vote_fraction(self):
        rng = np.random.default_rng(4)
        X = rng.standard_normal((40, 2))
        y = (X[:, 0] > 0).astype(int)
        f = RandomForest(n_trees=10, seed=0).fit(X, y)
        probs = f.predict_proba1(X)
        assert np.all((probs * 10) % 1 < 1e-12)  # multiples of 1/n_trees

    def test_single_class_error(self):
        with pytest.raises(OmiqValidationError):
            RandomForest(n_trees=3).fit(np.ones((4, 2)), np.zeros(4, dtype=int))

    def test_accuracy_on_separable(self):
        rng = np.random.default_rng(5)
        X = rng.standard_normal((200, 6))
        y = (X[:, 3] > 0).astype(int)
        f = RandomForest(n_trees=50, criterion="entropy", seed=9).fit(X, y)
        assert np.mean(f.predict(X) == y) > 0.95
