"""Decision trees and bagged forests for binary classification.

Built for determinism: every tree draws its bootstrap sample and split
features from a generator spawned off the forest seed, so a fixed seed
always yields the same forest regardless of call order.

Split search is vectorized per candidate feature: sort once, then score
every threshold from class-count cumulative sums in one pass.
"""

from __future__ import annotations

import numpy as np

from omiq.errors import OmiqValidationError
from omiq.validation import check_both_classes, check_matrix

CRITERIA = ("gini", "entropy")


def _impurity_from_counts(n1, n, criterion):
    """Vectorized impurity given positive-class counts n1 out of n."""
    n = np.asarray(n, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        p = np.where(n > 0, n1 / n, 0.0)
    if criterion == "gini":
        return 2.0 * p * (1.0 - p)
    q = 1.0 - p
    ent = np.zeros_like(p)
    mask = (p > 0) & (p < 1)
    ent[mask] = -(p[mask] * np.log2(p[mask]) + q[mask] * np.log2(q[mask]))
    return ent


def _best_split(x, y, criterion):
    """Best threshold for one feature. Returns (score, threshold) or None.

    Score is the impurity decrease n*i(parent) - nL*i(L) - nR*i(R) in
    sample counts (unnormalized); the forest normalizes at the end.
    """
    order = np.argsort(x, kind="stable")
    xs, ys = x[order], y[order]
    n = xs.size
    # candidate split points: between distinct consecutive values
    boundary = np.nonzero(xs[1:] > xs[:-1])[0]  # split after index b
    if boundary.size == 0:
        return None
    cum1 = np.cumsum(ys)
    total1 = cum1[-1]
    n_left = boundary + 1
    n_right = n - n_left
    left1 = cum1[boundary]
    right1 = total1 - left1
    parent = n * _impurity_from_counts(np.array([total1]), np.array([n]), criterion)[0]
    child = n_left * _impurity_from_counts(left1, n_left, criterion) + (
        n_right * _impurity_from_counts(right1, n_right, criterion)
    )
    gains = parent - child
    best = int(np.argmax(gains))
    if gains[best] <= 0:
        return None
    b = boundary[best]
    threshold = 0.5 * (xs[b] + xs[b + 1])
    return float(gains[best]), threshold


class DecisionTree:
    """CART-style binary classification tree (axis-aligned thresholds)."""

    def __init__(self, criterion="gini", max_depth=None, min_samples_split=2,
                 max_features=None):
        if criterion not in CRITERIA:
            raise OmiqValidationError(f"unknown criterion {criterion!r}")
        self.criterion = criterion
        self.max_depth = max_depth
        self.min_samples_split = min_samples_split
        self.max_features = max_features

    def fit(self, X, y, rng=None):
        X = check_matrix(X)
        y = np.asarray(y, dtype=int)
        rng = rng or np.random.default_rng(0)
        n, p = X.shape
        self.n_features_ = p
        self.importances_ = np.zeros(p)
        # flat node storage: feature, threshold, left, right, prob1
        self._feature, self._threshold = [], []
        self._left, self._right, self._prob = [], [], []
        self._grow(X, y, np.arange(n), 0, rng)
        return self

    def _n_split_features(self):
        if self.max_features is None:
            return self.n_features_
        if self.max_features == "sqrt":
            return max(1, int(np.sqrt(self.n_features_)))
        return min(int(self.max_features), self.n_features_)

    def _add_node(self):
        for lst in (self._feature, self._threshold, self._left, self._right, self._prob):
            lst.append(-1)
        return len(self._feature) - 1

    def _grow(self, X, y, idx, depth, rng):
        node = self._add_node()
        ys = y[idx]
        self._prob[node] = float(ys.mean()) if idx.size else 0.0
        if (
            idx.size < self.min_samples_split
            or (self.max_depth is not None and depth >= self.max_depth)
            or ys.min() == ys.max()
        ):
            return node
        k = self._n_split_features()
        feats = rng.choice(self.n_features_, size=k, replace=False) if k < self.n_features_ else np.arange(self.n_features_)
        best = None
        for f in np.sort(feats):
            res = _best_split(X[idx, f], ys, self.criterion)
            if res is not None and (best is None or res[0] > best[0]):
                best = (res[0], int(f), res[1])
        if best is None:
            return node
        gain, f, thr = best
        self.importances_[f] += gain
        go_left = X[idx, f] < thr
        self._feature[node] = f
        self._threshold[node] = thr
        self._left[node] = self._grow(X, y, idx[go_left], depth + 1, rng)
        self._right[node] = self._grow(X, y, idx[~go_left], depth + 1, rng)
        return node

    def predict_proba1(self, X):
        """Positive-class leaf frequency per row."""
        X = check_matrix(X, n_cols=self.n_features_)
        return self._proba_checked(X)

    def _proba_checked(self, X):
        # level-synchronous traversal: advance every unsettled row one edge
        feature = np.asarray(self._feature)
        threshold = np.asarray(self._threshold, dtype=float)
        left = np.asarray(self._left)
        right = np.asarray(self._right)
        prob = np.asarray(self._prob, dtype=float)
        nodes = np.zeros(X.shape[0], dtype=int)
        pending = np.nonzero(feature[nodes] >= 0)[0]
        while pending.size:
            cur = nodes[pending]
            go_left = X[pending, feature[cur]] < threshold[cur]
            nodes[pending] = np.where(go_left, left[cur], right[cur])
            pending = pending[feature[nodes[pending]] >= 0]
        return prob[nodes]

    def predict(self, X):
        return (self.predict_proba1(X) >= 0.5).astype(int)


class RandomForest:
    """Bagged trees with per-split feature subsampling and vote-fraction output."""

    def __init__(self, n_trees=100, criterion="gini", max_depth=None,
                 max_features="sqrt", seed=0):
        self.n_trees = n_trees
        self.criterion = criterion
        self.max_depth = max_depth
        self.max_features = max_features
        self.seed = seed

    def fit(self, X, y):
        X = check_matrix(X)
        y = check_both_classes(y)
        n = X.shape[0]
        self.trees_ = []
        importances = np.zeros(X.shape[1])
        for ss in np.random.SeedSequence(self.seed).spawn(self.n_trees):
            rng = np.random.default_rng(ss)
            rows = rng.integers(0, n, size=n)
            tree = DecisionTree(
                criterion=self.criterion,
                max_depth=self.max_depth,
                max_features=self.max_features,
            ).fit(X[rows], y[rows], rng=rng)
            self.trees_.append(tree)
            importances += tree.importances_
        importances /= self.n_trees
        total = importances.sum()
        self.feature_importances_ = importances / total if total > 0 else importances
        return self

    def predict_proba1(self, X):
        """Fraction of trees voting for class 1."""
        X = check_matrix(X, n_cols=self.trees_[0].n_features_)
        votes = np.zeros(X.shape[0])
        for tree in self.trees_:
            votes += tree._proba_checked(X) >= 0.5
        return votes / len(self.trees_)

    def predict(self, X):
        return (self.predict_proba1(X) >= 0.5).astype(int)
