"""Classical reference classifiers with a shared estimator interface.

All three expose fit / predict / predict_proba and standardize features
with training statistics internally, so they accept the same raw inputs
as the hybrid model.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator

from omiq.trees import RandomForest
from omiq.validation import check_both_classes, check_fitted, check_matrix


def _sigmoid(z):
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


class _StandardizingEstimator(BaseEstimator):
    def _fit_scaler(self, X):
        self.mean_ = X.mean(axis=0)
        sd = X.std(axis=0, ddof=0)
        self.sd_ = np.where(sd > 0, sd, 1.0)
        return (X - self.mean_) / self.sd_

    def _scale(self, X):
        return (X - self.mean_) / self.sd_

    def predict(self, X):
        return (self.predict_proba(X)[:, 1] >= 0.5).astype(int)


class LogisticRegressionBaseline(_StandardizingEstimator):
    """L2-penalized logistic regression trained by full-batch gradient descent.

    Objective: mean log-loss + (1 / C) * ||w||^2 / (2 * n_samples); the
    intercept is not penalized. Training stops when the gradient norm
    falls below `tol` or after `max_iter` steps.
    """

    def __init__(self, C=0.1, learning_rate=0.1, max_iter=5000, tol=1e-6):
        self.C = C
        self.learning_rate = learning_rate
        self.max_iter = max_iter
        self.tol = tol

    def fit(self, X, y):
        X = check_matrix(X)
        y = check_both_classes(y)
        xs = self._fit_scaler(X)
        n, p = xs.shape
        w = np.zeros(p)
        b = 0.0
        for _ in range(self.max_iter):
            probs = _sigmoid(xs @ w + b)
            gw = xs.T @ (probs - y) / n + w / (self.C * n)
            gb = float(np.mean(probs - y))
            if np.sqrt(np.sum(gw * gw) + gb * gb) < self.tol:
                break
            w -= self.learning_rate * gw
            b -= self.learning_rate * gb
        self.coef_ = w
        self.intercept_ = b
        return self

    def predict_proba(self, X):
        check_fitted(self, "coef_")
        X = check_matrix(X, n_cols=self.coef_.size)
        p1 = _sigmoid(self._scale(X) @ self.coef_ + self.intercept_)
        return np.column_stack([1.0 - p1, p1])


class MlpBaseline(_StandardizingEstimator):
    """One ReLU hidden layer, sigmoid output, minibatch Adam on cross-entropy."""

    def __init__(self, hidden_width=64, learning_rate=0.01, batch_size=16,
                 epochs=200, seed=0):
        self.hidden_width = hidden_width
        self.learning_rate = learning_rate
        self.batch_size = batch_size
        self.epochs = epochs
        self.seed = seed

    def fit(self, X, y):
        X = check_matrix(X)
        y = check_both_classes(y).astype(float)
        xs = self._fit_scaler(X)
        n, p = xs.shape
        rng = np.random.default_rng(self.seed)
        w1 = rng.uniform(-1, 1, size=(self.hidden_width, p)) / np.sqrt(p)
        b1 = np.zeros(self.hidden_width)
        w2 = rng.uniform(-1, 1, size=self.hidden_width) / np.sqrt(self.hidden_width)
        b2 = 0.0
        m = [np.zeros_like(w1), np.zeros_like(b1), np.zeros_like(w2), 0.0]
        v = [np.zeros_like(w1), np.zeros_like(b1), np.zeros_like(w2), 0.0]
        t = 0
        beta1, beta2, eps = 0.9, 0.999, 1e-8
        for _ in range(self.epochs):
            order = rng.permutation(n)
            for start in range(0, n, self.batch_size):
                rows = order[start : start + self.batch_size]
                xb, yb = xs[rows], y[rows]
                pre = xb @ w1.T + b1
                h = np.maximum(pre, 0.0)
                prob = _sigmoid(h @ w2 + b2)
                dlogit = (prob - yb) / rows.size
                gw2 = h.T @ dlogit
                gb2 = float(dlogit.sum())
                dpre = (dlogit[:, None] * w2[None, :]) * (pre > 0)
                gw1 = dpre.T @ xb
                gb1 = dpre.sum(axis=0)
                t += 1
                grads = [gw1, gb1, gw2, gb2]
                vals = [w1, b1, w2, b2]
                for i in range(4):
                    m[i] = beta1 * m[i] + (1 - beta1) * grads[i]
                    v[i] = beta2 * v[i] + (1 - beta2) * (
                        grads[i] * grads[i] if i < 3 else grads[i] ** 2
                    )
                    m_hat = m[i] / (1 - beta1**t)
                    v_hat = v[i] / (1 - beta2**t)
                    vals[i] = vals[i] - self.learning_rate * m_hat / (
                        np.sqrt(v_hat) + eps
                    )
                w1, b1, w2, b2 = vals
        self.w1_, self.b1_, self.w2_, self.b2_ = w1, b1, w2, b2
        return self

    def predict_proba(self, X):
        check_fitted(self, "w1_")
        X = check_matrix(X, n_cols=self.w1_.shape[1])
        h = np.maximum(self._scale(X) @ self.w1_.T + self.b1_, 0.0)
        p1 = _sigmoid(h @ self.w2_ + self.b2_)
        return np.column_stack([1.0 - p1, p1])


class RandomForestBaseline(BaseEstimator):
    """Entropy-criterion random forest; probabilities are tree vote fractions."""

    def __init__(self, n_trees=250, criterion="entropy", max_depth=None, seed=0):
        self.n_trees = n_trees
        self.criterion = criterion
        self.max_depth = max_depth
        self.seed = seed

    def fit(self, X, y):
        X = check_matrix(X)
        y = check_both_classes(y)
        self.forest_ = RandomForest(
            n_trees=self.n_trees,
            criterion=self.criterion,
            max_depth=self.max_depth,
            seed=self.seed,
        ).fit(X, y)
        self.n_features_ = X.shape[1]
        return self

    def predict_proba(self, X):
        check_fitted(self, "forest_")
        X = check_matrix(X, n_cols=self.n_features_)
        p1 = self.forest_.predict_proba1(X)
        return np.column_stack([1.0 - p1, p1])

    def predict(self, X):
        return (self.predict_proba(X)[:, 1] >= 0.5).astype(int)

    @property
    def feature_importances_(self):
        check_fitted(self, "forest_")
        return self.forest_.feature_importances_
