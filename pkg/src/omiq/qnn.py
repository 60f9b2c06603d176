"""Hybrid quantum-classical classifier.

Forward pass: amplitude-encode the input, apply `depth` ansatz layers
(per-qubit Rot, then a linear CZ chain), read out per-qubit <Z>, feed a
ReLU dense layer of `dense_width` units, then a scalar affine output and
a sigmoid. Loss is clamped binary cross-entropy; training is minibatch
Adam.

Gradients: dense-head parameters by reverse-mode chain rule; circuit
angles by the parameter-shift rule d<Z>/da = [f(a+pi/2) - f(a-pi/2)] / 2
(exact for the Ry/Rz generators), chained with the head gradient. All
shifted circuits for a minibatch are evolved in one batched statevector
pass, with one row per (sample, angle, shift direction).
"""

from __future__ import annotations

import copy
import json
from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator

from omiq.errors import OmiqValidationError
from omiq.omics import train_test_split
from omiq.simulator import _batch_encode, _batch_expval_z, _batch_run_circuit
from omiq.validation import check_both_classes, check_fitted, check_matrix

CLAMP_EPS = 1e-7


@dataclass(frozen=True)
class QnnConfig:
    n_features: int
    depth: int = 5
    dense_width: int = 32
    seed: int = 0
    learning_rate: float = 0.01
    batch_size: int = 16
    epochs: int = 100

    def __post_init__(self):
        n = self.n_features
        if n < 2 or n & (n - 1):
            raise OmiqValidationError("n_features must be a power of two >= 2")
        if self.depth < 1 or self.dense_width < 1:
            raise OmiqValidationError("depth and dense_width must be >= 1")

    @property
    def n_qubits(self):
        return self.n_features.bit_length() - 1


# Circuit configurations for the three published model sizes.
QNN_PRESETS = {
    "qnn256": QnnConfig(n_features=256, depth=5, dense_width=256),
    "qnn64": QnnConfig(n_features=64, depth=5, dense_width=64),
    "qnn32": QnnConfig(n_features=32, depth=5, dense_width=32),
}


@dataclass
class TrainHistory:
    train_loss: list[float] = field(default_factory=list)
    train_acc: list[float] = field(default_factory=list)
    val_loss: list[float] = field(default_factory=list)
    val_acc: list[float] = field(default_factory=list)


def init_params(cfg):
    """Angles uniform on [-pi, pi); dense weights symmetric / sqrt(fan_in)."""
    rng = np.random.default_rng(cfg.seed)
    nq = cfg.n_qubits
    return {
        "angles": rng.uniform(-np.pi, np.pi, size=(cfg.depth, nq, 3)),
        "w1": rng.uniform(-1.0, 1.0, size=(cfg.dense_width, nq)) / np.sqrt(nq),
        "b1": np.zeros(cfg.dense_width),
        "w2": rng.uniform(-1.0, 1.0, size=cfg.dense_width) / np.sqrt(cfg.dense_width),
        "b2": np.zeros(()),
    }


def _circuit_z(cfg, params, X):
    """(B, n_qubits) per-qubit <Z> after encoding and the full ansatz."""
    amps, nq = _batch_encode(X)
    if nq != cfg.n_qubits:
        raise OmiqValidationError(
            f"input width {X.shape[1]} does not match {cfg.n_features} features"
        )
    angles = np.broadcast_to(
        params["angles"], (X.shape[0],) + params["angles"].shape
    )
    _batch_run_circuit(amps, nq, angles)
    return _batch_expval_z(amps, nq)


def _head(params, z):
    """Dense head. Returns (pre-activation, hidden, logit, probability)."""
    pre = z @ params["w1"].T + params["b1"]
    h = np.maximum(pre, 0.0)
    logit = h @ params["w2"] + float(params["b2"])
    prob = 1.0 / (1.0 + np.exp(-logit))
    return pre, h, logit, prob


def forward_batch(cfg, params, X):
    X = check_matrix(X, n_cols=cfg.n_features)
    z = _circuit_z(cfg, params, X)
    return _head(params, z)[3]


def forward(cfg, params, x):
    """Probability in (0, 1) for a single raw feature vector."""
    return float(forward_batch(cfg, params, np.asarray(x, dtype=float)[None, :])[0])


def bce_loss(preds, labels):
    """Mean binary cross-entropy with predictions clamped to [eps, 1-eps]."""
    preds = np.asarray(preds, dtype=float)
    labels = np.asarray(labels, dtype=float)
    if preds.shape != labels.shape:
        raise OmiqValidationError("predictions and labels differ in length")
    p = np.clip(preds, CLAMP_EPS, 1.0 - CLAMP_EPS)
    return float(-np.mean(labels * np.log(p) + (1.0 - labels) * np.log(1.0 - p)))


def gradients(cfg, params, X, y):
    """Loss gradients for one minibatch, same shapes as the parameters."""
    X = check_matrix(X, n_cols=cfg.n_features)
    y = np.asarray(y, dtype=float)
    if X.shape[0] == 0:
        raise OmiqValidationError("empty batch")
    B = X.shape[0]
    nq = cfg.n_qubits

    amps0, _ = _batch_encode(X)
    base_angles = np.broadcast_to(params["angles"], (B,) + params["angles"].shape)
    z = _batch_expval_z(_batch_run_circuit(amps0.copy(), nq, base_angles), nq)
    pre, h, logit, prob = _head(params, z)

    # clamped BCE: zero gradient where the prediction sits outside the clamp
    inside = (prob > CLAMP_EPS) & (prob < 1.0 - CLAMP_EPS)
    dlogit = np.where(inside, prob - y, 0.0) / B

    grads = {
        "b2": np.asarray(dlogit.sum()),
        "w2": h.T @ dlogit,
    }
    dpre = (dlogit[:, None] * params["w2"][None, :]) * (pre > 0)
    grads["b1"] = dpre.sum(axis=0)
    grads["w1"] = dpre.T @ z
    dz = dpre @ params["w1"]  # (B, nq)

    n_angles = cfg.depth * nq * 3
    if not np.any(dz):
        grads["angles"] = np.zeros_like(params["angles"])
        return grads

    # one row per (sample, angle, shift direction)
    flat = params["angles"].reshape(n_angles)
    shifted = np.broadcast_to(flat, (B, 2 * n_angles, n_angles)).copy()
    ks = np.arange(n_angles)
    shifted[:, 2 * ks, ks] += np.pi / 2
    shifted[:, 2 * ks + 1, ks] -= np.pi / 2
    amps = np.repeat(amps0, 2 * n_angles, axis=0)
    angle_rows = shifted.reshape(B * 2 * n_angles, cfg.depth, nq, 3)
    z_shift = _batch_expval_z(_batch_run_circuit(amps, nq, angle_rows), nq)
    z_shift = z_shift.reshape(B, n_angles, 2, nq)
    dz_da = (z_shift[:, :, 0, :] - z_shift[:, :, 1, :]) / 2.0
    grads["angles"] = np.einsum("bq,bkq->k", dz, dz_da).reshape(params["angles"].shape)
    return grads


def adam_init(params):
    return {
        "m": {k: np.zeros_like(v) for k, v in params.items()},
        "v": {k: np.zeros_like(v) for k, v in params.items()},
        "t": 0,
    }


def adam_step(params, grads, state, lr=0.01, beta1=0.9, beta2=0.999, eps=1e-8):
    """Standard bias-corrected Adam update. Returns (new_params, state)."""
    state["t"] += 1
    t = state["t"]
    new = {}
    for k, p in params.items():
        g = grads[k]
        state["m"][k] = beta1 * state["m"][k] + (1 - beta1) * g
        state["v"][k] = beta2 * state["v"][k] + (1 - beta2) * g * g
        m_hat = state["m"][k] / (1 - beta1**t)
        v_hat = state["v"][k] / (1 - beta2**t)
        new[k] = p - lr * m_hat / (np.sqrt(v_hat) + eps)
    return new, state


class QnnClassifier(BaseEstimator):
    """Amplitude-encoded variational circuit with a classical dense head.

    fit() takes raw features: it performs a stratified hold-out split,
    trains with minibatch Adam, and keeps the parameters with the best
    hold-out loss.

    scaling="minmax" (default) rescales each feature to [0, 1] with
    training-split statistics, keeping values non-negative so class
    structure shows up as a direction change of the encoded state.
    scaling="none" encodes raw values (amplitude encoding already
    absorbs any positive rescaling). scaling="zscore" standardizes
    instead; note that centering can fold class structure into a
    near-global sign, which amplitude encoding cannot represent.
    """

    def __init__(self, n_features=32, depth=5, dense_width=32, seed=0,
                 learning_rate=0.01, batch_size=16, epochs=100,
                 val_fraction=0.2, split_seed=42, scaling="minmax"):
        self.n_features = n_features
        self.depth = depth
        self.dense_width = dense_width
        self.seed = seed
        self.learning_rate = learning_rate
        self.batch_size = batch_size
        self.epochs = epochs
        self.val_fraction = val_fraction
        self.split_seed = split_seed
        self.scaling = scaling

    def _config(self):
        return QnnConfig(
            n_features=self.n_features,
            depth=self.depth,
            dense_width=self.dense_width,
            seed=self.seed,
            learning_rate=self.learning_rate,
            batch_size=self.batch_size,
            epochs=self.epochs,
        )

    def fit(self, X, y):
        cfg = self._config()
        X = check_matrix(X, n_cols=cfg.n_features)
        y = check_both_classes(y)

        rng = np.random.default_rng(self.split_seed)
        val_idx = []
        for cls in (0, 1):
            members = np.where(y == cls)[0]
            n_val = min(max(int(round(self.val_fraction * members.size)), 1),
                        members.size - 1)
            val_idx.extend(rng.permutation(members)[:n_val].tolist())
        val_mask = np.zeros(y.size, dtype=bool)
        val_mask[val_idx] = True

        x_tr, y_tr = X[~val_mask], y[~val_mask]
        x_val, y_val = X[val_mask], y[val_mask]
        if len(set(y_tr)) < 2 or len(set(y_val)) < 2:
            raise OmiqValidationError("degenerate split: a side lost a class")

        # all scalers reduce to the affine map (x - mean_) / sd_
        if self.scaling == "minmax":
            lo = x_tr.min(axis=0)
            span = x_tr.max(axis=0) - lo
            self.mean_ = lo
            self.sd_ = np.where(span > 0, span, 1.0)
        elif self.scaling == "zscore":
            self.mean_ = x_tr.mean(axis=0)
            sd = x_tr.std(axis=0, ddof=0)
            self.sd_ = np.where(sd > 0, sd, 1.0)
        elif self.scaling == "none":
            self.mean_ = np.zeros(X.shape[1])
            self.sd_ = np.ones(X.shape[1])
        else:
            raise OmiqValidationError(f"unknown scaling {self.scaling!r}")
        x_tr = (x_tr - self.mean_) / self.sd_
        x_val = (x_val - self.mean_) / self.sd_

        params = init_params(cfg)
        state = adam_init(params)
        history = TrainHistory()
        best_params = copy.deepcopy(params)
        best_val = np.inf
        batch_rng = np.random.default_rng(cfg.seed + 1)
        for _ in range(cfg.epochs):
            order = batch_rng.permutation(x_tr.shape[0])
            for start in range(0, order.size, cfg.batch_size):
                rows = order[start : start + cfg.batch_size]
                grads = gradients(cfg, params, x_tr[rows], y_tr[rows])
                params, state = adam_step(params, grads, state, lr=cfg.learning_rate)
            p_tr = forward_batch(cfg, params, x_tr)
            p_val = forward_batch(cfg, params, x_val)
            history.train_loss.append(bce_loss(p_tr, y_tr))
            history.train_acc.append(float(np.mean((p_tr >= 0.5) == (y_tr == 1))))
            history.val_loss.append(bce_loss(p_val, y_val))
            history.val_acc.append(float(np.mean((p_val >= 0.5) == (y_val == 1))))
            if history.val_loss[-1] < best_val:
                best_val = history.val_loss[-1]
                best_params = copy.deepcopy(params)
        self.params_ = best_params
        self.history_ = history
        return self

    def forward_std(self, x_std):
        """Forward probabilities on already-standardized rows."""
        check_fitted(self, "params_")
        return forward_batch(self._config(), self.params_, x_std)

    def predict_proba(self, X):
        check_fitted(self, "params_")
        X = check_matrix(X, n_cols=self.n_features)
        p1 = self.forward_std((X - self.mean_) / self.sd_)
        return np.column_stack([1.0 - p1, p1])

    def predict(self, X):
        return (self.predict_proba(X)[:, 1] >= 0.5).astype(int)


def train(cfg, data, split=0.2, seed=42):
    """Fit a QnnClassifier on a LabeledDataset; returns (model, history)."""
    clf = QnnClassifier(
        n_features=cfg.n_features,
        depth=cfg.depth,
        dense_width=cfg.dense_width,
        seed=cfg.seed,
        learning_rate=cfg.learning_rate,
        batch_size=cfg.batch_size,
        epochs=cfg.epochs,
        val_fraction=split,
        split_seed=seed,
    ).fit(data.values, data.labels)
    return clf, clf.history_


def predict_labels(model, X, threshold=0.5):
    """Label 1 iff the model probability is >= threshold."""
    return (model.predict_proba(X)[:, 1] >= threshold).astype(int)


def save_checkpoint(clf, path):
    """Self-describing JSON checkpoint; floats round-trip exactly."""
    check_fitted(clf, "params_")
    payload = {
        "kind": "qnn",
        "config": clf.get_params(),
        "scaler": {"mean": clf.mean_.tolist(), "sd": clf.sd_.tolist()},
        "params": {k: np.asarray(v).tolist() for k, v in clf.params_.items()},
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=1, sort_keys=True)
        fh.write("\n")


def load_checkpoint(path):
    with open(path, encoding="utf-8") as fh:
        payload = json.load(fh)
    if payload.get("kind") != "qnn":
        raise OmiqValidationError(f"{path}: not a qnn checkpoint")
    clf = QnnClassifier(**payload["config"])
    clf.mean_ = np.asarray(payload["scaler"]["mean"], dtype=float)
    clf.sd_ = np.asarray(payload["scaler"]["sd"], dtype=float)
    clf.params_ = {k: np.asarray(v, dtype=float) for k, v in payload["params"].items()}
    clf.history_ = TrainHistory()
    return clf


def write_history(history, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("epoch\ttrain_loss\ttrain_acc\tval_loss\tval_acc\n")
        for i in range(len(history.train_loss)):
            fh.write(
                f"{i}\t{repr(history.train_loss[i])}\t{repr(history.train_acc[i])}"
                f"\t{repr(history.val_loss[i])}\t{repr(history.val_acc[i])}\n"
            )


# re-exported so pipeline code has one import site for splits
__all__ = [
    "QnnConfig", "QNN_PRESETS", "TrainHistory", "QnnClassifier",
    "init_params", "forward", "forward_batch", "bce_loss", "gradients",
    "adam_init", "adam_step", "train", "predict_labels",
    "save_checkpoint", "load_checkpoint", "write_history", "train_test_split",
]
