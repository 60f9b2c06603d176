"""Input validation helpers shared across estimators and pipeline stages."""

from __future__ import annotations

import numpy as np

from omiq.errors import OmiqValidationError


def check_matrix(values, n_rows=None, n_cols=None, name="values"):
    """Coerce to a 2-D float array of finite values."""
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 2:
        raise OmiqValidationError(f"{name} must be 2-D, got ndim={arr.ndim}")
    if not np.all(np.isfinite(arr)):
        raise OmiqValidationError(f"{name} contains non-finite entries")
    if n_rows is not None and arr.shape[0] != n_rows:
        raise OmiqValidationError(f"{name} has {arr.shape[0]} rows, expected {n_rows}")
    if n_cols is not None and arr.shape[1] != n_cols:
        raise OmiqValidationError(f"{name} has {arr.shape[1]} columns, expected {n_cols}")
    return arr


def check_binary_labels(labels, n=None):
    """Coerce to an int vector drawn from {0, 1}."""
    y = np.asarray(labels)
    if y.ndim != 1:
        raise OmiqValidationError("labels must be 1-D")
    if n is not None and y.shape[0] != n:
        raise OmiqValidationError(f"labels length {y.shape[0]} does not match {n} samples")
    y = y.astype(int)
    if not np.isin(y, (0, 1)).all():
        raise OmiqValidationError("labels must be drawn from {0, 1}")
    return y


def check_both_classes(y):
    y = check_binary_labels(y)
    if not (np.any(y == 0) and np.any(y == 1)):
        raise OmiqValidationError("both classes must be present")
    return y


def check_unique_ids(ids, name):
    ids = list(ids)
    if len(set(ids)) != len(ids):
        seen, dup = set(), None
        for i in ids:
            if i in seen:
                dup = i
                break
            seen.add(i)
        raise OmiqValidationError(f"duplicate {name} id: {dup!r}")
    return ids


def check_fitted(estimator, attr):
    if not hasattr(estimator, attr):
        raise OmiqValidationError(
            f"{type(estimator).__name__} is not fitted; call fit() first"
        )
