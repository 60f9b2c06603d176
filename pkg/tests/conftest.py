import numpy as np
import pytest

from omiq.omics import LabeledDataset


def make_dataset(values, labels, feature_ids=None, sample_ids=None):
    values = np.asarray(values, dtype=float)
    if feature_ids is None:
        feature_ids = [f"f{j:03d}" for j in range(values.shape[1])]
    if sample_ids is None:
        sample_ids = [f"S{i:04d}" for i in range(values.shape[0])]
    return LabeledDataset(
        feature_ids=feature_ids,
        sample_ids=sample_ids,
        values=values,
        labels=np.asarray(labels, dtype=int),
    )


def separable_cohort(n_per_class=300, n_features=32, n_informative=7,
                     effect=2.0, base=5.0, seed=42):
    """Gaussian two-class cohort; the first features carry a mean shift."""
    rng = np.random.default_rng(seed)
    X = base + rng.standard_normal((2 * n_per_class, n_features))
    X[n_per_class:, :n_informative] += effect
    y = np.array([0] * n_per_class + [1] * n_per_class)
    return make_dataset(X, y)


@pytest.fixture
def small_dataset():
    return separable_cohort(n_per_class=40, n_features=8, n_informative=3, seed=7)
