"""Feature-importance and per-class reporting for trained models.

Two importance views are provided:

* gradient mode — mean absolute central finite difference of the model
  probability with respect to each standardized input feature, averaged
  over a reference cohort;
* dense mode — mean absolute first-layer weight per input, available
  only when the dense width equals the input width so rows map one-to-one
  onto features.

The deviation report ranks features by how far true-positive and
true-negative sample means sit from the overall cohort mean, each of the
two deviation profiles min-max normalized before summing.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from omiq.errors import OmiqValidationError
from omiq.validation import check_fitted, check_matrix


ALPHA = 0.05


@dataclass(frozen=True)
class FeatureReportRow:
    feature_id: str
    importance: float
    mean_lusc: float
    mean_luad: float
    associated_subtype: str
    p_value: float
    significance: str  # "MostSignificant" iff p_value < 0.05


def _significance(p):
    return "MostSignificant" if p < ALPHA else "LessSignificant"


def _standardize_with(model, X):
    check_fitted(model, "mean_")
    return (np.asarray(X, dtype=float) - model.mean_) / model.sd_


def weight_importance(model, X, mode="gradient", h=1e-4):
    """Per-feature importance scores for a fitted model, summing to any scale.

    gradient: mean over rows of |f(x + h e_j) - f(x - h e_j)| / (2 h)
    evaluated on standardized inputs. dense: mean |row| of the first
    dense layer, defined only when that layer is square.
    """
    if mode == "dense":
        check_fitted(model, "params_")
        w1 = model.params_["w1"]
        if w1.shape[0] != w1.shape[1] or w1.shape[1] != model.n_features:
            raise OmiqValidationError(
                "dense importance needs dense_width == n_features"
            )
        return np.mean(np.abs(w1), axis=1)
    if mode != "gradient":
        raise OmiqValidationError(f"unknown importance mode {mode!r}")
    xs = _standardize_with(model, check_matrix(X))
    n, p = xs.shape
    scores = np.zeros(p)
    for j in range(p):
        plus = xs.copy()
        minus = xs.copy()
        plus[:, j] += h
        minus[:, j] -= h
        diff = model.forward_std(plus) - model.forward_std(minus)
        scores[j] = float(np.mean(np.abs(diff))) / (2 * h)
    return scores


def class_mean_levels(dataset):
    """(means for label 0, means for label 1) over dataset columns."""
    X = dataset.values
    y = dataset.labels
    return X[y == 0].mean(axis=0), X[y == 1].mean(axis=0)


def associate(mean_lusc, mean_luad):
    """Subtype whose mean expression is higher; ties go to LUSC_I."""
    return "LUAD_II" if mean_luad > mean_lusc else "LUSC_I"


def make_rows(dataset, importance, p_values=None):
    """FeatureReportRow per feature, sorted by importance desc then id.

    p_values maps feature_id to a p-value; missing features get p = 1.
    """
    p_values = p_values or {}
    m0, m1 = class_mean_levels(dataset)
    rows = [
        FeatureReportRow(
            feature_id=fid,
            importance=float(importance[j]),
            mean_lusc=float(m0[j]),
            mean_luad=float(m1[j]),
            associated_subtype=associate(m0[j], m1[j]),
            p_value=float(p_values.get(fid, 1.0)),
            significance=_significance(float(p_values.get(fid, 1.0))),
        )
        for j, fid in enumerate(dataset.feature_ids)
    ]
    rows.sort(key=lambda r: (-r.importance, r.feature_id))
    return rows


def build_report(model, dataset, p_values=None, mode="gradient", top_n=32, h=1e-4):
    """Top-N features by importance with per-class mean levels."""
    imp = weight_importance(model, dataset.values, mode=mode, h=h)
    return make_rows(dataset, imp, p_values)[:top_n]


def tp_tn_deviation_scores(model, dataset, n_top=40):
    """Features ranked by combined TP/TN deviation from the cohort mean.

    TP rows are label-1 samples predicted 1; TN rows label-0 predicted 0.
    Each deviation profile |class-conditional mean - overall mean| is
    min-max normalized (constant profiles become zeros) before summing.
    Returns [(feature_id, score)] sorted by score desc, then feature_id.
    """
    X = dataset.values
    y = dataset.labels
    preds = model.predict(X)
    overall = X.mean(axis=0)
    parts = []
    for cls in (1, 0):
        rows = X[(y == cls) & (preds == cls)]
        if rows.shape[0] == 0:
            parts.append(np.zeros(X.shape[1]))
            continue
        dev = np.abs(rows.mean(axis=0) - overall)
        span = dev.max() - dev.min()
        parts.append((dev - dev.min()) / span if span > 0 else np.zeros_like(dev))
    combined = parts[0] + parts[1]
    order = sorted(range(X.shape[1]), key=lambda j: (-combined[j], dataset.feature_ids[j]))
    return [(dataset.feature_ids[j], float(combined[j])) for j in order[:n_top]]


def write_feature_report(rows, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(
            "feature_id\timportance\tmean_lusc\tmean_luad\tassociated_subtype"
            "\tp_value\tsignificance\n"
        )
        for r in rows:
            fh.write(
                f"{r.feature_id}\t{repr(r.importance)}\t{repr(r.mean_lusc)}"
                f"\t{repr(r.mean_luad)}\t{r.associated_subtype}"
                f"\t{repr(r.p_value)}\t{r.significance}\n"
            )


def write_deviation_scores(pairs, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("feature_id\tdeviation_score\n")
        for fid, score in pairs:
            fh.write(f"{fid}\t{repr(score)}\n")


def write_level_profile(dataset, feature_ids, path):
    """Per-sample levels for selected features, for downstream plotting."""
    idx = {fid: j for j, fid in enumerate(dataset.feature_ids)}
    missing = [fid for fid in feature_ids if fid not in idx]
    if missing:
        raise OmiqValidationError(f"unknown feature ids: {missing[:3]}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("sample_id\tlabel\t" + "\t".join(feature_ids) + "\n")
        for i, sid in enumerate(dataset.sample_ids):
            vals = "\t".join(repr(float(dataset.values[i, idx[f]])) for f in feature_ids)
            fh.write(f"{sid}\t{dataset.labels[i]}\t{vals}\n")
