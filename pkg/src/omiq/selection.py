"""Univariate feature scorers, top-k selection, Venn set logic, AUC filter.

Mutual information and chi-square operate on the empirical joint of the
equal-width-binned feature and the binary label. MI is reported in nats
(ranking is log-base invariant); chi-square cells with zero expected
count contribute 0. PCA scores are variance-weighted absolute loadings,
since projecting onto components would destroy feature identity.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from omiq.errors import OmiqValidationError
from omiq.metrics import roc_auc
from omiq.trees import RandomForest
from omiq.validation import check_both_classes

SCORE_METHODS = ("MI", "Chi2", "PCA", "RF")


@dataclass(frozen=True)
class ScoreTable:
    method: str
    entries: list[tuple[str, float]]  # (feature_id, score)

    def scores_by_id(self):
        return dict(self.entries)


@dataclass(frozen=True)
class SelectionResult:
    per_method: dict[str, list[str]]
    common: set[str]
    unique: set[str]

    @property
    def uncommon_count(self):
        # the printed quantity |union| - |intersection|
        return len(self.unique) - len(self.common)


def discretize(x, bins):
    """Equal-width binning over [min, max]; constant vectors map to bin 0."""
    if bins < 2:
        raise OmiqValidationError("bins must be >= 2")
    x = np.asarray(x, dtype=float)
    lo, hi = x.min(), x.max()
    if hi == lo:
        return np.zeros(x.size, dtype=int)
    idx = np.floor((x - lo) / (hi - lo) * bins).astype(int)
    return np.clip(idx, 0, bins - 1)


def contingency(binned, labels, bins):
    table = np.zeros((bins, 2), dtype=float)
    np.add.at(table, (binned, labels), 1.0)
    return table


def mutual_information_table(table):
    """Plug-in mutual information (nats) of a joint count table."""
    table = np.asarray(table, dtype=float)
    total = table.sum()
    if total == 0:
        return 0.0
    p = table / total
    px = p.sum(axis=1, keepdims=True)
    py = p.sum(axis=0, keepdims=True)
    mask = p > 0
    ratio = np.ones_like(p)
    ratio[mask] = p[mask] / (px @ py)[mask]
    return float(np.sum(p[mask] * np.log(ratio[mask])))


def chi_square_table(table):
    """Pearson chi-square of a count table; cells with E = 0 contribute 0."""
    table = np.asarray(table, dtype=float)
    total = table.sum()
    if total == 0:
        return 0.0
    expected = np.outer(table.sum(axis=1), table.sum(axis=0)) / total
    mask = expected > 0
    return float(np.sum((table[mask] - expected[mask]) ** 2 / expected[mask]))


def mutual_info_scores(d, bins=10):
    check_both_classes(d.labels)
    entries = []
    for j, fid in enumerate(d.feature_ids):
        binned = discretize(d.values[:, j], bins)
        entries.append((fid, mutual_information_table(contingency(binned, d.labels, bins))))
    return ScoreTable(method="MI", entries=entries)


def chi_square_scores(d, bins=10):
    check_both_classes(d.labels)
    entries = []
    for j, fid in enumerate(d.feature_ids):
        col = d.values[:, j]
        # SelectKBest-style non-negativity: min-shift before binning
        # (equal-width bins are shift-invariant, so this is a formality)
        binned = discretize(col - col.min(), bins)
        entries.append((fid, chi_square_table(contingency(binned, d.labels, bins))))
    return ScoreTable(method="Chi2", entries=entries)


def pca_feature_scores(d, k_components):
    """Variance-weighted absolute loadings over the top-k components."""
    n, p = d.values.shape
    if n < 2:
        raise OmiqValidationError("need at least 2 samples for PCA")
    if k_components > min(n, p):
        raise OmiqValidationError("k_components exceeds min(samples, features)")
    sd = d.values.std(axis=0, ddof=1)
    active = np.where(sd > 0)[0]
    scores = np.zeros(p)
    if active.size:
        x = d.values[:, active]
        z = (x - x.mean(axis=0)) / sd[active]
        cov = z.T @ z / (n - 1)
        eigvals, eigvecs = np.linalg.eigh(cov)
        order = np.argsort(eigvals)[::-1]
        eigvals = np.clip(eigvals[order], 0.0, None)
        eigvecs = eigvecs[:, order]
        # fix sign so the largest-magnitude entry of each vector is positive
        for i in range(eigvecs.shape[1]):
            pivot = np.argmax(np.abs(eigvecs[:, i]))
            if eigvecs[pivot, i] < 0:
                eigvecs[:, i] = -eigvecs[:, i]
        total = eigvals.sum()
        if total > 0:
            k = min(k_components, eigvals.size)
            weighted = np.abs(eigvecs[:, :k]) @ eigvals[:k]
            scores[active] = weighted / total
    return ScoreTable(method="PCA", entries=list(zip(d.feature_ids, scores.tolist())))


def rf_feature_importances(d, n_trees=100, max_depth=None, seed=0):
    """Mean impurity-decrease importances (Gini), normalized to sum 1."""
    check_both_classes(d.labels)
    forest = RandomForest(
        n_trees=n_trees, criterion="gini", max_depth=max_depth, seed=seed
    ).fit(d.values, d.labels)
    return ScoreTable(
        method="RF",
        entries=list(zip(d.feature_ids, forest.feature_importances_.tolist())),
    )


def select_k_best(table, k):
    """Top-k feature ids by score, ties broken by feature_id ascending."""
    if k > len(table.entries):
        raise OmiqValidationError(f"k={k} exceeds {len(table.entries)} features")
    ranked = sorted(table.entries, key=lambda e: (-e[1], e[0]))
    return [fid for fid, _ in ranked[:k]]


def venn_partition(per_method):
    """Common (intersection) and unique (deduplicated union) feature sets."""
    if len(per_method) < 2:
        raise OmiqValidationError("need at least two sets")
    sets = [set(ids) for ids in per_method.values()]
    common = set.intersection(*sets)
    unique = set.union(*sets)
    return SelectionResult(
        per_method={m: list(ids) for m, ids in per_method.items()},
        common=common,
        unique=unique,
    )


def _feature_seed(seed, feature_id):
    digest = hashlib.sha256(f"{seed}:{feature_id}".encode()).digest()
    return int.from_bytes(digest[:8], "little")


def auc_filter(train, test, candidates, threshold=0.80, n_trees=250, seed=0,
               max_depth=3):
    """Keep candidates whose single-feature RF clears the AUC bar twice.

    For each candidate a forest is trained on that feature alone over the
    training split; the feature survives iff its vote-fraction AUC exceeds
    the threshold on BOTH splits. Candidates should arrive sorted by score
    descending; the output is deduplicated and order-preserving. Each
    feature gets a seed derived from (seed, feature_id) so the kept set
    does not depend on evaluation order.
    """
    if not candidates:
        raise OmiqValidationError("empty candidate list")
    check_both_classes(train.labels)
    check_both_classes(test.labels)
    kept, seen = [], set()
    train_index = {f: j for j, f in enumerate(train.feature_ids)}
    test_index = {f: j for j, f in enumerate(test.feature_ids)}
    for fid in candidates:
        if fid in seen:
            continue
        seen.add(fid)
        if fid not in train_index or fid not in test_index:
            raise OmiqValidationError(f"candidate {fid!r} missing from a split")
        x_tr = train.values[:, [train_index[fid]]]
        x_te = test.values[:, [test_index[fid]]]
        forest = RandomForest(
            n_trees=n_trees,
            criterion="gini",
            max_depth=max_depth,
            max_features=None,
            seed=_feature_seed(seed, fid),
        ).fit(x_tr, train.labels)
        auc_tr = roc_auc(train.labels, forest.predict_proba1(x_tr))
        auc_te = roc_auc(test.labels, forest.predict_proba1(x_te))
        if auc_tr > threshold and auc_te > threshold:
            kept.append(fid)
    return kept


def write_score_table(table, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("feature_id\tscore\n")
        for fid, score in table.entries:
            fh.write(f"{fid}\t{repr(float(score))}\n")
