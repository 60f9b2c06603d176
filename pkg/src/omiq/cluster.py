"""Agglomerative Ward clustering of feature columns.

Items are the feature columns of a sample-by-feature matrix; distances
are Euclidean between columns. The linkage uses the Lance-Williams Ward
update, with merge ties broken by the smallest (left_id, right_id) pair,
so the table is fully deterministic. Singleton ids are 0..n-1; the k-th
merged cluster gets id n+k.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from omiq.errors import OmiqValidationError


@dataclass(frozen=True)
class CondensedDistances:
    """Upper-triangle (i < j, row-major) pairwise distance vector."""

    n: int
    d: np.ndarray

    def __post_init__(self):
        expected = self.n * (self.n - 1) // 2
        if self.d.shape != (expected,):
            raise OmiqValidationError(
                f"condensed vector has length {self.d.shape}, expected {expected}"
            )
        if np.any(self.d < 0):
            raise OmiqValidationError("distances must be non-negative")

    def index(self, i, j):
        if i == j:
            raise OmiqValidationError("no self-distance in condensed storage")
        if i > j:
            i, j = j, i
        return self.n * i - i * (i + 1) // 2 + (j - i - 1)

    def get(self, i, j):
        return 0.0 if i == j else float(self.d[self.index(i, j)])

    def square(self):
        full = np.zeros((self.n, self.n))
        k = 0
        for i in range(self.n - 1):
            cnt = self.n - i - 1
            full[i, i + 1 :] = self.d[k : k + cnt]
            k += cnt
        return full + full.T


@dataclass(frozen=True)
class LinkageTable:
    """n-1 merge rows of (left_id, right_id, height, merged_size)."""

    n: int
    rows: list[tuple[int, int, float, int]]

    def __post_init__(self):
        if len(self.rows) != self.n - 1:
            raise OmiqValidationError("linkage must have n-1 merges")


def pairwise_euclidean(X):
    """Euclidean distances between the columns of X."""
    X = np.asarray(X, dtype=float)
    if not np.all(np.isfinite(X)):
        raise OmiqValidationError("NaN or infinity in input")
    if X.ndim != 2 or X.shape[1] < 2:
        raise OmiqValidationError("need at least 2 feature columns")
    n = X.shape[1]
    sq = np.sum(X * X, axis=0)
    gram = X.T @ X
    d2 = sq[:, None] + sq[None, :] - 2.0 * gram
    np.maximum(d2, 0.0, out=d2)
    dist = np.sqrt(d2)
    iu = np.triu_indices(n, k=1)
    return CondensedDistances(n=n, d=dist[iu].copy())


def ward_linkage(D):
    """Nearest-pair agglomeration with the Lance-Williams Ward update."""
    n = D.n
    if n < 2:
        raise OmiqValidationError("need at least 2 items")
    # working distance/size maps keyed by cluster id
    active = list(range(n))
    size = {i: 1 for i in range(n)}
    dist = {}
    for i in range(n):
        for j in range(i + 1, n):
            dist[(i, j)] = D.get(i, j)

    def d_of(a, b):
        return dist[(a, b) if a < b else (b, a)]

    rows = []
    next_id = n
    for _ in range(n - 1):
        best = None
        for ai in range(len(active)):
            for bi in range(ai + 1, len(active)):
                a, b = active[ai], active[bi]
                key = (d_of(a, b), min(a, b), max(a, b))
                if best is None or key < best:
                    best = key
        height, left, right = best
        merged = next_id
        next_id += 1
        size[merged] = size[left] + size[right]
        rows.append((left, right, float(height), size[merged]))
        active = [c for c in active if c not in (left, right)]
        for w in active:
            t = size[w] + size[left] + size[right]
            d2 = (
                (size[w] + size[left]) / t * d_of(w, left) ** 2
                + (size[w] + size[right]) / t * d_of(w, right) ** 2
                - size[w] / t * height**2
            )
            dist[(min(w, merged), max(w, merged))] = float(np.sqrt(max(d2, 0.0)))
        active.append(merged)
    return LinkageTable(n=n, rows=rows)


def cut_tree(L, criterion, value):
    """Flat cluster labels, 1-based, numbered by first item appearance.

    criterion "maxclust": apply merges bottom-up until at most `value`
    clusters remain. criterion "distance": keep merges with height <= value.
    """
    n = L.n
    if criterion == "maxclust":
        if not 1 <= value:
            raise OmiqValidationError("maxclust value must be >= 1")
        n_merges = max(0, n - int(value))
    elif criterion == "distance":
        if value < 0:
            raise OmiqValidationError("distance value must be >= 0")
        n_merges = sum(1 for r in L.rows if r[2] <= value)
    else:
        raise OmiqValidationError(f"unknown cut criterion {criterion!r}")

    parent = list(range(n + n_merges))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for k in range(n_merges):
        left, right, _, _ = L.rows[k]
        merged = n + k
        parent[find(left)] = merged
        parent[find(right)] = merged

    labels = np.zeros(n, dtype=int)
    label_of_root = {}
    for item in range(n):
        root = find(item)
        if root not in label_of_root:
            label_of_root[root] = len(label_of_root) + 1
        labels[item] = label_of_root[root]
    return labels


def cluster_importance(X, labels):
    """Per-cluster sum of the absolute values of member feature columns."""
    X = np.asarray(X, dtype=float)
    labels = np.asarray(labels, dtype=int)
    if labels.size != X.shape[1]:
        raise OmiqValidationError("labels must cover all feature columns")
    col_mass = np.abs(X).sum(axis=0)
    return {int(c): float(col_mass[labels == c].sum()) for c in np.unique(labels)}


def top_k_per_cluster(X, labels, k, feature_ids=None):
    """Up to k highest absolute-sum features from each cluster, deduplicated."""
    if k < 1:
        raise OmiqValidationError("k must be >= 1")
    X = np.asarray(X, dtype=float)
    labels = np.asarray(labels, dtype=int)
    if feature_ids is None:
        feature_ids = list(range(X.shape[1]))
    col_mass = np.abs(X).sum(axis=0)
    selected = []
    for c in np.unique(labels):
        members = np.where(labels == c)[0]
        ranked = sorted(members, key=lambda j: (-col_mass[j], feature_ids[j]))
        selected.extend(feature_ids[j] for j in ranked[:k])
    out, seen = [], set()
    for f in selected:
        if f not in seen:
            seen.add(f)
            out.append(f)
    return out


def write_linkage_table(L, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("left_id\tright_id\theight\tmerged_size\n")
        for left, right, height, msize in L.rows:
            fh.write(f"{left}\t{right}\t{repr(float(height))}\t{msize}\n")
