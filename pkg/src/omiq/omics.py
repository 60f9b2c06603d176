"""Omic matrix and clinical table I/O, cohort merging, and synthetic data.

On-disk orientation follows the Xena/TCGA convention: rows are features,
columns are samples, the first column holds feature identifiers and the
header row holds sample identifiers. In memory the orientation is flipped
(rows = samples, columns = features) so downstream math treats features
as columns.

Values are serialized with repr(), which round-trips float64 exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from omiq.errors import OmiqValidationError
from omiq.validation import check_binary_labels, check_matrix, check_unique_ids

OMIC_KINDS = ("DNAme", "RNAseq", "miRNAseq")

# Namespacing applied on multi-omic integration so identifiers from
# different modalities can never collide.
OMIC_PREFIXES = {"DNAme": "DNA:", "RNAseq": "RNA:", "miRNAseq": "MIR:"}

SUBTYPES = ("LUSC_I", "LUAD_II")
SAMPLE_TYPES = ("PrimaryTumor", "SolidTissueNormal")

# Label convention: 0 = LUSC subtype-I, 1 = LUAD subtype-II.
SUBTYPE_LABELS = {"LUSC_I": 0, "LUAD_II": 1}

_MISSING_TOKENS = {"", "NA", "NAN", "NULL"}


@dataclass(frozen=True)
class OmicsMatrix:
    """Sample-by-feature real matrix for one omic modality."""

    omic_kind: str
    feature_ids: list[str]
    sample_ids: list[str]
    values: np.ndarray  # shape (n_samples, n_features)
    unit: str = ""

    def __post_init__(self):
        if self.omic_kind not in OMIC_KINDS:
            raise OmiqValidationError(f"unknown omic kind {self.omic_kind!r}")
        check_unique_ids(self.feature_ids, "feature")
        check_unique_ids(self.sample_ids, "sample")
        vals = check_matrix(
            self.values, len(self.sample_ids), len(self.feature_ids), name="values"
        )
        object.__setattr__(self, "values", vals)

    @property
    def n_samples(self):
        return len(self.sample_ids)

    @property
    def n_features(self):
        return len(self.feature_ids)


@dataclass(frozen=True)
class ClinicalTable:
    """Per-sample subtype and sample-type annotations."""

    sample_ids: list[str]
    subtype: list[str]
    sample_type: list[str]
    attributes: dict[str, list[str]] = field(default_factory=dict)

    def __post_init__(self):
        check_unique_ids(self.sample_ids, "sample")
        n = len(self.sample_ids)
        if len(self.subtype) != n or len(self.sample_type) != n:
            raise OmiqValidationError("clinical columns must match sample count")
        for s in self.subtype:
            if s not in SUBTYPES:
                raise OmiqValidationError(f"unknown subtype {s!r}")
        for t in self.sample_type:
            if t not in SAMPLE_TYPES:
                raise OmiqValidationError(f"unknown sample type {t!r}")
        for key, col in self.attributes.items():
            if len(col) != n:
                raise OmiqValidationError(f"attribute column {key!r} has wrong length")

    def subtype_of(self):
        return dict(zip(self.sample_ids, self.subtype))


@dataclass(frozen=True)
class LabeledDataset:
    """Feature matrix aligned with binary subtype labels."""

    feature_ids: list[str]
    sample_ids: list[str]
    values: np.ndarray  # shape (n_samples, n_features)
    labels: np.ndarray  # 0 = LUSC subtype-I, 1 = LUAD subtype-II

    def __post_init__(self):
        check_unique_ids(self.feature_ids, "feature")
        check_unique_ids(self.sample_ids, "sample")
        vals = check_matrix(
            self.values, len(self.sample_ids), len(self.feature_ids), name="values"
        )
        object.__setattr__(self, "values", vals)
        object.__setattr__(
            self, "labels", check_binary_labels(self.labels, len(self.sample_ids))
        )

    @property
    def n_samples(self):
        return len(self.sample_ids)

    @property
    def n_features(self):
        return len(self.feature_ids)

    def restrict_features(self, feature_ids):
        """Column subset in the given order."""
        index = {f: j for j, f in enumerate(self.feature_ids)}
        missing = [f for f in feature_ids if f not in index]
        if missing:
            raise OmiqValidationError(f"unknown feature ids: {missing[:5]}")
        cols = [index[f] for f in feature_ids]
        return LabeledDataset(
            feature_ids=list(feature_ids),
            sample_ids=list(self.sample_ids),
            values=self.values[:, cols],
            labels=self.labels.copy(),
        )


def _fmt(x):
    return repr(float(x))


# ---------------------------------------------------------------------------
# TSV parsing and writing
# ---------------------------------------------------------------------------


def parse_omic_matrix(path, omic_kind, unit="", impute_mean=False):
    """Load a feature-by-sample TSV and transpose into an OmicsMatrix.

    Missing cells (empty/NA/NaN) are a hard error unless impute_mean is
    set, in which case they are replaced with the per-feature mean of the
    observed values.
    """
    with open(path, encoding="utf-8") as fh:
        header = fh.readline()
        if not header.strip():
            raise OmiqValidationError(f"{path}: no header")
        cols = header.rstrip("\n").split("\t")
        sample_ids = cols[1:]
        if not sample_ids:
            raise OmiqValidationError(f"{path}: header has no sample columns")
        if len(set(sample_ids)) != len(sample_ids):
            raise OmiqValidationError(f"{path}: duplicate sample id")
        feature_ids = []
        rows = []
        for lineno, line in enumerate(fh, start=2):
            if not line.strip():
                continue
            parts = line.rstrip("\n").split("\t")
            if len(parts) != len(cols):
                raise OmiqValidationError(
                    f"{path}:{lineno}: expected {len(cols)} columns, got {len(parts)}"
                )
            feature_ids.append(parts[0])
            row = np.empty(len(sample_ids))
            for j, cell in enumerate(parts[1:]):
                token = cell.strip()
                if token.upper() in _MISSING_TOKENS:
                    if not impute_mean:
                        raise OmiqValidationError(
                            f"{path}:{lineno}: missing value without --impute-mean"
                        )
                    row[j] = np.nan
                else:
                    try:
                        row[j] = float(token)
                    except ValueError:
                        if impute_mean:
                            row[j] = np.nan
                        else:
                            raise OmiqValidationError(
                                f"{path}:{lineno}: non-numeric cell {token!r}"
                            ) from None
            rows.append(row)
    if not feature_ids:
        raise OmiqValidationError(f"{path}: no feature rows")
    if len(set(feature_ids)) != len(feature_ids):
        raise OmiqValidationError(f"{path}: duplicate feature id")
    matrix = np.vstack(rows)  # feature-by-sample
    if impute_mean and np.isnan(matrix).any():
        means = np.nanmean(matrix, axis=1)
        means = np.where(np.isnan(means), 0.0, means)
        idx = np.where(np.isnan(matrix))
        matrix[idx] = means[idx[0]]
    return OmicsMatrix(
        omic_kind=omic_kind,
        feature_ids=feature_ids,
        sample_ids=sample_ids,
        values=matrix.T.copy(),
        unit=unit,
    )


def write_omic_matrix(m, path):
    """Write an OmicsMatrix in the feature-by-sample TSV dialect."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("feature_id\t" + "\t".join(m.sample_ids) + "\n")
        fbs = m.values.T
        for i, fid in enumerate(m.feature_ids):
            fh.write(fid + "\t" + "\t".join(_fmt(v) for v in fbs[i]) + "\n")


def parse_clinical_table(path):
    """Load a clinical TSV with columns sample_id, subtype, sample_type."""
    with open(path, encoding="utf-8") as fh:
        header = fh.readline()
        if not header.strip():
            raise OmiqValidationError(f"{path}: no header")
        cols = header.rstrip("\n").split("\t")
        required = ["sample_id", "subtype", "sample_type"]
        for col in required:
            if col not in cols:
                raise OmiqValidationError(f"{path}: missing column {col!r}")
        extra = [c for c in cols if c not in required]
        data = {c: [] for c in cols}
        for lineno, line in enumerate(fh, start=2):
            if not line.strip():
                continue
            parts = line.rstrip("\n").split("\t")
            if len(parts) != len(cols):
                raise OmiqValidationError(
                    f"{path}:{lineno}: expected {len(cols)} columns"
                )
            for c, v in zip(cols, parts):
                data[c].append(v)
    return ClinicalTable(
        sample_ids=data["sample_id"],
        subtype=data["subtype"],
        sample_type=data["sample_type"],
        attributes={c: data[c] for c in extra},
    )


def write_clinical_table(c, path):
    extra = sorted(c.attributes)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\t".join(["sample_id", "subtype", "sample_type"] + extra) + "\n")
        for i, sid in enumerate(c.sample_ids):
            row = [sid, c.subtype[i], c.sample_type[i]]
            row += [c.attributes[k][i] for k in extra]
            fh.write("\t".join(row) + "\n")


def write_labeled_dataset(d, path):
    """Sample-by-feature TSV with sample_id and label as leading columns."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("sample_id\tlabel\t" + "\t".join(d.feature_ids) + "\n")
        for i, sid in enumerate(d.sample_ids):
            fh.write(
                sid
                + "\t"
                + str(int(d.labels[i]))
                + "\t"
                + "\t".join(_fmt(v) for v in d.values[i])
                + "\n"
            )


def parse_labeled_dataset(path):
    with open(path, encoding="utf-8") as fh:
        header = fh.readline()
        if not header.strip():
            raise OmiqValidationError(f"{path}: no header")
        cols = header.rstrip("\n").split("\t")
        if cols[:2] != ["sample_id", "label"]:
            raise OmiqValidationError(f"{path}: expected sample_id/label columns")
        feature_ids = cols[2:]
        sample_ids, labels, rows = [], [], []
        for line in fh:
            if not line.strip():
                continue
            parts = line.rstrip("\n").split("\t")
            sample_ids.append(parts[0])
            labels.append(int(parts[1]))
            rows.append([float(v) for v in parts[2:]])
    return LabeledDataset(
        feature_ids=feature_ids,
        sample_ids=sample_ids,
        values=np.asarray(rows, dtype=float),
        labels=np.asarray(labels, dtype=int),
    )


# ---------------------------------------------------------------------------
# Cohort transformations
# ---------------------------------------------------------------------------


def drop_nonpositive_features(m):
    """Remove every feature whose column sum is <= 0, preserving order."""
    sums = m.values.sum(axis=0)
    keep = np.where(sums > 0)[0]
    return OmicsMatrix(
        omic_kind=m.omic_kind,
        feature_ids=[m.feature_ids[j] for j in keep],
        sample_ids=list(m.sample_ids),
        values=m.values[:, keep],
        unit=m.unit,
    )


def concat_cohorts(a, b):
    """Append the sample rows of b after a. Feature lists must match exactly."""
    if a.omic_kind != b.omic_kind:
        raise OmiqValidationError("omic kinds differ")
    if a.feature_ids != b.feature_ids:
        raise OmiqValidationError("feature lists differ")
    overlap = set(a.sample_ids) & set(b.sample_ids)
    if overlap:
        raise OmiqValidationError(f"overlapping sample id: {sorted(overlap)[0]!r}")
    return OmicsMatrix(
        omic_kind=a.omic_kind,
        feature_ids=list(a.feature_ids),
        sample_ids=list(a.sample_ids) + list(b.sample_ids),
        values=np.vstack([a.values, b.values]),
        unit=a.unit or b.unit,
    )


def join_clinical(m, c):
    """Keep samples present in both, label them, and sort by sample id."""
    subtype = c.subtype_of()
    common = sorted(set(m.sample_ids) & set(subtype))
    if not common:
        raise OmiqValidationError("no samples shared between matrix and clinical table")
    pos = {s: i for i, s in enumerate(m.sample_ids)}
    rows = [pos[s] for s in common]
    labels = np.array([SUBTYPE_LABELS[subtype[s]] for s in common], dtype=int)
    return LabeledDataset(
        feature_ids=list(m.feature_ids),
        sample_ids=common,
        values=m.values[rows],
        labels=labels,
    )


def intersect_and_join(datasets, prefixes=None):
    """Column-concatenate datasets over their common samples.

    Feature ids get the per-dataset prefix so identifiers from different
    modalities stay unique after integration.
    """
    if len(datasets) < 2:
        raise OmiqValidationError("need at least two datasets to integrate")
    if prefixes is None:
        prefixes = [""] * len(datasets)
    if len(prefixes) != len(datasets):
        raise OmiqValidationError("one prefix required per dataset")
    common = set(datasets[0].sample_ids)
    for d in datasets[1:]:
        common &= set(d.sample_ids)
    if not common:
        raise OmiqValidationError("empty sample intersection")
    common = sorted(common)
    labels = None
    blocks, feature_ids = [], []
    for d, prefix in zip(datasets, prefixes):
        pos = {s: i for i, s in enumerate(d.sample_ids)}
        rows = [pos[s] for s in common]
        lab = d.labels[rows]
        if labels is None:
            labels = lab
        elif not np.array_equal(labels, lab):
            bad = common[int(np.nonzero(labels != lab)[0][0])]
            raise OmiqValidationError(f"conflicting labels for sample {bad!r}")
        blocks.append(d.values[rows])
        feature_ids += [prefix + f for f in d.feature_ids]
    return LabeledDataset(
        feature_ids=feature_ids,
        sample_ids=common,
        values=np.hstack(blocks),
        labels=labels,
    )


def subsample_features(d, n, seed):
    """Seeded uniform draw of n distinct features, original order kept."""
    if n > d.n_features:
        raise OmiqValidationError(f"cannot subsample {n} of {d.n_features} features")
    rng = np.random.default_rng(seed)
    idx = np.sort(rng.choice(d.n_features, size=n, replace=False))
    return d.restrict_features([d.feature_ids[j] for j in idx])


def train_test_split(d, test_fraction=0.2, seed=42):
    """Stratified split; per-class test counts are round(fraction * n_class)."""
    if not 0 < test_fraction < 1:
        raise OmiqValidationError("test_fraction must be in (0, 1)")
    rng = np.random.default_rng(seed)
    test_idx = []
    for cls in (0, 1):
        members = np.where(d.labels == cls)[0]
        if members.size == 0:
            raise OmiqValidationError(f"class {cls} absent; cannot stratify")
        n_test = int(round(test_fraction * members.size))
        n_test = min(max(n_test, 1), members.size - 1)
        shuffled = rng.permutation(members)
        test_idx.extend(shuffled[:n_test].tolist())
    test_mask = np.zeros(d.n_samples, dtype=bool)
    test_mask[test_idx] = True

    def take(mask):
        rows = np.where(mask)[0]
        return LabeledDataset(
            feature_ids=list(d.feature_ids),
            sample_ids=[d.sample_ids[i] for i in rows],
            values=d.values[rows],
            labels=d.labels[rows],
        )

    return take(~test_mask), take(test_mask)


# ---------------------------------------------------------------------------
# Synthetic cohorts
# ---------------------------------------------------------------------------

_FEATURE_ID_STYLES = {
    "DNAme": "cg{:06d}",
    "RNAseq": "ENSG{:011d}.1",
    "miRNAseq": "hsa-mir-{:04d}",
}


@dataclass(frozen=True)
class SyntheticSpec:
    """Desk-scale stand-in for a TCGA cohort.

    The first ceil(informative_fraction * n_features) features of each omic
    carry a class mean shift of effect_size * noise_sd; the rest are pure
    noise around base_mean.
    """

    n_per_class: int = 100
    features_per_omic: dict[str, int] = field(
        default_factory=lambda: {"DNAme": 200, "RNAseq": 200, "miRNAseq": 100}
    )
    informative_fraction: float = 0.2
    effect_size: float = 2.0
    noise_sd: float = 1.0
    base_mean: float = 5.0

    def __post_init__(self):
        if self.n_per_class <= 0:
            raise OmiqValidationError("n_per_class must be positive")
        if not self.features_per_omic:
            raise OmiqValidationError("at least one omic required")
        for kind, n in self.features_per_omic.items():
            if kind not in OMIC_KINDS:
                raise OmiqValidationError(f"unknown omic kind {kind!r}")
            if n <= 0:
                raise OmiqValidationError("feature counts must be positive")
        if self.noise_sd <= 0:
            raise OmiqValidationError("noise_sd must be positive")


def generate_synthetic_cohort(spec, seed):
    """Class-conditional Gaussian cohort shared across all omics."""
    rng = np.random.default_rng(seed)
    n = 2 * spec.n_per_class
    sample_ids = [f"TCGA-{i:05d}" for i in range(n)]
    subtype = ["LUSC_I"] * spec.n_per_class + ["LUAD_II"] * spec.n_per_class
    clinical = ClinicalTable(
        sample_ids=sample_ids,
        subtype=subtype,
        sample_type=["PrimaryTumor"] * n,
        attributes={},
    )
    shift = spec.effect_size * spec.noise_sd
    matrices = []
    for kind in OMIC_KINDS:
        if kind not in spec.features_per_omic:
            continue
        p = spec.features_per_omic[kind]
        n_info = int(np.ceil(spec.informative_fraction * p)) if shift != 0 else 0
        values = spec.base_mean + spec.noise_sd * rng.standard_normal((n, p))
        if n_info:
            values[spec.n_per_class :, :n_info] += shift
        feature_ids = [_FEATURE_ID_STYLES[kind].format(j) for j in range(p)]
        matrices.append(
            OmicsMatrix(
                omic_kind=kind,
                feature_ids=feature_ids,
                sample_ids=sample_ids,
                values=values,
                unit="synthetic",
            )
        )
    return matrices, clinical
