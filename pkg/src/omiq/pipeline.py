"""File-based pipeline stages.

Each stage reads declared input files, writes declared output files plus
a JSON manifest (stage name, seed, config snapshot, sha256 of every
input and output), and nothing else. Stages are pure functions of their
inputs: rerunning a stage with the same inputs and config reproduces its
outputs byte for byte.

Stage order: synth -> ingest -> engineer -> select -> integrate ->
train -> evaluate -> report.
"""

from __future__ import annotations

import hashlib
import json
import math
import os

import numpy as np

from omiq import baselines, cluster, metrics, qnn, report, selection, stats
from omiq.errors import OmiqValidationError
from omiq.omics import (
    OMIC_KINDS,
    OMIC_PREFIXES,
    SyntheticSpec,
    drop_nonpositive_features,
    generate_synthetic_cohort,
    join_clinical,
    intersect_and_join,
    parse_clinical_table,
    parse_labeled_dataset,
    parse_omic_matrix,
    subsample_features,
    train_test_split,
    write_clinical_table,
    write_labeled_dataset,
    write_omic_matrix,
)
from omiq.trees import DecisionTree, RandomForest

OMIC_FILE_KEYS = {"DNAme": "dname", "RNAseq": "rnaseq", "miRNAseq": "mirnaseq"}

MODEL_CHOICES = ("qnn256", "qnn64", "qnn32", "lr", "mlp", "rf")

DEFAULT_CONFIG = {
    "out_dir": "out",
    "seed": 42,
    "test_fraction": 0.2,
    "t_test_mode": "welch",
    "alpha": 0.05,
    "model": "qnn256",
    "synth": {
        "n_per_class": 150,
        "features_per_omic": {"DNAme": 400, "RNAseq": 400, "miRNAseq": 200},
        "informative_fraction": 0.2,
        "effect_size": 2.0,
        "noise_sd": 1.0,
        "base_mean": 5.0,
    },
    # null input paths mean "use the synth stage outputs in out_dir"
    "inputs": {"DNAme": None, "RNAseq": None, "miRNAseq": None},
    "clinical": None,
    # p-value rank windows (low, high, max_count) per omic
    "scheme": {
        "DNAme": [[0.0, 0.05, 10], [0.0, 0.05, 25], [0.05, 1.0, 50]],
        "RNAseq": [[0.0, 0.05, 20], [0.0, 0.05, 32], [0.05, 1.0, 34]],
        "miRNAseq": [[0.0, 0.05, 35], [0.05, 1.0, 51]],
    },
    # final per-omic feature counts after selection
    "targets": {"DNAme": 85, "RNAseq": 86, "miRNAseq": 85},
    "select_k_fraction": 0.6,
    "select_bins": 10,
    "pca_components": 3,
    "rf_score_trees": 100,
    "auc_threshold": 0.80,
    "auc_trees": 250,
    "auc_max_depth": 3,
    "cluster_criterion": "distance",
    "cluster_value": 3.5,
    "qnn": {
        "depth": 5,
        "learning_rate": 0.01,
        "batch_size": 16,
        "epochs": 30,
        "seed": 0,
        "val_fraction": 0.2,
        "split_seed": 42,
    },
    "baseline": {
        "lr_C": 0.1,
        "mlp_hidden": 64,
        "mlp_epochs": 200,
        "rf_trees": 250,
    },
    "report_top_n": 32,
    "deviation_top_n": 40,
}


def _merge(base, override):
    out = dict(base)
    for key, value in override.items():
        if key not in base:
            raise OmiqValidationError(f"unknown config key {key!r}")
        if isinstance(base[key], dict) and isinstance(value, dict):
            out[key] = _merge(base[key], value)
        else:
            out[key] = value
    return out


class PipelineConfig:
    """Validated configuration; see DEFAULT_CONFIG for the full key set."""

    def __init__(self, overrides=None):
        self._data = _merge(DEFAULT_CONFIG, overrides or {})
        if self._data["model"] not in MODEL_CHOICES:
            raise OmiqValidationError(f"unknown model {self._data['model']!r}")
        if not 0 < self._data["test_fraction"] < 1:
            raise OmiqValidationError("test_fraction must be in (0, 1)")
        for kind in self._data["scheme"]:
            if kind not in OMIC_KINDS:
                raise OmiqValidationError(f"unknown omic kind {kind!r} in scheme")

    @classmethod
    def from_file(cls, path):
        with open(path, encoding="utf-8") as fh:
            return cls(json.load(fh))

    def __getitem__(self, key):
        return self._data[key]

    def to_dict(self):
        return json.loads(json.dumps(self._data))

    @property
    def out_dir(self):
        return self._data["out_dir"]

    def override(self, **kwargs):
        for key, value in kwargs.items():
            if value is not None:
                self._data[key] = value
        return self


# ---------------------------------------------------------------------------
# Artifact plumbing
# ---------------------------------------------------------------------------

def _sha256(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _write_manifest(cfg, stage, inputs, outputs, extra=None):
    path = os.path.join(cfg.out_dir, f"manifest_{stage}.json")
    payload = {
        "stage": stage,
        "seed": cfg["seed"],
        "config": cfg.to_dict(),
        "inputs": {os.path.basename(p): _sha256(p) for p in inputs},
        "outputs": {os.path.basename(p): _sha256(p) for p in outputs},
        "extra": extra or {},
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=1, sort_keys=True)
        fh.write("\n")
    return path


def _out(cfg, name):
    os.makedirs(cfg.out_dir, exist_ok=True)
    return os.path.join(cfg.out_dir, name)


def _input_matrix_path(cfg, kind):
    configured = cfg["inputs"].get(kind)
    if configured:
        return configured
    return os.path.join(cfg.out_dir, f"raw_{OMIC_FILE_KEYS[kind]}.tsv")


def _clinical_path(cfg):
    return cfg["clinical"] or os.path.join(cfg.out_dir, "clinical.tsv")


def _dataset_path(cfg, kind):
    return os.path.join(cfg.out_dir, f"dataset_{OMIC_FILE_KEYS[kind]}.tsv")


def _active_kinds(cfg):
    return [k for k in OMIC_KINDS if k in cfg["scheme"]]


def _write_feature_list(feature_ids, path):
    with open(path, "w", encoding="utf-8") as fh:
        for fid in feature_ids:
            fh.write(fid + "\n")


def _read_feature_list(path):
    with open(path, encoding="utf-8") as fh:
        return [line.rstrip("\n") for line in fh if line.strip()]


# ---------------------------------------------------------------------------
# Stages
# ---------------------------------------------------------------------------

def cmd_synth(cfg):
    s = cfg["synth"]
    spec = SyntheticSpec(
        n_per_class=s["n_per_class"],
        features_per_omic=dict(s["features_per_omic"]),
        informative_fraction=s["informative_fraction"],
        effect_size=s["effect_size"],
        noise_sd=s["noise_sd"],
        base_mean=s["base_mean"],
    )
    matrices, clinical = generate_synthetic_cohort(spec, cfg["seed"])
    outputs = []
    for m in matrices:
        path = _out(cfg, f"raw_{OMIC_FILE_KEYS[m.omic_kind]}.tsv")
        write_omic_matrix(m, path)
        outputs.append(path)
    clin_path = _out(cfg, "clinical.tsv")
    write_clinical_table(clinical, clin_path)
    outputs.append(clin_path)
    return _write_manifest(cfg, "synth", [], outputs)


def cmd_ingest(cfg):
    clin_path = _clinical_path(cfg)
    clinical = parse_clinical_table(clin_path)
    inputs = [clin_path]
    outputs = []
    counts = {}
    for kind in _active_kinds(cfg):
        raw_path = _input_matrix_path(cfg, kind)
        inputs.append(raw_path)
        matrix = drop_nonpositive_features(parse_omic_matrix(raw_path, kind))
        dataset = join_clinical(matrix, clinical)
        path = _out(cfg, f"dataset_{OMIC_FILE_KEYS[kind]}.tsv")
        write_labeled_dataset(dataset, path)
        outputs.append(path)
        counts[kind] = {"samples": dataset.n_samples, "features": dataset.n_features}
    return _write_manifest(cfg, "ingest", inputs, outputs, {"counts": counts})


def cmd_engineer(cfg):
    """Per-omic t statistics on the training split, then p-value windows."""
    inputs, outputs = [], []
    subset_counts = {}
    for kind in _active_kinds(cfg):
        ds_path = _dataset_path(cfg, kind)
        inputs.append(ds_path)
        dataset = parse_labeled_dataset(ds_path)
        train, _ = train_test_split(dataset, cfg["test_fraction"], cfg["seed"])
        feature_stats = stats.t_statistic(train, mode=cfg["t_test_mode"])
        stats_path = _out(cfg, f"stats_{OMIC_FILE_KEYS[kind]}.tsv")
        stats.write_feature_stats(feature_stats, stats_path)
        outputs.append(stats_path)
        scheme = [tuple(row) for row in cfg["scheme"][kind]]
        subsets = stats.split_by_pvalue(feature_stats, scheme)
        subset_counts[kind] = [len(s) for s in subsets]
        for i, subset in enumerate(subsets):
            path = _out(cfg, f"subset_{OMIC_FILE_KEYS[kind]}_{i}.txt")
            _write_feature_list(subset, path)
            outputs.append(path)
    return _write_manifest(
        cfg, "engineer", inputs, outputs, {"subset_counts": subset_counts}
    )


def _zscore_train_columns(train_values):
    mean = train_values.mean(axis=0)
    sd = train_values.std(axis=0, ddof=0)
    sd = np.where(sd > 0, sd, 1.0)
    return (train_values - mean) / sd


def _cluster_reduce(train, pool, criterion, value, target):
    """Shrink the kept pool to `target` features via Ward clustering.

    Columns are standardized with training statistics, clustered, and
    consumed round-robin across clusters in descending absolute-sum
    order, so every cluster contributes before any contributes twice.
    """
    if len(pool) <= target:
        return list(pool)
    sub = train.restrict_features(pool)
    xs = _zscore_train_columns(sub.values)
    labels = cluster.cut_tree(
        cluster.ward_linkage(cluster.pairwise_euclidean(xs)), criterion, value
    )
    col_mass = np.abs(xs).sum(axis=0)
    queues = {}
    for c in np.unique(labels):
        members = np.where(labels == c)[0]
        queues[int(c)] = sorted(members, key=lambda j: (-col_mass[j], pool[j]))
    chosen = []
    rank = 0
    while len(chosen) < target:
        took = False
        for c in sorted(queues):
            if rank < len(queues[c]) and len(chosen) < target:
                chosen.append(pool[queues[c][rank]])
                took = True
        if not took:
            break
        rank += 1
    return chosen


def _select_subset(cfg, train, test, subset_ids, max_count):
    """One subset through scoring, Venn, AUC filtering, and clustering."""
    sub_train = train.restrict_features(subset_ids)
    n = sub_train.n_features
    k = min(n, max(max_count, math.ceil(cfg["select_k_fraction"] * n)))
    tables = {
        "mutual_info": selection.mutual_info_scores(sub_train, bins=cfg["select_bins"]),
        "chi_square": selection.chi_square_scores(sub_train, bins=cfg["select_bins"]),
        "pca": selection.pca_feature_scores(
            sub_train, k_components=min(cfg["pca_components"], n)
        ),
        "random_forest": selection.rf_feature_importances(
            sub_train, n_trees=cfg["rf_score_trees"], seed=cfg["seed"]
        ),
    }
    per_method = {m: selection.select_k_best(t, k) for m, t in tables.items()}
    venn = selection.venn_partition(per_method)
    candidates = []
    for method in sorted(per_method):
        for fid in per_method[method]:
            if fid not in candidates:
                candidates.append(fid)
    kept = selection.auc_filter(
        train.restrict_features(candidates),
        test.restrict_features(candidates),
        candidates,
        threshold=cfg["auc_threshold"],
        n_trees=cfg["auc_trees"],
        seed=cfg["seed"],
        max_depth=cfg["auc_max_depth"],
    )
    target = min(max_count, n)
    pool = list(kept)
    if len(pool) < target:  # backfill from the score-ranked candidates
        pool += [c for c in candidates if c not in kept][: target - len(pool)]
    final = _cluster_reduce(
        train, pool, cfg["cluster_criterion"], cfg["cluster_value"], target
    )
    venn_counts = {
        "common": len(venn.common),
        "union": len(venn.unique),
        "uncommon": venn.uncommon_count,
        "auc_kept": len(kept),
    }
    return final, venn_counts


def cmd_select(cfg):
    inputs, outputs = [], []
    extra = {"per_omic_counts": {}, "venn": {}}
    for kind in _active_kinds(cfg):
        ds_path = _dataset_path(cfg, kind)
        inputs.append(ds_path)
        dataset = parse_labeled_dataset(ds_path)
        train, test = train_test_split(dataset, cfg["test_fraction"], cfg["seed"])
        selected = []
        total_auc_kept = 0
        for i, window in enumerate(cfg["scheme"][kind]):
            subset_path = os.path.join(
                cfg.out_dir, f"subset_{OMIC_FILE_KEYS[kind]}_{i}.txt"
            )
            inputs.append(subset_path)
            subset_ids = _read_feature_list(subset_path)
            if not subset_ids:
                raise OmiqValidationError(
                    f"{kind} window {i} is empty; loosen the p-value scheme"
                )
            final, venn_counts = _select_subset(
                cfg, train, test, subset_ids, int(window[2])
            )
            extra["venn"][f"{OMIC_FILE_KEYS[kind]}_{i}"] = venn_counts
            total_auc_kept += venn_counts["auc_kept"]
            selected += [f for f in final if f not in selected]
        if total_auc_kept == 0:
            raise OmiqValidationError(
                f"{kind}: AUC filter at threshold {cfg['auc_threshold']} "
                "kept no features in any window"
            )
        target = int(cfg["targets"][kind])
        if len(selected) < target:
            raise OmiqValidationError(
                f"{kind}: selected {len(selected)} features, target {target}"
            )
        selected = selected[:target]
        extra["per_omic_counts"][kind] = len(selected)
        path = _out(cfg, f"selected_{OMIC_FILE_KEYS[kind]}.txt")
        _write_feature_list(selected, path)
        outputs.append(path)
    return _write_manifest(cfg, "select", inputs, outputs, extra)


def cmd_integrate(cfg):
    inputs, datasets, prefixes = [], [], []
    for kind in _active_kinds(cfg):
        ds_path = _dataset_path(cfg, kind)
        sel_path = os.path.join(cfg.out_dir, f"selected_{OMIC_FILE_KEYS[kind]}.txt")
        inputs += [ds_path, sel_path]
        dataset = parse_labeled_dataset(ds_path)
        datasets.append(dataset.restrict_features(_read_feature_list(sel_path)))
        prefixes.append(OMIC_PREFIXES[kind])
    integrated = intersect_and_join(datasets, prefixes)
    path = _out(cfg, "integrated.tsv")
    write_labeled_dataset(integrated, path)
    return _write_manifest(
        cfg, "integrate", inputs, [path],
        {"width": integrated.n_features, "samples": integrated.n_samples},
    )


def _build_model(cfg, n_features):
    kind = cfg["model"]
    b = cfg["baseline"]
    if kind == "lr":
        return baselines.LogisticRegressionBaseline(C=b["lr_C"])
    if kind == "mlp":
        return baselines.MlpBaseline(
            hidden_width=b["mlp_hidden"], epochs=b["mlp_epochs"], seed=cfg["seed"]
        )
    if kind == "rf":
        return baselines.RandomForestBaseline(n_trees=b["rf_trees"], seed=cfg["seed"])
    q = cfg["qnn"]
    width = {"qnn256": 256, "qnn64": 64, "qnn32": 32}[kind]
    if n_features < width:
        raise OmiqValidationError(
            f"{kind} needs {width} features; integrated width is {n_features}"
        )
    return qnn.QnnClassifier(
        n_features=width,
        depth=q["depth"],
        dense_width=width,
        seed=q["seed"],
        learning_rate=q["learning_rate"],
        batch_size=q["batch_size"],
        epochs=q["epochs"],
        val_fraction=q["val_fraction"],
        split_seed=q["split_seed"],
    )


def _model_width(cfg):
    return {"qnn256": 256, "qnn64": 64, "qnn32": 32}.get(cfg["model"])


def _load_split(cfg):
    path = os.path.join(cfg.out_dir, "integrated.tsv")
    dataset = parse_labeled_dataset(path)
    width = _model_width(cfg)
    if width is not None and dataset.n_features > width:
        dataset = subsample_features(dataset, width, cfg["seed"])
    train, test = train_test_split(dataset, cfg["test_fraction"], cfg["seed"])
    return path, dataset, train, test


def _save_model(model, cfg, path):
    kind = cfg["model"]
    if kind.startswith("qnn"):
        qnn.save_checkpoint(model, path)
        return
    if kind == "lr":
        payload = {
            "kind": "lr",
            "scaler": {"mean": model.mean_.tolist(), "sd": model.sd_.tolist()},
            "coef": model.coef_.tolist(),
            "intercept": model.intercept_,
        }
    elif kind == "mlp":
        payload = {
            "kind": "mlp",
            "scaler": {"mean": model.mean_.tolist(), "sd": model.sd_.tolist()},
            "w1": model.w1_.tolist(),
            "b1": model.b1_.tolist(),
            "w2": model.w2_.tolist(),
            "b2": model.b2_,
            "hidden_width": model.hidden_width,
        }
    else:
        payload = {
            "kind": "rf",
            "n_features": model.n_features_,
            "criterion": model.criterion,
            "trees": [
                {
                    "feature": t._feature,
                    "threshold": [float(v) for v in t._threshold],
                    "left": t._left,
                    "right": t._right,
                    "prob": [float(v) for v in t._prob],
                }
                for t in model.forest_.trees_
            ],
        }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=1, sort_keys=True)
        fh.write("\n")


def _load_model(path):
    with open(path, encoding="utf-8") as fh:
        payload = json.load(fh)
    kind = payload.get("kind")
    if kind == "qnn":
        return qnn.load_checkpoint(path)
    if kind == "lr":
        model = baselines.LogisticRegressionBaseline()
        model.mean_ = np.asarray(payload["scaler"]["mean"], dtype=float)
        model.sd_ = np.asarray(payload["scaler"]["sd"], dtype=float)
        model.coef_ = np.asarray(payload["coef"], dtype=float)
        model.intercept_ = float(payload["intercept"])
        return model
    if kind == "mlp":
        model = baselines.MlpBaseline(hidden_width=payload["hidden_width"])
        model.mean_ = np.asarray(payload["scaler"]["mean"], dtype=float)
        model.sd_ = np.asarray(payload["scaler"]["sd"], dtype=float)
        model.w1_ = np.asarray(payload["w1"], dtype=float)
        model.b1_ = np.asarray(payload["b1"], dtype=float)
        model.w2_ = np.asarray(payload["w2"], dtype=float)
        model.b2_ = float(payload["b2"])
        return model
    if kind == "rf":
        model = baselines.RandomForestBaseline(criterion=payload["criterion"])
        model.n_features_ = int(payload["n_features"])
        forest = RandomForest(criterion=payload["criterion"])
        forest.trees_ = []
        for spec in payload["trees"]:
            tree = DecisionTree(criterion=payload["criterion"])
            tree.n_features_ = model.n_features_
            tree._feature = [int(v) for v in spec["feature"]]
            tree._threshold = spec["threshold"]
            tree._left = [int(v) for v in spec["left"]]
            tree._right = [int(v) for v in spec["right"]]
            tree._prob = spec["prob"]
            forest.trees_.append(tree)
        model.forest_ = forest
        return model
    raise OmiqValidationError(f"{path}: unrecognized model file")


def cmd_train(cfg):
    in_path, dataset, train, _ = _load_split(cfg)
    model = _build_model(cfg, dataset.n_features)
    model.fit(train.values, train.labels)
    model_path = _out(cfg, "model.json")
    _save_model(model, cfg, model_path)
    features_path = _out(cfg, "features_used.txt")
    _write_feature_list(dataset.feature_ids, features_path)
    outputs = [model_path, features_path]
    if cfg["model"].startswith("qnn"):
        history_path = _out(cfg, "history.tsv")
        qnn.write_history(model.history_, history_path)
        outputs.append(history_path)
    return _write_manifest(cfg, "train", [in_path], outputs)


def _split_metrics(model, split):
    probs = model.predict_proba(split.values)[:, 1]
    preds = (probs >= 0.5).astype(int)
    cm = metrics.confusion(split.labels, preds)
    scores = metrics.classification_scores(cm)
    return {
        "loss": qnn.bce_loss(probs, split.labels),
        "accuracy": scores.accuracy,
        "precision": scores.precision,
        "recall": scores.recall,
        "f1": scores.f1,
        "auc": metrics.roc_auc(split.labels, probs),
        "confusion": {"tp": cm.tp, "fp": cm.fp, "tn": cm.tn, "fn": cm.fn},
    }


def _roc_points(labels, scores):
    labels = np.asarray(labels)
    scores = np.asarray(scores, dtype=float)
    pos = max(int((labels == 1).sum()), 1)
    neg = max(int((labels == 0).sum()), 1)
    points = [(0.0, 0.0)]
    for thr in sorted(set(scores.tolist()), reverse=True):
        preds = scores >= thr
        tpr = float(np.sum(preds & (labels == 1))) / pos
        fpr = float(np.sum(preds & (labels == 0))) / neg
        points.append((fpr, tpr))
    if points[-1] != (1.0, 1.0):
        points.append((1.0, 1.0))
    return points


def cmd_evaluate(cfg):
    in_path, _, train, test = _load_split(cfg)
    model_path = os.path.join(cfg.out_dir, "model.json")
    model = _load_model(model_path)
    result = {
        "model": cfg["model"],
        "train": _split_metrics(model, train),
        "test": _split_metrics(model, test),
    }
    metrics_path = _out(cfg, "metrics.json")
    with open(metrics_path, "w", encoding="utf-8") as fh:
        json.dump(result, fh, indent=1, sort_keys=True)
        fh.write("\n")
    roc_path = _out(cfg, "roc_test.tsv")
    probs = model.predict_proba(test.values)[:, 1]
    with open(roc_path, "w", encoding="utf-8") as fh:
        fh.write("fpr\ttpr\n")
        for fpr, tpr in _roc_points(test.labels, probs):
            fh.write(f"{repr(fpr)}\t{repr(tpr)}\n")
    return _write_manifest(
        cfg, "evaluate", [in_path, model_path], [metrics_path, roc_path],
        {"test_accuracy": result["test"]["accuracy"]},
    )


def _model_importance(cfg, model, split):
    kind = cfg["model"]
    if kind.startswith("qnn"):
        return report.weight_importance(model, split.values, mode="gradient")
    if kind == "lr":
        return np.abs(model.coef_)
    if kind == "rf":
        return model.feature_importances_
    # finite differences of the model probability on raw inputs
    h = 1e-4
    X = split.values
    scores = np.zeros(X.shape[1])
    for j in range(X.shape[1]):
        plus, minus = X.copy(), X.copy()
        plus[:, j] += h
        minus[:, j] -= h
        diff = model.predict_proba(plus)[:, 1] - model.predict_proba(minus)[:, 1]
        scores[j] = float(np.mean(np.abs(diff))) / (2 * h)
    return scores


def _prefixed_pvalues(cfg, inputs):
    """feature_id (with omic prefix) -> p-value from the engineer stage."""
    p_values = {}
    for kind in _active_kinds(cfg):
        stats_path = os.path.join(cfg.out_dir, f"stats_{OMIC_FILE_KEYS[kind]}.tsv")
        if not os.path.exists(stats_path):
            continue
        inputs.append(stats_path)
        for s in stats.read_feature_stats(stats_path):
            p_values[OMIC_PREFIXES[kind] + s.feature_id] = s.p_value
    return p_values


def cmd_report(cfg):
    in_path, _, _, test = _load_split(cfg)
    model_path = os.path.join(cfg.out_dir, "model.json")
    model = _load_model(model_path)
    importance = _model_importance(cfg, model, test)
    inputs = [in_path, model_path]
    rows = report.make_rows(test, importance, _prefixed_pvalues(cfg, inputs))
    rows = rows[: cfg["report_top_n"]]
    report_path = _out(cfg, "feature_report.tsv")
    report.write_feature_report(rows, report_path)
    deviation = report.tp_tn_deviation_scores(model, test, cfg["deviation_top_n"])
    deviation_path = _out(cfg, "deviation_top.tsv")
    report.write_deviation_scores(deviation, deviation_path)
    levels_path = _out(cfg, "levels_top.tsv")
    report.write_level_profile(test, [r.feature_id for r in rows], levels_path)
    return _write_manifest(
        cfg, "report", inputs, [report_path, deviation_path, levels_path]
    )


STAGES = {
    "synth": cmd_synth,
    "ingest": cmd_ingest,
    "engineer": cmd_engineer,
    "select": cmd_select,
    "integrate": cmd_integrate,
    "train": cmd_train,
    "evaluate": cmd_evaluate,
    "report": cmd_report,
}


def run_stage(name, cfg):
    if name not in STAGES:
        raise OmiqValidationError(f"unknown stage {name!r}")
    return STAGES[name](cfg)


def run_all(cfg):
    return [run_stage(name, cfg) for name in STAGES]
