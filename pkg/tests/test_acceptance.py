"""Acceptance gate: ten end-to-end criteria with pinned tolerances.

Each test prints one PASS line on success (run with -s to see them all).
The heavy cases (gradient sweep, training run, full-scale selection) are
sized exactly as pinned below and carry explicit wall-clock budgets.
"""

import hashlib
import json
import math
import os
import shutil
import time
from fractions import Fraction

import numpy as np
import pytest

from omiq import qnn
from omiq.baselines import LogisticRegressionBaseline
from omiq.cluster import ward_linkage
from omiq.metrics import ConfusionMatrix, classification_scores, roc_auc
from omiq.omics import train_test_split
from omiq.pipeline import STAGES, PipelineConfig, run_stage
from omiq.selection import chi_square_table, mutual_information_table
from omiq.simulator import (
    RotParams,
    Statevector,
    amplitude_encode,
    apply_ansatz_layer,
    apply_cz,
    apply_rot,
)
from tests.conftest import separable_cohort
from tests.test_cluster import condensed_from_points, naive_ward
from tests.test_metrics import pair_count_auc
from tests.test_selection import chi2_oracle, mi_oracle
from tests.test_simulator import cz_matrix, embed_single, random_state, rot_matrix


def test_criterion_1_simulator_soundness():
    start = time.perf_counter()
    rng = np.random.default_rng(101)
    for _ in range(1000):
        n = int(rng.integers(1, 9))
        layers = int(rng.integers(1, 6))
        s = random_state(n, rng)
        for _ in range(layers):
            params = [RotParams(*rng.uniform(-math.pi, math.pi, 3)) for _ in range(n)]
            s = apply_ansatz_layer(s, params)
        norm = float(np.sum(np.abs(s.amplitudes) ** 2))
        assert abs(norm - 1.0) <= 1e-12
    for _ in range(50):
        n = int(rng.integers(1, 6))
        s = random_state(n, rng)
        q = int(rng.integers(0, n))
        angles = rng.uniform(-math.pi, math.pi, 3)
        got = apply_rot(s, q, RotParams(*angles)).amplitudes
        want = embed_single(rot_matrix(*angles), q, n) @ s.amplitudes
        assert np.max(np.abs(got - want)) <= 1e-12
        if n >= 2:
            q2 = int(rng.integers(0, n - 1))
            got = apply_cz(s, q2, q2 + 1).amplitudes
            want = cz_matrix(q2, q2 + 1, n) @ s.amplitudes
            assert np.max(np.abs(got - want)) <= 1e-12
    elapsed = time.perf_counter() - start
    assert elapsed < 5.0
    print(f"PASS: criterion 1 — 1000 random circuits norm-preserving and "
          f"rot/cz match dense oracle within 1e-12 ({elapsed:.2f}s)")


def test_criterion_2_encoding_fidelity():
    start = time.perf_counter()
    rng = np.random.default_rng(102)
    for _ in range(500):
        for length in (32, 64, 256):
            x = rng.standard_normal(length)
            s = amplitude_encode(x)
            expected = x**2 / np.sum(x**2)
            assert np.max(np.abs(s.probabilities() - expected)) <= 1e-12
    elapsed = time.perf_counter() - start
    assert elapsed < 1.0
    print(f"PASS: criterion 2 — 500 random vectors per length in (32, 64, 256) "
          f"encode to squared-normalized probabilities within 1e-12 ({elapsed:.2f}s)")


def test_criterion_3_gradient_correctness():
    start = time.perf_counter()
    rng = np.random.default_rng(103)
    h = 1e-5
    worst = 0.0
    for trial in range(200):
        cfg = qnn.QnnConfig(n_features=32, depth=3, dense_width=4, seed=trial)
        params = qnn.init_params(cfg)
        X = rng.standard_normal((2, 32))
        y = rng.integers(0, 2, 2).astype(float)
        g = qnn.gradients(cfg, params, X, y)
        for key in params:
            flat = (params[key].reshape(-1) if params[key].ndim
                    else params[key].reshape(1))
            gflat = np.asarray(g[key]).reshape(-1)
            for i in range(flat.size):
                orig = flat[i]
                flat[i] = orig + h
                lp = qnn.bce_loss(qnn.forward_batch(cfg, params, X), y)
                flat[i] = orig - h
                lm = qnn.bce_loss(qnn.forward_batch(cfg, params, X), y)
                flat[i] = orig
                fd = (lp - lm) / (2 * h)
                err = abs(gflat[i] - fd)
                tol = max(1e-7, 1e-5 * abs(fd))
                assert err <= tol, f"{key}[{i}]: {gflat[i]} vs FD {fd}"
                worst = max(worst, err / tol)
    elapsed = time.perf_counter() - start
    assert elapsed < 120.0
    print(f"PASS: criterion 3 — 200 random 5-qubit depth-3 instances match "
          f"finite differences within 1e-5 rel / 1e-7 abs "
          f"(worst error at {worst:.1e} of tolerance, {elapsed:.1f}s)")


def test_criterion_4_training_capability():
    start = time.perf_counter()
    d = separable_cohort(n_per_class=300, n_features=32, n_informative=7,
                         effect=2.0, seed=42)
    train, test = train_test_split(d, 0.2, 42)
    clf = qnn.QnnClassifier(n_features=32, depth=5, dense_width=32, seed=0,
                            learning_rate=0.01, batch_size=16, epochs=20)
    clf.fit(train.values, train.labels)
    qnn_acc = float(np.mean(clf.predict(test.values) == test.labels))
    lr = LogisticRegressionBaseline(C=0.1).fit(train.values, train.labels)
    lr_acc = float(np.mean(lr.predict(test.values) == test.labels))
    elapsed = time.perf_counter() - start
    assert qnn_acc >= 0.90
    assert qnn_acc >= lr_acc - 0.02
    assert elapsed < 300.0
    print(f"PASS: criterion 4 — 32-feature variational classifier on the "
          f"600-sample separable cohort: test accuracy {qnn_acc:.4f} >= 0.90 "
          f"and >= logistic baseline {lr_acc:.4f} - 0.02 ({elapsed:.1f}s)")


def test_criterion_5_pipeline_shape(tmp_path):
    out_dir = str(tmp_path / "out")
    cfg = PipelineConfig({
        "out_dir": out_dir,
        "synth": {
            "n_per_class": 500,
            "features_per_omic": {"DNAme": 5000, "RNAseq": 5000,
                                  "miRNAseq": 5000},
        },
    })
    for stage in ("synth", "ingest", "engineer"):
        run_stage(stage, cfg)
    start = time.perf_counter()
    run_stage("select", cfg)
    run_stage("integrate", cfg)
    elapsed = time.perf_counter() - start
    counts = {}
    for key in ("dname", "rnaseq", "mirnaseq"):
        with open(os.path.join(out_dir, f"selected_{key}.txt")) as fh:
            counts[key] = sum(1 for line in fh if line.strip())
    assert counts == {"dname": 85, "rnaseq": 86, "mirnaseq": 85}
    with open(os.path.join(out_dir, "integrated.tsv")) as fh:
        width = len(fh.readline().rstrip("\n").split("\t")) - 2
    assert width == 256
    assert elapsed < 600.0
    print(f"PASS: criterion 5 — selection on 1000 samples x 5000 features/omic "
          f"yields 85/86/85 features and integrated width 256 ({elapsed:.0f}s)")


def test_criterion_6_scorer_oracles():
    rng = np.random.default_rng(106)
    for _ in range(500):
        r = int(rng.integers(2, 6))
        c = int(rng.integers(2, 6))
        table = rng.integers(0, 30, (r, c)).astype(float)
        if table.sum() == 0:
            table[0, 0] = 1
        assert abs(mutual_information_table(table) - mi_oracle(table)) <= 1e-10
        assert abs(chi_square_table(table) - chi2_oracle(table)) <= 1e-10
    assert chi_square_table(np.array([[20.0, 0.0], [0.0, 20.0]])) == 40.0
    print("PASS: criterion 6 — MI and chi-square match exhaustive plug-in sums "
          "within 1e-10 on 500 random tables; chi2([[20,0],[0,20]]) == 40")


def test_criterion_7_clustering_oracle():
    rng = np.random.default_rng(107)
    for _ in range(100):
        n = int(rng.integers(2, 21))
        pts = rng.standard_normal((n, int(rng.integers(1, 4))))
        L = ward_linkage(condensed_from_points(pts))
        for mine, ref in zip(L.rows, naive_ward(list(pts))):
            assert (mine[0], mine[1], mine[3]) == (ref[0], ref[1], ref[3])
            assert abs(mine[2] - ref[2]) <= 1e-9
    L = ward_linkage(condensed_from_points([[0.0], [1.0], [10.0]]))
    assert L.rows[0][2] == pytest.approx(1.0, abs=1e-12)
    assert L.rows[1][2] == pytest.approx(19.0 / math.sqrt(3.0), abs=1e-12)
    print("PASS: criterion 7 — Ward linkage matches the O(n^3) naive oracle "
          "within 1e-9 on 100 instances (n <= 20); hand case {0,1,10} -> "
          "heights {1, 19/sqrt(3)}")


def test_criterion_8_auc_oracle():
    rng = np.random.default_rng(108)
    for _ in range(500):
        n = int(rng.integers(4, 40))
        labels = rng.integers(0, 2, n)
        if labels.min() == labels.max():
            labels[0] = 1 - labels[0]
        scores = np.round(rng.uniform(0, 1, n), 2)  # rounding forces ties
        assert roc_auc(labels, scores) == pair_count_auc(labels, scores)
    print("PASS: criterion 8 — rank-based AUC equals the exhaustive "
          "pair-counting oracle exactly (ties at 0.5) on 500 random sets")


def test_criterion_9_metric_formulas():
    rng = np.random.default_rng(109)
    for _ in range(50):
        tp, fp, tn, fn = (int(v) for v in rng.integers(0, 40, 4))
        if tp + fp + tn + fn == 0:
            tp = 1
        s = classification_scores(ConfusionMatrix(tp, fp, tn, fn))
        assert s.accuracy == float(Fraction(tp + tn, tp + fp + tn + fn))
        p = Fraction(tp, tp + fp) if tp + fp else Fraction(0)
        r = Fraction(tp, tp + fn) if tp + fn else Fraction(0)
        assert s.precision == float(p)
        assert s.recall == float(r)
        f1 = 2 * p * r / (p + r) if p + r else Fraction(0)
        assert s.f1 == float(f1)
    print("PASS: criterion 9 — classification scores equal exact rational "
          "values on 50 random confusion matrices")


def test_criterion_10_determinism(tmp_path):
    out_dir = str(tmp_path / "out")
    cfg = PipelineConfig({
        "out_dir": out_dir,
        "model": "qnn32",
        "synth": {
            "n_per_class": 50,
            "features_per_omic": {"DNAme": 100, "RNAseq": 100, "miRNAseq": 60},
        },
        "scheme": {
            "DNAme": [[0.0, 0.05, 4], [0.0, 0.05, 6], [0.05, 1.0, 8]],
            "RNAseq": [[0.0, 0.05, 5], [0.0, 0.05, 6], [0.05, 1.0, 8]],
            "miRNAseq": [[0.0, 0.05, 6], [0.05, 1.0, 8]],
        },
        "targets": {"DNAme": 10, "RNAseq": 12, "miRNAseq": 10},
        "auc_trees": 25,
        "qnn": {"epochs": 2},
        "report_top_n": 8,
        "deviation_top_n": 8,
    })

    def full_run():
        for stage in STAGES:
            run_stage(stage, cfg)
        digests = {}
        for name in sorted(os.listdir(out_dir)):
            with open(os.path.join(out_dir, name), "rb") as fh:
                digests[name] = hashlib.sha256(fh.read()).hexdigest()
        return digests

    first = full_run()
    shutil.rmtree(out_dir)
    second = full_run()
    assert first == second
    assert any(name.startswith("manifest_") for name in first)
    print(f"PASS: criterion 10 — two full pipeline runs produced byte-identical "
          f"manifests and outputs ({len(first)} files compared)")
