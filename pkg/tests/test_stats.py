import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from omiq.errors import OmiqValidationError
from omiq.stats import (
    FeatureStats,
    column_means,
    p_value,
    read_feature_stats,
    split_by_pvalue,
    t_statistic,
    write_feature_stats,
)
from tests.conftest import make_dataset


def two_class(values0, values1):
    """One-feature dataset from per-class value lists."""
    vals = np.array(values0 + values1, dtype=float).reshape(-1, 1)
    labels = [0] * len(values0) + [1] * len(values1)
    return make_dataset(vals, labels)


class TestColumnMeans:
    def test_simple(self):
        d = two_class([2.0, 4.0], [10.0, 20.0])
        assert column_means(d, 0)[0] == 3.0
        assert column_means(d, 1)[0] == 15.0

    def test_single_sample(self):
        d = two_class([7.0], [1.0, 2.0])
        assert column_means(d, 0)[0] == 7.0

    def test_empty_class(self):
        d = make_dataset([[1.0], [2.0]], [1, 1])
        with pytest.raises(OmiqValidationError):
            column_means(d, 0)


class TestTStatistic:
    def test_identical_means_zero(self):
        d = two_class([1.0, 2.0, 3.0], [3.0, 2.0, 1.0])
        for mode in ("sumsd", "welch"):
            assert t_statistic(d, mode=mode)[0].t_stat == 0.0

    def test_sumsd_hand_case(self):
        d = two_class([1.0, 2.0, 3.0], [4.0, 5.0, 6.0])
        s = t_statistic(d, mode="sumsd")[0]
        assert s.t_stat == pytest.approx(-1.5, abs=1e-12)
        assert s.mean_lusc == 2.0 and s.mean_luad == 5.0
        assert s.sd_lusc == pytest.approx(1.0) and s.sd_luad == pytest.approx(1.0)

    def test_welch_hand_case(self):
        d = two_class([1.0, 2.0, 3.0], [4.0, 5.0, 6.0])
        s = t_statistic(d, mode="welch")[0]
        assert s.t_stat == pytest.approx(-3.0 / math.sqrt(2.0 / 3.0), rel=1e-12)

    def test_zero_denominator(self):
        d = two_class([1.0, 1.0], [2.0, 2.0])
        s = t_statistic(d, mode="sumsd")[0]
        assert s.t_stat == -math.inf and s.p_value == 0.0
        d2 = two_class([1.0, 1.0], [1.0, 1.0])
        s2 = t_statistic(d2, mode="sumsd")[0]
        assert s2.t_stat == 0.0 and s2.p_value == 1.0

    def test_welch_label_swap_negates(self):
        rng = np.random.default_rng(0)
        vals = rng.standard_normal((20, 4)) + 1.0
        labels = np.array([0] * 12 + [1] * 8)
        a = t_statistic(make_dataset(vals, labels), mode="welch")
        b = t_statistic(make_dataset(vals, 1 - labels), mode="welch")
        for sa, sb in zip(a, b):
            assert sa.t_stat == pytest.approx(-sb.t_stat, rel=1e-12)
            assert sa.p_value == pytest.approx(sb.p_value, rel=1e-12)


def _t_density(x, df):
    return (
        math.gamma((df + 1) / 2)
        / (math.sqrt(df * math.pi) * math.gamma(df / 2))
        * (1 + x * x / df) ** (-(df + 1) / 2)
    )


def quad_p_value(t, df):
    """Two-sided tail mass by adaptive quadrature of the t density."""
    from scipy.integrate import quad

    tail, _ = quad(_t_density, abs(t), math.inf, args=(df,))
    return 2 * tail


class TestPValue:
    def test_t_zero(self):
        assert p_value(0.0, 10) == pytest.approx(1.0, abs=1e-14)

    def test_symmetry(self):
        assert p_value(1.7, 8) == pytest.approx(p_value(-1.7, 8), rel=1e-14)

    def test_quadrature_oracle(self):
        for t, df in [(2.0, 10), (0.5, 3), (4.2, 25), (1.0, 1), (3.3, 7.5)]:
            assert p_value(t, df) == pytest.approx(quad_p_value(t, df), abs=1e-8)

    def test_invalid_df(self):
        with pytest.raises(OmiqValidationError):
            p_value(1.0, 0)

    @given(
        t1=st.floats(-5, 5),
        t2=st.floats(-5, 5),
        df=st.floats(1, 50),
    )
    @settings(max_examples=100, deadline=None)
    def test_monotone_in_abs_t(self, t1, t2, df):
        if abs(t1) < abs(t2):
            assert p_value(t1, df) >= p_value(t2, df) - 1e-12


def fs(fid, p):
    return FeatureStats(fid, 0, 0, 1, 1, 0, p)


class TestSplitByPvalue:
    def test_forced_rule(self):
        stats = [fs("a", 0.01), fs("b", 0.02), fs("c", 0.6), fs("d", 0.9)]
        subsets = split_by_pvalue(stats, [(0.0, 0.05, 2), (0.05, 1.0, 2)])
        assert subsets == [["a", "b"], ["c", "d"]]

    def test_rank_windows_consume_sequentially(self):
        stats = [fs(f"f{i}", 0.001 * (i + 1)) for i in range(6)]
        subsets = split_by_pvalue(stats, [(0.0, 0.05, 2), (0.0, 0.05, 3)])
        assert subsets == [["f0", "f1"], ["f2", "f3", "f4"]]

    def test_empty_range(self):
        subsets = split_by_pvalue([fs("a", 0.5)], [(0.0, 0.05, 3), (0.05, 1.0, 0)])
        assert subsets == [[], []]

    def test_disjoint_and_stable(self):
        rng = np.random.default_rng(4)
        stats = [fs(f"f{i:02d}", float(rng.uniform())) for i in range(30)]
        scheme = [(0.0, 0.05, 5), (0.0, 0.5, 10), (0.5, 1.0, 10)]
        a = split_by_pvalue(stats, scheme)
        b = split_by_pvalue(stats, scheme)
        assert a == b
        flat = [f for sub in a for f in sub]
        assert len(flat) == len(set(flat))

    def test_invalid_range(self):
        with pytest.raises(OmiqValidationError):
            split_by_pvalue([], [(0.5, 0.1, 3)])


class TestStatsIO:
    def test_roundtrip(self, tmp_path):
        d = two_class([1.0, 2.5, 3.25], [4.125, 5.0, 6.5])
        stats = t_statistic(d, mode="welch")
        path = tmp_path / "stats.tsv"
        write_feature_stats(stats, path)
        back = read_feature_stats(path)
        assert back == stats


class TestRankEquivalence:
    def test_p_rank_equals_abs_t_rank(self):
        rng = np.random.default_rng(11)
        vals = rng.standard_normal((40, 10))
        vals[20:, :3] += 0.8
        d = make_dataset(vals, [0] * 20 + [1] * 20)
        stats = t_statistic(d, mode="welch")
        by_p = sorted(stats, key=lambda s: s.p_value)
        by_t = sorted(stats, key=lambda s: -abs(s.t_stat))
        assert [s.feature_id for s in by_p] == [s.feature_id for s in by_t]
