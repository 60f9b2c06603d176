"""Per-feature two-group statistics and p-value-based feature subsetting.

Two t-statistic modes are provided. Mode "sumsd" divides the mean
difference by the *sum* of the two sample standard deviations; mode
"welch" (default elsewhere in the pipeline) is the standard Welch
statistic with a Welch-Satterthwaite df. Sample sd uses denominator n-1.
Group 0 is LUSC, group 1 is LUAD; the statistic is mean(LUSC) - mean(LUAD)
over the denominator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.special import betainc

from omiq.errors import OmiqValidationError

T_MODES = ("sumsd", "welch")
DEFAULT_ALPHA = 0.05


@dataclass(frozen=True)
class FeatureStats:
    feature_id: str
    mean_lusc: float
    mean_luad: float
    sd_lusc: float
    sd_luad: float
    t_stat: float
    p_value: float


def column_means(d, cls):
    """Per-feature mean over samples of one class."""
    mask = d.labels == cls
    if not mask.any():
        raise OmiqValidationError(f"class {cls} has no samples")
    return d.values[mask].mean(axis=0)


def p_value(t, df):
    """Two-sided Student-t tail probability via the regularized incomplete beta."""
    if df <= 0:
        raise OmiqValidationError("df must be positive")
    if math.isinf(t):
        return 0.0
    if t == 0.0:
        return 1.0
    x = df / (df + t * t)
    return float(betainc(df / 2.0, 0.5, x))


def _welch_df(s0, s1, n0, n1):
    a = s0 * s0 / n0
    b = s1 * s1 / n1
    denom = a * a / (n0 - 1) + b * b / (n1 - 1)
    if denom == 0.0:
        return float(n0 + n1 - 2)
    return (a + b) ** 2 / denom


def t_statistic(d, mode="welch"):
    """Per-feature two-group t statistics with p-values.

    Mode "sumsd" uses the sum of the two sample sds as denominator and
    df = n0 + n1 - 2 for p-values; mode "welch" uses the standard
    statistic with Welch-Satterthwaite df.
    """
    if mode not in T_MODES:
        raise OmiqValidationError(f"unknown t mode {mode!r}")
    mask0 = d.labels == 0
    mask1 = d.labels == 1
    n0, n1 = int(mask0.sum()), int(mask1.sum())
    if n0 < 2 or n1 < 2:
        raise OmiqValidationError("each class needs at least 2 samples")
    x0, x1 = d.values[mask0], d.values[mask1]
    m0, m1 = x0.mean(axis=0), x1.mean(axis=0)
    s0, s1 = x0.std(axis=0, ddof=1), x1.std(axis=0, ddof=1)
    out = []
    for j, fid in enumerate(d.feature_ids):
        num = m0[j] - m1[j]
        if mode == "sumsd":
            denom = s0[j] + s1[j]
            df = float(n0 + n1 - 2)
        else:
            denom = math.sqrt(s0[j] ** 2 / n0 + s1[j] ** 2 / n1)
            df = _welch_df(s0[j], s1[j], n0, n1)
        if denom == 0.0:
            if num == 0.0:
                t, p = 0.0, 1.0
            else:
                t, p = math.copysign(math.inf, num), 0.0
        else:
            t = num / denom
            p = p_value(t, df)
        out.append(
            FeatureStats(
                feature_id=fid,
                mean_lusc=float(m0[j]),
                mean_luad=float(m1[j]),
                sd_lusc=float(s0[j]),
                sd_luad=float(s1[j]),
                t_stat=float(t),
                p_value=float(p),
            )
        )
    return out


def split_by_pvalue(stats, scheme):
    """Partition features into p-value rank windows.

    Features are sorted ascending by (p_value, feature_id) and consumed
    sequentially: each (low, high, max_count) entry takes up to max_count
    not-yet-assigned features with p in (low, high]. Entries may repeat
    the same range to emulate consecutive rank windows.
    """
    for low, high, max_count in scheme:
        if not (0.0 <= low < high <= 1.0):
            raise OmiqValidationError(f"invalid p-value range ({low}, {high}]")
        if max_count < 0:
            raise OmiqValidationError("max_count must be non-negative")
    remaining = sorted(stats, key=lambda s: (s.p_value, s.feature_id))
    subsets = []
    for low, high, max_count in scheme:
        taken, rest = [], []
        for s in remaining:
            in_range = (s.p_value > low or (low == 0.0 and s.p_value == 0.0)) and (
                s.p_value <= high
            )
            if in_range and len(taken) < max_count:
                taken.append(s.feature_id)
            else:
                rest.append(s)
        subsets.append(taken)
        remaining = rest
    return subsets


def write_feature_stats(stats, path):
    """TSV with one row per feature, columns in FeatureStats field order."""
    cols = ["feature_id", "mean_lusc", "mean_luad", "sd_lusc", "sd_luad", "t_stat", "p_value"]
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\t".join(cols) + "\n")
        for s in stats:
            fh.write(
                "\t".join(
                    [s.feature_id]
                    + [repr(float(getattr(s, c))) for c in cols[1:]]
                )
                + "\n"
            )


def read_feature_stats(path):
    stats = []
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n").split("\t")
        if header[0] != "feature_id":
            raise OmiqValidationError(f"{path}: not a feature-stats TSV")
        for line in fh:
            parts = line.rstrip("\n").split("\t")
            stats.append(
                FeatureStats(
                    feature_id=parts[0],
                    mean_lusc=float(parts[1]),
                    mean_luad=float(parts[2]),
                    sd_lusc=float(parts[3]),
                    sd_luad=float(parts[4]),
                    t_stat=float(parts[5]),
                    p_value=float(parts[6]),
                )
            )
    return stats
