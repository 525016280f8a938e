"""Exploratory statistics: two-sample Kolmogorov-Smirnov test, Pearson
correlation matrices, per-class summaries and mean spectral signatures.

Conventions fixed here: population standard deviation; quartiles by inclusive
linear interpolation between order statistics; the KS p-value from the
asymptotic Kolmogorov distribution Q(lambda) = 2 * sum_k (-1)^(k-1)
exp(-2 k^2 lambda^2), truncated when terms drop below 1e-12.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bands import BAND_NAMES, CLASS_LABELS
from .errors import EmptySample, EmptySelection, TooFewSamples
from .records import Dataset

_SERIES_EPS = 1e-12
_SERIES_MAX_TERMS = 100_000


@dataclass(frozen=True)
class KsResult:
    d_statistic: float
    p_value: float
    n: int
    m: int


def kolmogorov_sf(lam: float) -> float:
    """Asymptotic survival function Q(lambda), clamped to [0, 1]."""
    if lam <= 0.0:
        return 1.0
    total = 0.0
    sign = 1.0
    for k in range(1, _SERIES_MAX_TERMS + 1):
        term = math.exp(-2.0 * k * k * lam * lam)
        if term < _SERIES_EPS:
            break
        total += sign * term
        sign = -sign
    return min(1.0, max(0.0, 2.0 * total))


def ks_two_sample(xs, ys) -> KsResult:
    """Two-sample KS test; NaNs (undefined index values) are ignored."""
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    xs = np.sort(xs[~np.isnan(xs)])
    ys = np.sort(ys[~np.isnan(ys)])
    n, m = xs.size, ys.size
    if n == 0 or m == 0:
        raise EmptySample("both samples must be nonempty")
    pooled = np.concatenate([xs, ys])
    cdf_x = np.searchsorted(xs, pooled, side="right") / n
    cdf_y = np.searchsorted(ys, pooled, side="right") / m
    d = float(np.max(np.abs(cdf_x - cdf_y)))
    lam = d * math.sqrt(n * m / (n + m))
    return KsResult(d_statistic=d, p_value=kolmogorov_sf(lam), n=n, m=m)


@dataclass(frozen=True)
class CorrelationMatrix:
    features: tuple[str, ...]
    matrix: np.ndarray
    constant_features: tuple[str, ...] = ()

    def r(self, f1: str, f2: str) -> float:
        i = self.features.index(f1)
        j = self.features.index(f2)
        return float(self.matrix[i, j])

    def to_json(self) -> dict:
        return {
            "features": list(self.features),
            "matrix": [[float(v) for v in row] for row in self.matrix],
            "constant_features": list(self.constant_features),
        }


def pearson_matrix(dataset: Dataset, features, class_filter: str | None = None) -> CorrelationMatrix:
    """Pearson r for every feature pair, over rows where both are defined.

    Zero-variance columns are flagged and get r = 0 against everything, so
    downstream consumers never see NaN.
    """
    M = dataset.feature_matrix(features)
    if class_filter is not None:
        M = M[np.asarray(dataset.labels) == class_filter]
    n, F = M.shape
    if n < 2:
        raise TooFewSamples(f"need >= 2 records, have {n}")
    defined = ~np.isnan(M)
    out = np.eye(F)
    constant = []
    col_const = np.zeros(F, dtype=bool)
    for i in range(F):
        vals = M[defined[:, i], i]
        if vals.size == 0 or np.all(vals == vals[0]):
            col_const[i] = True
            constant.append(features[i])
    all_defined = bool(defined.all())
    if all_defined:
        mean = M.mean(axis=0)
        centered = M - mean
        norms = np.sqrt((centered**2).sum(axis=0))
    for i in range(F):
        for j in range(i + 1, F):
            if col_const[i] or col_const[j]:
                r = 0.0
            elif all_defined:
                r = float(centered[:, i] @ centered[:, j] / (norms[i] * norms[j]))
            else:
                mask = defined[:, i] & defined[:, j]
                x, y = M[mask, i], M[mask, j]
                if x.size < 2 or np.all(x == x[0]) or np.all(y == y[0]):
                    r = 0.0
                else:
                    xc, yc = x - x.mean(), y - y.mean()
                    r = float(xc @ yc / math.sqrt((xc @ xc) * (yc @ yc)))
            r = min(1.0, max(-1.0, r))
            out[i, j] = out[j, i] = r
    return CorrelationMatrix(tuple(features), out, tuple(constant))


@dataclass(frozen=True)
class FeatureSummary:
    mean: float
    std: float
    min: float
    q1: float
    median: float
    q3: float
    max: float

    def to_json(self) -> dict:
        return {
            "mean": self.mean,
            "std": self.std,
            "min": self.min,
            "q1": self.q1,
            "median": self.median,
            "q3": self.q3,
            "max": self.max,
        }


@dataclass(frozen=True)
class ClassSummary:
    classes: dict[str, dict[str, FeatureSummary | None]]
    skipped: tuple[str, ...] = ()

    def to_json(self) -> dict:
        return {
            "classes": {
                label: {
                    f: (None if s is None else s.to_json()) for f, s in feats.items()
                }
                for label, feats in self.classes.items()
            },
            "skipped": list(self.skipped),
        }


def class_summary(dataset: Dataset, features) -> ClassSummary:
    """Location/spread/quartiles per class per feature (defined values only)."""
    if len(dataset) == 0:
        raise TooFewSamples("empty dataset")
    M = dataset.feature_matrix(features)
    labels = np.asarray(dataset.labels)
    classes: dict[str, dict[str, FeatureSummary | None]] = {}
    skipped = []
    for label in CLASS_LABELS:
        mask = labels == label
        if not mask.any():
            skipped.append(label)
            continue
        sub = M[mask]
        per_feature: dict[str, FeatureSummary | None] = {}
        for j, f in enumerate(features):
            vals = sub[:, j]
            vals = vals[~np.isnan(vals)]
            if vals.size == 0:
                per_feature[f] = None
                continue
            q1, med, q3 = np.percentile(vals, [25.0, 50.0, 75.0])
            per_feature[f] = FeatureSummary(
                mean=float(vals.mean()),
                std=float(vals.std()),
                min=float(vals.min()),
                q1=float(q1),
                median=float(med),
                q3=float(q3),
                max=float(vals.max()),
            )
        classes[label] = per_feature
    return ClassSummary(classes=classes, skipped=tuple(skipped))


def mean_signature(
    dataset: Dataset, label: str, min_coverage_pct: float | None = None
) -> dict[str, float]:
    """Per-band mean over records of `label`.

    The coverage filter applies only to Plastic/Wood; partial-coverage records
    (unknown percentage) cannot satisfy a threshold and are excluded by it.
    """
    mask = np.asarray(dataset.labels) == label
    if min_coverage_pct is not None and label in ("Plastic", "Wood"):
        with np.errstate(invalid="ignore"):
            mask &= ~dataset.coverage_partial & (dataset.coverage_pct >= min_coverage_pct)
    if not mask.any():
        raise EmptySelection(f"no {label} records after filtering")
    means = dataset.bands[mask].mean(axis=0)
    return {name: float(v) for name, v in zip(BAND_NAMES, means)}
