"""From-scratch K-Means (Lloyd's algorithm) with deterministic seeded
k-means++ initialisation, cluster-composition reporting and trend checks.

Determinism rules: nearest-centroid ties go to the lowest centroid index;
centroid updates sum rows in index order; an emptied cluster is reseeded to
the point currently farthest from its own centroid; initialisation draws from
a seeded generator via an explicit inverse-CDF, so a fixed (X, k, seed) always
yields the same model.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, DomainError, FeatureSetMismatch, TooFewRows
from .forest import FeatureSet
from .records import Dataset

_MONOTONE_EPS = 1e-9


@dataclass
class KMeansModel:
    k: int
    centroids: np.ndarray  # (k, d) float64
    inertia: float
    iterations: int
    seed: int
    tol: float
    feature_set: str | None = None
    inertia_history: list[float] = field(default_factory=list)
    degenerate: bool = False
    scale_mean: np.ndarray | None = None
    scale_std: np.ndarray | None = None

    @property
    def scaled(self) -> bool:
        return self.scale_mean is not None

    def to_json(self) -> dict:
        out = {
            "k": self.k,
            "centroids": [[float(v) for v in c] for c in self.centroids],
            "inertia": self.inertia,
            "iterations": self.iterations,
            "seed": self.seed,
            "tol": self.tol,
            "feature_set": self.feature_set,
            "inertia_history": [float(v) for v in self.inertia_history],
            "degenerate": self.degenerate,
            "scaled": self.scaled,
        }
        if self.scaled:
            out["scale_mean"] = [float(v) for v in self.scale_mean]
            out["scale_std"] = [float(v) for v in self.scale_std]
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "KMeansModel":
        return cls(
            k=int(obj["k"]),
            centroids=np.asarray(obj["centroids"], dtype=np.float64),
            inertia=float(obj["inertia"]),
            iterations=int(obj["iterations"]),
            seed=int(obj["seed"]),
            tol=float(obj["tol"]),
            feature_set=obj.get("feature_set"),
            inertia_history=[float(v) for v in obj.get("inertia_history", [])],
            degenerate=bool(obj.get("degenerate", False)),
            scale_mean=(
                np.asarray(obj["scale_mean"], dtype=np.float64) if obj.get("scaled") else None
            ),
            scale_std=(
                np.asarray(obj["scale_std"], dtype=np.float64) if obj.get("scaled") else None
            ),
        )


def _sq_dists(X: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    out = np.empty((X.shape[0], centroids.shape[0]), dtype=np.float64)
    for j in range(centroids.shape[0]):
        diff = X - centroids[j]
        out[:, j] = np.einsum("ij,ij->i", diff, diff)
    return out


def _init_plus_plus(X: np.ndarray, k: int, rng) -> tuple[np.ndarray, bool]:
    n = X.shape[0]
    centroids = np.empty((k, X.shape[1]), dtype=np.float64)
    centroids[0] = X[int(rng.integers(n))]
    degenerate = False
    diff = X - centroids[0]
    d2 = np.einsum("ij,ij->i", diff, diff)
    for j in range(1, k):
        total = float(d2.sum())
        if total <= 0.0:
            centroids[j:] = X[0]
            degenerate = True
            break
        cum = np.cumsum(d2)
        r = float(rng.random()) * total
        idx = int(np.searchsorted(cum, r, side="right"))
        idx = min(idx, n - 1)
        centroids[j] = X[idx]
        diff = X - centroids[j]
        d2 = np.minimum(d2, np.einsum("ij,ij->i", diff, diff))
    return centroids, degenerate


def kmeans_fit(
    X,
    k: int,
    seed: int,
    tol: float = 1e-6,
    max_iter: int = 300,
    feature_set: str | None = None,
) -> KMeansModel:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise DimensionMismatch("X must be 2-D")
    n = X.shape[0]
    if k < 1:
        raise DomainError("k must be >= 1")
    if n < k:
        raise TooFewRows(f"{n} rows < k={k}")
    if np.isnan(X).any():
        raise DomainError("X contains undefined values")

    rng = np.random.default_rng(seed)
    centroids, degenerate = _init_plus_plus(X, k, rng)
    history: list[float] = []
    iterations = 0
    for _ in range(max_iter):
        iterations += 1
        dists = _sq_dists(X, centroids)
        assign = np.argmin(dists, axis=1)
        min_d = dists[np.arange(n), assign]
        history.append(float(min_d.sum()))

        new_centroids = np.empty_like(centroids)
        counts = np.bincount(assign, minlength=k)
        for j in range(k):
            if counts[j]:
                new_centroids[j] = X[assign == j].sum(axis=0) / counts[j]
        empties = np.flatnonzero(counts == 0)
        if empties.size:
            spare = min_d.copy()
            for j in empties:
                p = int(np.argmax(spare))
                if spare[p] <= 0.0:
                    new_centroids[j] = X[0]
                    degenerate = True
                else:
                    new_centroids[j] = X[p]
                    spare[p] = -1.0

        shift = float(np.sqrt(((new_centroids - centroids) ** 2).sum(axis=1)).max())
        centroids = new_centroids
        if shift < tol:
            break

    dists = _sq_dists(X, centroids)
    assign = np.argmin(dists, axis=1)
    inertia = float(dists[np.arange(n), assign].sum())
    history.append(inertia)
    for a, b in zip(history, history[1:]):
        assert b <= a + _MONOTONE_EPS * max(1.0, abs(a)), "inertia increased"
    return KMeansModel(
        k=k,
        centroids=centroids,
        inertia=inertia,
        iterations=iterations,
        seed=seed,
        tol=tol,
        feature_set=feature_set,
        inertia_history=history,
        degenerate=degenerate,
    )


def assign_clusters(model: KMeansModel, X) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if X.shape[1] != model.centroids.shape[1]:
        raise DimensionMismatch(
            f"{X.shape[1]} features but model has {model.centroids.shape[1]}"
        )
    return np.argmin(_sq_dists(X, model.centroids), axis=1)


def kmeans_predict(model: KMeansModel, x) -> int:
    """Nearest centroid of a single vector; ties go to the lowest index."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1 or x.size != model.centroids.shape[1]:
        raise DimensionMismatch(f"expected a vector of size {model.centroids.shape[1]}")
    return int(assign_clusters(model, x[None, :])[0])


def coverage_bucket(coverage_pct: float, partial: bool) -> str | None:
    """Bucket a coverage percentage into {20, 40, 60, 80, 100, partial}."""
    if partial:
        return "partial"
    if math.isnan(coverage_pct):
        return None
    return str(min(100, int(math.ceil(coverage_pct / 20.0)) * 20))


@dataclass(frozen=True)
class ClusterStats:
    index: int
    size: int
    by_class: dict[str, int]
    by_polymer: dict[str, int]
    by_coverage: dict[str, int]
    by_scene_or_date: dict[str, int]

    def pct_breakdown(self, counts: dict[str, int]) -> dict[str, float]:
        total = sum(counts.values())
        if total == 0:
            return {}
        return {key: 100.0 * v / total for key, v in counts.items()}

    def to_json(self, dataset_size: int) -> dict:
        return {
            "index": self.index,
            "size": self.size,
            "pct_of_total": 100.0 * self.size / dataset_size if dataset_size else 0.0,
            "by_class": {
                "counts": dict(self.by_class),
                "pct_of_cluster": self.pct_breakdown(self.by_class),
            },
            "by_polymer": {
                "counts": dict(self.by_polymer),
                "pct_of_cluster": self.pct_breakdown(self.by_polymer),
            },
            "by_coverage": {
                "counts": dict(self.by_coverage),
                "pct_of_cluster": self.pct_breakdown(self.by_coverage),
            },
            "by_scene_or_date": {
                "counts": dict(self.by_scene_or_date),
                "pct_of_cluster": self.pct_breakdown(self.by_scene_or_date),
            },
        }


@dataclass(frozen=True)
class ClusterReport:
    feature_set: str
    k: int
    total: int
    clusters: tuple[ClusterStats, ...]

    def to_json(self) -> dict:
        return {
            "feature_set": self.feature_set,
            "k": self.k,
            "total": self.total,
            "clusters": [c.to_json(self.total) for c in self.clusters],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "ClusterReport":
        clusters = tuple(
            ClusterStats(
                index=int(c["index"]),
                size=int(c["size"]),
                by_class={m: int(v) for m, v in c["by_class"]["counts"].items()},
                by_polymer={m: int(v) for m, v in c["by_polymer"]["counts"].items()},
                by_coverage={m: int(v) for m, v in c["by_coverage"]["counts"].items()},
                by_scene_or_date={
                    m: int(v) for m, v in c["by_scene_or_date"]["counts"].items()
                },
            )
            for c in obj["clusters"]
        )
        return cls(
            feature_set=obj["feature_set"], k=int(obj["k"]), total=int(obj["total"]),
            clusters=clusters,
        )


def compose_report(model: KMeansModel, dataset: Dataset, features: FeatureSet) -> ClusterReport:
    """Per-cluster composition breakdowns for a fitted model."""
    if model.feature_set is not None and model.feature_set != features.id:
        raise FeatureSetMismatch(
            f"model fitted on set {model.feature_set!r}, report requested for {features.id!r}"
        )
    X = dataset.feature_matrix(features.features)
    if np.isnan(X).any():
        raise DomainError("undefined index values present; clean the dataset first")
    if model.scaled:
        X = (X - model.scale_mean) / model.scale_std
    assign = assign_clusters(model, X)

    labels = np.asarray(dataset.labels)
    polymers = np.asarray(dataset.polymers)
    scenes = np.asarray(dataset.scenes)
    buckets = np.array(
        [
            coverage_bucket(float(c), bool(p)) or ""
            for c, p in zip(dataset.coverage_pct, dataset.coverage_partial)
        ]
    )

    clusters = []
    for j in range(model.k):
        mask = assign == j
        clusters.append(
            ClusterStats(
                index=j,
                size=int(mask.sum()),
                by_class=_tally(labels[mask]),
                by_polymer=_tally(polymers[mask]),
                by_coverage=_tally(buckets[mask]),
                by_scene_or_date=_tally(scenes[mask]),
            )
        )
    return ClusterReport(
        feature_set=features.id, k=model.k, total=len(dataset), clusters=tuple(clusters)
    )


def _tally(values: np.ndarray) -> dict[str, int]:
    uniq, counts = np.unique(values, return_counts=True)
    return {str(u): int(c) for u, c in zip(uniq, counts) if str(u)}


@dataclass(frozen=True)
class TrendFlags:
    two_cluster_share: float
    low_coverage_absorbed: float
    polymer_affinity: dict[str, str]
    ldpe_isolation: bool
    water_sand_never_merged: bool
    per_report: tuple[dict, ...] = ()

    def to_json(self) -> dict:
        return {
            "two_cluster_share": self.two_cluster_share,
            "low_coverage_absorbed": self.low_coverage_absorbed,
            "polymer_affinity": dict(self.polymer_affinity),
            "ldpe_isolation": self.ldpe_isolation,
            "water_sand_never_merged": self.water_sand_never_merged,
            "per_report": [dict(p) for p in self.per_report],
        }


def _dominated_clusters(report: ClusterReport) -> tuple[int, int]:
    """(water-dominated, sand-dominated) cluster indices."""
    water_counts = [c.by_class.get("Water", 0) for c in report.clusters]
    sand_counts = [c.by_class.get("Sand", 0) for c in report.clusters]
    w = int(np.argmax(water_counts))
    s = int(np.argmax(sand_counts))
    if w == s:
        others = [(cnt, j) for j, cnt in enumerate(sand_counts) if j != w]
        s = max(others)[1] if others else w
    return w, s


def trend_checks(reports, dataset: Dataset) -> TrendFlags:
    """Aggregate the cluster-association trends over one or more reports.

    Shares aggregate as the minimum over reports (so the flag holds for every
    run); polymer tallies are summed across reports; the never-merged flag is
    the conjunction over all clusters of all reports.
    """
    reports = list(reports)
    shares, absorbed = [], []
    water_side: dict[str, int] = {}
    sand_side: dict[str, int] = {}
    outside: dict[str, int] = {}
    totals: dict[str, int] = {}
    never_merged = True
    per_report = []
    for rep in reports:
        sizes = sorted((c.size for c in rep.clusters), reverse=True)
        share = sum(sizes[:2]) / rep.total if rep.total else 0.0
        shares.append(share)
        w_dom, s_dom = _dominated_clusters(rep)
        dom = {w_dom, s_dom}

        low_total = 0
        low_in_dom = 0
        for c in rep.clusters:
            if c.by_class.get("Water", 0) > 0 and c.by_class.get("Sand", 0) > 0:
                never_merged = False
            low = sum(c.by_coverage.get(b, 0) for b in ("20", "40", "60"))
            low_total += low
            if c.index in dom:
                low_in_dom += low
            for poly, cnt in c.by_polymer.items():
                totals[poly] = totals.get(poly, 0) + cnt
                if c.index == w_dom:
                    water_side[poly] = water_side.get(poly, 0) + cnt
                elif c.index == s_dom:
                    sand_side[poly] = sand_side.get(poly, 0) + cnt
                else:
                    outside[poly] = outside.get(poly, 0) + cnt
        absorbed_frac = low_in_dom / low_total if low_total else 1.0
        absorbed.append(absorbed_frac)
        per_report.append(
            {
                "feature_set": rep.feature_set,
                "k": rep.k,
                "two_cluster_share": share,
                "low_coverage_absorbed": absorbed_frac,
                "water_dominated_cluster": w_dom,
                "sand_dominated_cluster": s_dom,
            }
        )

    affinity = {}
    for poly in sorted(totals):
        w = water_side.get(poly, 0)
        s = sand_side.get(poly, 0)
        affinity[poly] = "water" if w >= s else "sand"
    isolation = {
        poly: outside.get(poly, 0) / totals[poly] for poly in totals if totals[poly]
    }
    ldpe = bool(
        isolation
        and "LDPE" in isolation
        and isolation["LDPE"] >= max(isolation.values())
    )
    return TrendFlags(
        two_cluster_share=min(shares) if shares else 0.0,
        low_coverage_absorbed=min(absorbed) if absorbed else 1.0,
        polymer_affinity=affinity,
        ldpe_isolation=ldpe,
        water_sand_never_merged=never_merged,
        per_report=tuple(per_report),
    )
