"""CART decision trees and a bagged random forest used for feature selection.

Trees are exact greedy CART on Gini impurity: candidate thresholds are the
midpoints between consecutive distinct values present at the node, the best
(feature, threshold) maximises the impurity decrease, ties break toward the
lower feature index and then the lower threshold. Every feature is considered
at every node (no per-node subsampling); randomness enters only through the
bootstrap, so a fixed seed gives a bit-deterministic forest.

Feature importance is the bootstrap-weighted impurity decrease summed over all
nodes splitting on a feature, across the forest, normalised to sum to one.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bands import BAND_NAMES, CLASS_LABELS, FEATURE_NAMES, FEATURE_ORDER, INDEX_NAMES
from .errors import (
    DimensionMismatch,
    DomainError,
    NoEligibleCandidate,
    SingleClass,
)
from .records import Dataset
from .stats import CorrelationMatrix


@dataclass
class TreeNode:
    counts: np.ndarray
    feature: int | None = None
    threshold: float | None = None
    left: "TreeNode | None" = None
    right: "TreeNode | None" = None

    @property
    def is_leaf(self) -> bool:
        return self.feature is None


@dataclass
class DecisionTree:
    root: TreeNode
    classes: np.ndarray
    max_depth: int
    importance: np.ndarray  # per input column, unnormalised impurity decrease

    def predict_codes(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        out = np.empty(X.shape[0], dtype=np.int64)

        def walk(node: TreeNode, rows: np.ndarray) -> None:
            if rows.size == 0:
                return
            if node.is_leaf:
                out[rows] = int(np.argmax(node.counts))
                return
            go_left = X[rows, node.feature] <= node.threshold
            walk(node.left, rows[go_left])
            walk(node.right, rows[~go_left])

        walk(self.root, np.arange(X.shape[0]))
        return out

    def predict(self, X: np.ndarray) -> np.ndarray:
        return self.classes[self.predict_codes(X)]

    def depth(self) -> int:
        def d(node):
            return 0 if node.is_leaf else 1 + max(d(node.left), d(node.right))

        return d(self.root)


def _gini(counts: np.ndarray, total: float) -> float:
    p = counts / total
    return float(1.0 - (p * p).sum())


def _best_split(codes, values, y, w, rows, n_classes):
    """Best (feature, threshold, decrease) at a node, or None."""
    yw = w[rows]
    node_counts = np.bincount(y[rows], weights=yw, minlength=n_classes)
    total_w = float(node_counts.sum())
    node_gini = _gini(node_counts, total_w)
    if node_gini == 0.0:
        return None
    best_dec = 0.0
    best = None
    for f in range(len(codes)):
        c = codes[f][rows]
        n_codes = values[f].size
        cnt = np.bincount(c * n_classes + y[rows], weights=yw, minlength=n_codes * n_classes)
        cnt = cnt.reshape(n_codes, n_classes)
        mass = cnt.sum(axis=1)
        present = mass > 0.0
        if int(present.sum()) < 2:
            continue
        pc = cnt[present]
        left = np.cumsum(pc, axis=0)[:-1]
        lw = left.sum(axis=1)
        rw = total_w - lw
        with np.errstate(invalid="ignore", divide="ignore"):
            gl = 1.0 - ((left / lw[:, None]) ** 2).sum(axis=1)
            right = node_counts[None, :] - left
            gr = 1.0 - ((right / rw[:, None]) ** 2).sum(axis=1)
        dec = node_gini - (lw * gl + rw * gr) / total_w
        k = int(np.argmax(dec))
        if dec[k] > best_dec:
            vals_present = values[f][present]
            threshold = 0.5 * (vals_present[k] + vals_present[k + 1])
            best_dec = float(dec[k])
            best = (f, float(threshold), best_dec, node_counts, total_w)
    return best


def _grow(codes, values, y, w, rows, depth, max_depth, n_classes, importance, root_w):
    node = TreeNode(counts=np.bincount(y[rows], weights=w[rows], minlength=n_classes))
    if depth >= max_depth:
        return node
    split = _best_split(codes, values, y, w, rows, n_classes)
    if split is None:
        return node
    f, threshold, dec, _, total_w = split
    importance[f] += (total_w / root_w) * dec
    node.feature = f
    node.threshold = threshold
    go_left = values[f][codes[f][rows]] <= threshold
    node.left = _grow(
        codes, values, y, w, rows[go_left], depth + 1, max_depth, n_classes, importance, root_w
    )
    node.right = _grow(
        codes, values, y, w, rows[~go_left], depth + 1, max_depth, n_classes, importance, root_w
    )
    return node


def _encode_columns(X: np.ndarray):
    values, codes = [], []
    for j in range(X.shape[1]):
        v, c = np.unique(X[:, j], return_inverse=True)
        values.append(v)
        codes.append(c.astype(np.int64))
    return codes, values


def fit_tree(X, y, max_depth: int = 3, rng=None, sample_weight=None) -> DecisionTree:
    """Fit one CART tree. `rng` is accepted for interface parity but unused:
    the exact greedy search is deterministic."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] == 0:
        raise DimensionMismatch("X must be a nonempty 2-D matrix")
    y = np.asarray(y)
    if y.shape[0] != X.shape[0]:
        raise DimensionMismatch(f"{X.shape[0]} rows but {y.shape[0]} labels")
    if np.isnan(X).any():
        raise DomainError("X contains undefined values")
    classes, y_codes = np.unique(y, return_inverse=True)
    codes, values = _encode_columns(X)
    w = (
        np.ones(X.shape[0], dtype=np.float64)
        if sample_weight is None
        else np.asarray(sample_weight, dtype=np.float64)
    )
    rows = np.arange(X.shape[0])[w > 0.0]
    importance = np.zeros(X.shape[1], dtype=np.float64)
    root = _grow(
        codes, values, y_codes, w, rows, 0, max_depth, classes.size, importance, float(w.sum())
    )
    return DecisionTree(root=root, classes=classes, max_depth=max_depth, importance=importance)


@dataclass(frozen=True)
class ImportanceReport:
    importances: dict[str, float]
    train_accuracy: float
    test_accuracy: float
    n_trees: int
    max_depth: int
    split_fraction: float
    seed: int
    classes: tuple[str, ...]
    notes: dict[str, str] = field(default_factory=dict)

    def top_features(self, n: int = 2) -> list[str]:
        return sorted(self.importances, key=lambda f: (-self.importances[f], FEATURE_ORDER[f]))[:n]

    def to_json(self) -> dict:
        return {
            "importances": dict(self.importances),
            "train_accuracy": self.train_accuracy,
            "test_accuracy": self.test_accuracy,
            "n_trees": self.n_trees,
            "max_depth": self.max_depth,
            "split_fraction": self.split_fraction,
            "seed": self.seed,
            "classes": list(self.classes),
            "notes": dict(self.notes),
        }


def stratified_split(y_codes: np.ndarray, n_classes: int, fraction: float, rng):
    """Seeded per-class shuffle; the first floor(fraction * n_c) go to train."""
    train_parts, test_parts = [], []
    for c in range(n_classes):
        idx = np.flatnonzero(y_codes == c)
        perm = rng.permutation(idx)
        n_train = int(len(idx) * fraction)
        train_parts.append(perm[:n_train])
        test_parts.append(perm[n_train:])
    train = np.sort(np.concatenate(train_parts))
    test = np.sort(np.concatenate(test_parts))
    return train, test


def fit_forest(
    dataset: Dataset,
    features,
    n_trees: int = 100,
    max_depth: int = 3,
    split: float = 0.75,
    seed: int = 0,
) -> ImportanceReport:
    """Bagged depth-limited CART forest with Gini importances.

    The train/test split is stratified by class (the datasets are heavily
    unbalanced); each tree is fit on a bootstrap of the training rows with all
    features available at every node. Per-tree RNG streams are derived from
    the seed by tree index, so results do not depend on evaluation order.
    """
    features = list(features)
    X = dataset.feature_matrix(features)
    if np.isnan(X).any():
        raise DomainError("undefined index values present; clean the dataset first")
    labels = np.asarray(dataset.labels)
    class_names = [c for c in CLASS_LABELS if c in labels]
    if len(class_names) < 2:
        raise SingleClass(f"need >= 2 classes, have {class_names}")
    class_code = {c: i for i, c in enumerate(class_names)}
    y = np.array([class_code[c] for c in labels], dtype=np.int64)
    n_classes = len(class_names)

    ss = np.random.SeedSequence(seed)
    children = ss.spawn(n_trees + 1)
    split_rng = np.random.default_rng(children[0])
    train_idx, test_idx = stratified_split(y, n_classes, split, split_rng)

    codes, values = _encode_columns(X)
    importance = np.zeros(len(features), dtype=np.float64)
    votes = np.zeros((X.shape[0], n_classes), dtype=np.int32)
    n_train = train_idx.size
    for t in range(n_trees):
        rng_t = np.random.default_rng(children[t + 1])
        boot = rng_t.integers(0, n_train, n_train)
        w_train = np.bincount(boot, minlength=n_train).astype(np.float64)
        w = np.zeros(X.shape[0], dtype=np.float64)
        w[train_idx] = w_train
        rows = train_idx[w_train > 0.0]
        tree_importance = np.zeros(len(features), dtype=np.float64)
        root = _grow(
            codes, values, y, w, rows, 0, max_depth, n_classes, tree_importance, float(w.sum())
        )
        importance += tree_importance
        tree = DecisionTree(
            root=root, classes=np.arange(n_classes), max_depth=max_depth, importance=tree_importance
        )
        pred = tree.predict_codes(X)
        votes[np.arange(X.shape[0]), pred] += 1

    total = importance.sum()
    if total > 0.0:
        importance = importance / total
        assert abs(importance.sum() - 1.0) < 1e-9
    majority = np.argmax(votes, axis=1)
    train_acc = float(np.mean(majority[train_idx] == y[train_idx]))
    test_acc = float(np.mean(majority[test_idx] == y[test_idx])) if test_idx.size else float("nan")
    return ImportanceReport(
        importances={f: float(v) for f, v in zip(features, importance)},
        train_accuracy=train_acc,
        test_accuracy=test_acc,
        n_trees=n_trees,
        max_depth=max_depth,
        split_fraction=split,
        seed=seed,
        classes=tuple(class_names),
        notes={
            "feature_subsampling": "all features considered at every node",
            "split": "stratified per class",
        },
    )


@dataclass(frozen=True)
class FeatureSet:
    id: str
    features: tuple[str, ...]
    note: str | None = None

    def to_json(self) -> dict:
        out = {"id": self.id, "features": list(self.features)}
        if self.note:
            out["note"] = self.note
        return out


def fixed_feature_sets() -> dict[str, FeatureSet]:
    return {
        "A": FeatureSet("A", FEATURE_NAMES),
        "B": FeatureSet("B", BAND_NAMES),
        "C": FeatureSet("C", INDEX_NAMES),
    }


def build_feature_sets(
    report: ImportanceReport,
    corr: CorrelationMatrix,
    per_class_corrs,
) -> list[FeatureSet]:
    """Sets A (all), B (bands), C (indices) and the data-driven 4-feature set D.

    D = the two most important features plus the two candidates least
    correlated with them. A candidate is eligible only while |r| against both
    top features stays strictly inside (-0.75, 0.75), in the full matrix and
    in every per-class matrix; if that leaves fewer than two candidates, the
    gate degrades to the full matrix alone (flagged on the set).
    """
    top2 = report.top_features(2)
    candidates = [f for f in FEATURE_NAMES if f not in top2]

    def passes(f, matrices):
        return all(abs(m.r(f, t)) < 0.75 for m in matrices for t in top2)

    note = None
    eligible = [f for f in candidates if passes(f, [corr, *per_class_corrs])]
    if len(eligible) < 2:
        eligible = [f for f in candidates if passes(f, [corr])]
        note = "per-class correlation gate left <2 candidates; full-matrix gate only"
        if len(eligible) < 2:
            raise NoEligibleCandidate(
                "fewer than two features pass the correlation gate against "
                f"{top2} even on the full matrix"
            )

    def badness(f):
        return max(abs(corr.r(f, t)) for t in top2)

    chosen = sorted(eligible, key=lambda f: (badness(f), FEATURE_ORDER[f]))[:2]
    sets = fixed_feature_sets()
    sets["D"] = FeatureSet("D", tuple(top2 + chosen), note=note)
    return [sets[k] for k in ("A", "B", "C", "D")]
