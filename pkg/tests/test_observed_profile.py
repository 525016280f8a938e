"""Optional test profile for user-supplied observed data.

Point DEBRIS_SPECTRA_OBSERVED_CSV at a pixel-table CSV of the observed
acquisitions (3,197 labeled pixels) to activate these checks; without it the
module is skipped. The cross-domain forest accuracy is reported but not
asserted: its exact value depends on the supplied measurements.
"""

import os

import numpy as np
import pytest

import debris_spectra as ds

OBSERVED = os.environ.get("DEBRIS_SPECTRA_OBSERVED_CSV")

pytestmark = pytest.mark.skipif(
    not OBSERVED, reason="set DEBRIS_SPECTRA_OBSERVED_CSV to a pixel-table CSV"
)


@pytest.fixture(scope="module")
def observed_dataset():
    return ds.ingest_pixel_table(OBSERVED)


def test_observed_counts_and_cleaning(observed_dataset):
    assert len(observed_dataset) == 3197
    indexed = (
        observed_dataset
        if observed_dataset.indices is not None
        else ds.add_indices(observed_dataset)
    )
    cleaned, report = ds.clean(indexed)
    assert report.retained == 3177
    assert report.dropped_total == 20
    assert report.dropped_by_class.get("Plastic") == 1
    assert report.dropped_by_class.get("Water") == 19


def test_cross_domain_forest_accuracy(observed_dataset, campaign_clean):
    """Train a bagged forest on the simulated campaign, evaluate on observed
    pixels of the shared classes. Reported qualitatively, not asserted."""
    from debris_spectra.forest import fit_tree

    indexed = (
        observed_dataset
        if observed_dataset.indices is not None
        else ds.add_indices(observed_dataset)
    )
    cleaned, _ = ds.clean(indexed)
    shared = np.isin(np.asarray(cleaned.labels), ("Water", "Plastic"))
    observed_shared = cleaned.subset(shared)

    features = list(ds.FEATURE_NAMES)
    X_train = campaign_clean.feature_matrix(features)
    y_train = np.asarray(campaign_clean.labels)
    X_test = observed_shared.feature_matrix(features)
    y_test = np.asarray(observed_shared.labels)

    ss = np.random.SeedSequence(1234)
    votes = {}
    n = len(y_train)
    for child in ss.spawn(25):
        rng = np.random.default_rng(child)
        boot = rng.integers(0, n, n)
        weights = np.bincount(boot, minlength=n).astype(float)
        tree = fit_tree(X_train, y_train, max_depth=3, sample_weight=weights)
        for i, label in enumerate(tree.predict(X_test)):
            votes.setdefault(i, []).append(label)
    predicted = np.array(
        [max(set(v), key=v.count) for _, v in sorted(votes.items())]
    )
    accuracy = float((predicted == y_test).mean())
    print(f"cross-domain forest accuracy on observed water/plastic: {accuracy:.3f}")
    assert 0.0 <= accuracy <= 1.0
