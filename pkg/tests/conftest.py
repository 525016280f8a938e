import numpy as np
import pytest

import debris_spectra as ds


@pytest.fixture(scope="session")
def library():
    return ds.builtin_default_library()


@pytest.fixture(scope="session")
def campaign_stacks(library):
    return [ds.build_scene(spec) for spec in ds.default_campaign(library, seed=0)]


@pytest.fixture(scope="session")
def campaign_raw(campaign_stacks):
    return ds.campaign_dataset(campaign_stacks, "bilinear")


@pytest.fixture(scope="session")
def campaign_clean(campaign_raw):
    cleaned, report = ds.clean(ds.add_indices(campaign_raw))
    assert report.dropped_total == 0
    return cleaned


@pytest.fixture(scope="session")
def importance_report(campaign_clean):
    return ds.fit_forest(
        campaign_clean, list(ds.FEATURE_NAMES), n_trees=100, max_depth=3, seed=1234
    )


@pytest.fixture(scope="session")
def correlation_matrices(campaign_clean):
    features = list(ds.FEATURE_NAMES)
    full = ds.pearson_matrix(campaign_clean, features)
    labels = sorted(set(np.asarray(campaign_clean.labels).tolist()))
    per_class = [
        ds.pearson_matrix(campaign_clean, features, class_filter=label) for label in labels
    ]
    return full, per_class


@pytest.fixture(scope="session")
def feature_sets(importance_report, correlation_matrices):
    full, per_class = correlation_matrices
    return ds.build_feature_sets(importance_report, full, per_class)


def make_record(pixel_id=0, label="Water", polymer=None, coverage=None, partial=False,
                source="simulated", scene="S", bands=None, with_indices=False):
    """Small helper used across test modules."""
    from debris_spectra.records import PixelRecord
    from debris_spectra.indices import compute_all

    if bands is None:
        bands = {name: 0.2 for name in ds.BAND_NAMES}
    rec = PixelRecord(
        pixel_id=pixel_id,
        source=source,
        scene_or_date=scene,
        label=label,
        polymer=polymer,
        coverage_pct=coverage,
        coverage_partial=partial,
        bands=dict(bands),
        indices=None,
    )
    return compute_all(rec) if with_indices else rec
