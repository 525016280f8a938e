import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import debris_spectra as ds
from debris_spectra.errors import IdCollision, MissingFeature, ParseError, SchemaError
from debris_spectra.records import Dataset, empty_dataset, feature_vector, merge

from conftest import make_record


def small_dataset(n=4, with_indices=True):
    rng = np.random.default_rng(5)
    bands = 0.05 + 0.4 * rng.random((n, 10))
    d = Dataset(
        pixel_ids=np.arange(n, dtype=np.int64),
        sources=np.array(["simulated"] * n),
        scenes=np.array(["PET_20"] * n),
        labels=np.array(["Water", "Sand", "Plastic", "Water"][:n]),
        polymers=np.array(["", "", "PET", ""][:n]),
        coverage_pct=np.array([np.nan, np.nan, 20.0, np.nan][:n]),
        coverage_partial=np.zeros(n, dtype=bool),
        bands=bands,
        provenance={"origin": "test"},
    )
    return ds.add_indices(d) if with_indices else d


class TestFeatureVector:
    def test_identity_projection(self):
        rec = make_record(bands={**{n: 0.2 for n in ds.BAND_NAMES}, "Blue": 0.1})
        assert feature_vector(rec, ["Blue"]) == [0.1]

    def test_constant_record_all_bands(self):
        rec = make_record()
        assert feature_vector(rec, list(ds.BAND_NAMES)) == [0.2] * 10

    def test_undefined_index_raises(self):
        bands = {n: 0.2 for n in ds.BAND_NAMES}
        bands["Green"] = 0.2
        bands["NIR1"] = -0.2  # B3 + B8 = 0 -> NDWI undefined
        rec = make_record(bands=bands, with_indices=True)
        assert rec.indices["NDWI"] is None
        with pytest.raises(MissingFeature):
            feature_vector(rec, ["NDWI"])

    def test_indices_not_computed(self):
        rec = make_record()
        with pytest.raises(MissingFeature):
            feature_vector(rec, ["NDWI"])

    @given(st.permutations(list(ds.FEATURE_NAMES)))
    @settings(max_examples=25, deadline=None)
    def test_pure_projection_permutes(self, perm):
        rec = make_record(
            bands={n: 0.1 + 0.01 * i for i, n in enumerate(ds.BAND_NAMES)},
            with_indices=True,
        )
        base = feature_vector(rec, list(ds.FEATURE_NAMES))
        permuted = feature_vector(rec, perm)
        lookup = dict(zip(ds.FEATURE_NAMES, base))
        assert permuted == [lookup[f] for f in perm]


class TestCsvRoundTrip:
    def test_value_round_trip(self, tmp_path):
        d = small_dataset()
        path = tmp_path / "t.csv"
        ds.write_pixel_table(d, path)
        back = ds.read_pixel_table(path)
        assert np.array_equal(back.pixel_ids, d.pixel_ids)
        assert np.array_equal(back.labels, d.labels)
        assert np.array_equal(back.bands, d.bands)
        same = (back.indices == d.indices) | (np.isnan(back.indices) & np.isnan(d.indices))
        assert same.all()

    def test_byte_round_trip(self, tmp_path):
        d = small_dataset()
        p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
        ds.write_pixel_table(d, p1)
        ds.write_pixel_table(ds.read_pixel_table(p1), p2)
        assert p1.read_bytes() == p2.read_bytes()

    def test_partial_coverage_cell(self, tmp_path):
        d = small_dataset(with_indices=False)
        d.sources = np.array(["observed"] * 4)
        d.labels = np.array(["Water", "Coast", "Plastic", "Wood"])
        d.polymers = np.array(["", "", "HDPE", "none"])
        d.coverage_pct = np.array([np.nan, np.nan, np.nan, 100.0])
        d.coverage_partial = np.array([False, False, True, False])
        d.scenes = np.array(["2021-07-01"] * 4)
        path = tmp_path / "obs.csv"
        ds.write_pixel_table(d, path)
        assert ",partial," in path.read_text()
        back = ds.read_pixel_table(path)
        assert back.coverage_partial[2] and math.isnan(back.coverage_pct[2])

    @given(n=st.integers(1, 12), seed=st.integers(0, 2**31))
    @settings(max_examples=20, deadline=None)
    def test_random_round_trip(self, tmp_path_factory, n, seed):
        rng = np.random.default_rng(seed)
        d = Dataset(
            pixel_ids=np.arange(n, dtype=np.int64),
            sources=np.array(["simulated"] * n),
            scenes=np.array(["PET_100"] * n),
            labels=np.array(["Water"] * n),
            polymers=np.array([""] * n),
            coverage_pct=np.full(n, np.nan),
            coverage_partial=np.zeros(n, dtype=bool),
            bands=rng.random((n, 10)),
        )
        path = tmp_path_factory.mktemp("csv") / "r.csv"
        ds.write_pixel_table(d, path)
        back = ds.read_pixel_table(path)
        assert np.array_equal(back.bands, d.bands)


class TestValidation:
    def test_polymer_on_water_rejected(self, tmp_path):
        d = small_dataset(with_indices=False)
        d.polymers = np.array(["PET", "", "PET", ""])
        with pytest.raises(SchemaError):
            d.validate()

    def test_coverage_zero_rejected(self):
        d = small_dataset(with_indices=False)
        d.coverage_pct[2] = 0.0
        with pytest.raises(SchemaError):
            d.validate()

    def test_wood_polymer_must_be_none(self):
        d = small_dataset(with_indices=False)
        d.sources = np.array(["observed"] * 4)
        d.labels = np.array(["Water", "Coast", "Wood", "Water"])
        d.polymers = np.array(["", "", "PET", ""])
        d.coverage_pct = np.array([np.nan, np.nan, 100.0, np.nan])
        with pytest.raises(SchemaError):
            d.validate()

    def test_sand_not_valid_for_observed(self):
        d = small_dataset(with_indices=False)
        d.sources = np.array(["observed"] * 4)
        with pytest.raises(SchemaError):
            d.validate()

    def test_ids_must_ascend(self):
        d = small_dataset(with_indices=False)
        d.pixel_ids = np.array([3, 1, 2, 0])
        with pytest.raises(SchemaError):
            d.validate()

    def test_malformed_rows(self, tmp_path):
        path = tmp_path / "bad.csv"
        header = "pixel_id,source,scene_or_date,label,polymer,coverage_pct," + ",".join(
            ds.bands.SENTINEL_CODES if hasattr(ds, "bands") else []
        )
        from debris_spectra.records import BASE_COLUMNS

        path.write_text(",".join(BASE_COLUMNS) + "\nnot_an_int,simulated,S,Water,,," +
                        ",".join(["0.1"] * 9) + "\n")
        with pytest.raises(ParseError):
            ds.read_pixel_table(path)


class TestMerge:
    def test_concatenation_counts(self):
        a, b = small_dataset(3), small_dataset(4)
        assert len(merge([a, b])) == 7

    def test_duplicate_ids_remapped(self):
        a, b = small_dataset(3), small_dataset(3)
        m = merge([a, b], remap_ids=True)
        assert np.array_equal(m.pixel_ids, np.arange(6))

    def test_duplicate_ids_without_remap(self):
        a, b = small_dataset(3), small_dataset(3)
        with pytest.raises(IdCollision):
            merge([a, b], remap_ids=False)

    def test_disjoint_ids_kept_and_sorted(self):
        a, b = small_dataset(2), small_dataset(2)
        b.pixel_ids = np.array([10, 11])
        m = merge([b, a], remap_ids=False)
        assert np.array_equal(m.pixel_ids, np.array([0, 1, 10, 11]))

    def test_empty_merge(self):
        assert len(merge([])) == 0
        assert len(empty_dataset()) == 0
