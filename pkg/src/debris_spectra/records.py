"""Pixel-record data model, columnar Dataset container and the pixel-table CSV.

The Dataset is the single currency of the pipeline. It is stored column-wise
(numpy arrays) for speed; `record(i)` materialises an immutable PixelRecord
view of one row. The pixel-table CSV is the interchange format: floats are
written with `repr` (shortest round-trip form) so write -> read -> write is
byte-identical.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .bands import (
    BAND_NAMES,
    INDEX_NAMES,
    OBSERVED_LABELS,
    PLASTIC_POLYMERS,
    SENTINEL_CODES,
    SIMULATED_LABELS,
    SOURCES,
)
from .errors import IdCollision, MissingFeature, ParseError, SchemaError

PARTIAL = "partial"

BASE_COLUMNS: tuple[str, ...] = (
    "pixel_id",
    "source",
    "scene_or_date",
    "label",
    "polymer",
    "coverage_pct",
) + SENTINEL_CODES


@dataclass(frozen=True)
class PixelRecord:
    pixel_id: int
    source: str
    scene_or_date: str
    label: str
    polymer: str | None
    coverage_pct: float | None
    coverage_partial: bool
    bands: dict[str, float]
    indices: dict[str, float | None] | None


@dataclass
class Dataset:
    pixel_ids: np.ndarray
    sources: np.ndarray
    scenes: np.ndarray
    labels: np.ndarray
    polymers: np.ndarray  # '' encodes "absent"
    coverage_pct: np.ndarray  # NaN encodes "absent"
    coverage_partial: np.ndarray
    bands: np.ndarray  # (n, 10) float64, canonical band order
    indices: np.ndarray | None = None  # (n, 9) float64, NaN = Undefined
    provenance: dict[str, str] = field(default_factory=dict)

    def __len__(self) -> int:
        return int(self.pixel_ids.shape[0])

    def __iter__(self):
        for i in range(len(self)):
            yield self.record(i)

    def record(self, i: int) -> PixelRecord:
        polymer = str(self.polymers[i]) or None
        cov = float(self.coverage_pct[i])
        indices = None
        if self.indices is not None:
            indices = {
                name: (None if math.isnan(v) else float(v))
                for name, v in zip(INDEX_NAMES, self.indices[i])
            }
        return PixelRecord(
            pixel_id=int(self.pixel_ids[i]),
            source=str(self.sources[i]),
            scene_or_date=str(self.scenes[i]),
            label=str(self.labels[i]),
            polymer=polymer,
            coverage_pct=None if math.isnan(cov) else cov,
            coverage_partial=bool(self.coverage_partial[i]),
            bands={name: float(v) for name, v in zip(BAND_NAMES, self.bands[i])},
            indices=indices,
        )

    def subset(self, selector) -> "Dataset":
        """Row subset (mask or index array); pixel ids are kept as-is."""
        return Dataset(
            pixel_ids=self.pixel_ids[selector],
            sources=self.sources[selector],
            scenes=self.scenes[selector],
            labels=self.labels[selector],
            polymers=self.polymers[selector],
            coverage_pct=self.coverage_pct[selector],
            coverage_partial=self.coverage_partial[selector],
            bands=self.bands[selector],
            indices=None if self.indices is None else self.indices[selector],
            provenance=dict(self.provenance),
        )

    def feature_matrix(self, features) -> np.ndarray:
        """Columns for the requested features, in order. Undefined -> NaN."""
        cols = []
        band_pos = {name: j for j, name in enumerate(BAND_NAMES)}
        index_pos = {name: j for j, name in enumerate(INDEX_NAMES)}
        for f in features:
            if f in band_pos:
                cols.append(self.bands[:, band_pos[f]])
            elif f in index_pos:
                if self.indices is None:
                    raise MissingFeature(f"index {f} requested but indices not computed")
                cols.append(self.indices[:, index_pos[f]])
            else:
                raise MissingFeature(f"unknown feature {f!r}")
        if not cols:
            return np.empty((len(self), 0), dtype=np.float64)
        return np.column_stack(cols).astype(np.float64, copy=False)

    def validate(self) -> None:
        n = len(self)
        ids = np.asarray(self.pixel_ids)
        if ids.shape != (n,):
            raise SchemaError("pixel_ids shape mismatch")
        if n and not np.all(np.diff(ids) > 0):
            raise SchemaError("pixel_ids must be unique and ascending")
        if self.bands.shape != (n, len(BAND_NAMES)):
            raise SchemaError("band matrix shape mismatch")
        if not np.all(np.isfinite(self.bands)):
            raise SchemaError("band reflectances must be finite")
        if self.indices is not None and self.indices.shape != (n, len(INDEX_NAMES)):
            raise SchemaError("index matrix shape mismatch")
        if n == 0:
            return
        sources = np.asarray(self.sources)
        labels = np.asarray(self.labels)
        polymers = np.asarray(self.polymers)
        partial = np.asarray(self.coverage_partial, dtype=bool)
        has_cov = partial | ~np.isnan(self.coverage_pct)

        _first_bad(~np.isin(sources, SOURCES), "bad source", sources)
        sim = sources == "simulated"
        _first_bad(
            sim & ~np.isin(labels, sorted(SIMULATED_LABELS)),
            "label not valid for simulated data",
            labels,
        )
        _first_bad(
            ~sim & ~np.isin(labels, sorted(OBSERVED_LABELS)),
            "label not valid for observed data",
            labels,
        )

        target = np.isin(labels, ("Plastic", "Wood"))
        has_poly = polymers != ""
        _first_bad(target & ~(has_poly & has_cov), "Plastic/Wood record needs polymer and coverage", labels)
        _first_bad(~target & (has_poly | has_cov), "polymer/coverage only valid on Plastic/Wood", labels)
        _first_bad((labels == "Wood") & (polymers != "none"), "Wood polymer must be 'none'", polymers)
        _first_bad(
            (labels == "Plastic") & ~np.isin(polymers, sorted(PLASTIC_POLYMERS)),
            "bad Plastic polymer",
            polymers,
        )
        numeric_cov = has_cov & ~partial
        with np.errstate(invalid="ignore"):
            bad_cov = numeric_cov & ~((self.coverage_pct > 0.0) & (self.coverage_pct <= 100.0))
        _first_bad(bad_cov, "coverage_pct outside (0, 100]", self.coverage_pct)


def _first_bad(mask: np.ndarray, message: str, values) -> None:
    if mask.any():
        i = int(np.argmax(mask))
        raise SchemaError(f"row {i}: {message} ({values[i]!r})")


def feature_vector(record: PixelRecord, features) -> list[float]:
    """Project one record onto `features`, in the order given."""
    out = []
    for f in features:
        if f in record.bands:
            out.append(record.bands[f])
        else:
            if f not in INDEX_NAMES:
                raise MissingFeature(f"unknown feature {f!r}")
            if record.indices is None:
                raise MissingFeature(f"index {f} not computed on record {record.pixel_id}")
            v = record.indices.get(f)
            if v is None:
                raise MissingFeature(f"index {f} undefined on record {record.pixel_id}")
            out.append(v)
    return out


def merge(datasets, remap_ids: bool = True) -> Dataset:
    """Concatenate datasets; re-index sequentially unless remapping is off."""
    datasets = list(datasets)
    if not datasets:
        return empty_dataset()
    has_indices = all(d.indices is not None for d in datasets)
    out = Dataset(
        pixel_ids=np.concatenate([d.pixel_ids for d in datasets]),
        sources=np.concatenate([d.sources for d in datasets]),
        scenes=np.concatenate([d.scenes for d in datasets]),
        labels=np.concatenate([d.labels for d in datasets]),
        polymers=np.concatenate([d.polymers for d in datasets]),
        coverage_pct=np.concatenate([d.coverage_pct for d in datasets]),
        coverage_partial=np.concatenate([d.coverage_partial for d in datasets]),
        bands=np.concatenate([d.bands for d in datasets]),
        indices=np.concatenate([d.indices for d in datasets]) if has_indices else None,
        provenance={
            f"part{i}.{k}": v for i, d in enumerate(datasets) for k, v in d.provenance.items()
        },
    )
    if remap_ids:
        out.pixel_ids = np.arange(len(out), dtype=np.int64)
    else:
        ids, counts = np.unique(out.pixel_ids, return_counts=True)
        if np.any(counts > 1):
            raise IdCollision(f"duplicate pixel_id {int(ids[np.argmax(counts > 1)])}")
        order = np.argsort(out.pixel_ids, kind="stable")
        out = out.subset(order)
    return out


def empty_dataset(provenance=None) -> Dataset:
    return Dataset(
        pixel_ids=np.empty(0, dtype=np.int64),
        sources=np.empty(0, dtype="<U9"),
        scenes=np.empty(0, dtype="<U16"),
        labels=np.empty(0, dtype="<U7"),
        polymers=np.empty(0, dtype="<U8"),
        coverage_pct=np.empty(0, dtype=np.float64),
        coverage_partial=np.empty(0, dtype=bool),
        bands=np.empty((0, len(BAND_NAMES)), dtype=np.float64),
        provenance=provenance or {},
    )


def _fmt(x: float) -> str:
    return repr(float(x))


def write_pixel_table(dataset: Dataset, path) -> None:
    """Write the pixel-table CSV, rows in pixel_id order."""
    order = np.argsort(dataset.pixel_ids, kind="stable")
    if not np.array_equal(order, np.arange(len(dataset))):
        dataset = dataset.subset(order)
    with_idx = dataset.indices is not None
    header = ",".join(BASE_COLUMNS + (INDEX_NAMES if with_idx else ()))
    nan = math.isnan
    lines = [header]
    for i in range(len(dataset)):
        cov = float(dataset.coverage_pct[i])
        if dataset.coverage_partial[i]:
            cov_cell = PARTIAL
        elif nan(cov):
            cov_cell = ""
        else:
            cov_cell = _fmt(cov)
        cells = [
            str(int(dataset.pixel_ids[i])),
            str(dataset.sources[i]),
            str(dataset.scenes[i]),
            str(dataset.labels[i]),
            str(dataset.polymers[i]),
            cov_cell,
        ]
        cells.extend(_fmt(v) for v in dataset.bands[i])
        if with_idx:
            cells.extend("" if nan(v) else _fmt(v) for v in dataset.indices[i])
        lines.append(",".join(cells))
    lines.append("")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("\n".join(lines))


def read_pixel_table(path) -> Dataset:
    """Parse and validate a pixel-table CSV."""
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(f"{path}: empty file") from None
        base = list(BASE_COLUMNS)
        if header == base:
            with_idx = False
        elif header == base + list(INDEX_NAMES):
            with_idx = True
        else:
            raise SchemaError(f"{path}: unexpected header {header!r}")
        ncols = len(header)

        ids, sources, scenes, labels, polymers = [], [], [], [], []
        coverage, partial, band_rows, index_rows = [], [], [], []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != ncols:
                raise ParseError(f"{path}:{lineno}: expected {ncols} cells, got {len(row)}")
            try:
                ids.append(int(row[0]))
            except ValueError:
                raise ParseError(f"{path}:{lineno}: bad pixel_id {row[0]!r}") from None
            sources.append(row[1])
            scenes.append(row[2])
            labels.append(row[3])
            polymers.append(row[4])
            cov_cell = row[5]
            if cov_cell == PARTIAL:
                coverage.append(math.nan)
                partial.append(True)
            elif cov_cell == "":
                coverage.append(math.nan)
                partial.append(False)
            else:
                try:
                    coverage.append(float(cov_cell))
                except ValueError:
                    raise ParseError(f"{path}:{lineno}: bad coverage {cov_cell!r}") from None
                partial.append(False)
            try:
                band_rows.append([float(c) for c in row[6:16]])
            except ValueError:
                raise ParseError(f"{path}:{lineno}: bad band reflectance") from None
            if with_idx:
                try:
                    index_rows.append(
                        [math.nan if c == "" else float(c) for c in row[16:]]
                    )
                except ValueError:
                    raise ParseError(f"{path}:{lineno}: bad index value") from None

    n = len(ids)
    dataset = Dataset(
        pixel_ids=np.asarray(ids, dtype=np.int64),
        sources=np.asarray(sources),
        scenes=np.asarray(scenes),
        labels=np.asarray(labels),
        polymers=np.asarray(polymers),
        coverage_pct=np.asarray(coverage, dtype=np.float64),
        coverage_partial=np.asarray(partial, dtype=bool),
        bands=np.asarray(band_rows, dtype=np.float64).reshape(n, len(BAND_NAMES)),
        indices=(
            np.asarray(index_rows, dtype=np.float64).reshape(n, len(INDEX_NAMES))
            if with_idx
            else None
        ),
        provenance={"format": "pixel-table-csv"},
    )
    dataset.validate()
    return dataset
