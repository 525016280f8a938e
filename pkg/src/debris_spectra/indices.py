"""The nine radiometric indices, computed per pixel from band reflectances.

A zero denominator makes an index Undefined (NaN in the columnar store, None
on a PixelRecord); that is a value, not an error - cleaning decides later what
to drop. AWEI and FDI have no denominator and are always defined.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bands import BAND_BY_NAME, BAND_NAMES, INDEX_NAMES
from .records import Dataset, PixelRecord

_LAMBDA_NIR = BAND_BY_NAME["NIR1"].central_wavelength_nm
_LAMBDA_RED = BAND_BY_NAME["Red"].central_wavelength_nm
_LAMBDA_SWIR1 = BAND_BY_NAME["SWIR1"].central_wavelength_nm

#: Baseline slope of the floating-debris index, from the band-center constants.
FDI_BETA = (_LAMBDA_NIR - _LAMBDA_RED) / (_LAMBDA_SWIR1 - _LAMBDA_RED)


@dataclass(frozen=True)
class FdiConstants:
    lambda_nir: float = _LAMBDA_NIR
    lambda_red: float = _LAMBDA_RED
    lambda_swir1: float = _LAMBDA_SWIR1
    beta: float = field(default=FDI_BETA)


def _safe_div(num: np.ndarray, den: np.ndarray) -> np.ndarray:
    zero = den == 0.0
    return np.where(zero, np.nan, num / np.where(zero, 1.0, den))


def index_matrix(bands: np.ndarray) -> np.ndarray:
    """(n, 10) band matrix (canonical order) -> (n, 9) index matrix."""
    b = np.asarray(bands, dtype=np.float64)
    b2, b3, b4 = b[:, 0], b[:, 1], b[:, 2]
    b6 = b[:, 4]  # RedEdge2
    b8 = b[:, 6]  # NIR1
    b11, b12 = b[:, 8], b[:, 9]

    ndwi = _safe_div(b3 - b8, b3 + b8)
    wri = _safe_div(b3 + b4, b8 + b12)
    ndvi = _safe_div(b8 - b4, b8 + b4)
    awei = 4.0 * (b3 - b12) - 0.25 * b8 - 2.75 * b11
    mndwi = _safe_div(b3 - b12, b4 + b12)
    sr = _safe_div(b8, b4)
    pi = _safe_div(b8, b8 + b4)
    rndvi = _safe_div(b4 - b8, b4 + b8)
    fdi = b8 - (b6 + (b11 - b6) * FDI_BETA * 10.0)
    return np.column_stack((ndwi, wri, ndvi, awei, mndwi, sr, pi, rndvi, fdi))


def add_indices(dataset: Dataset) -> Dataset:
    """New Dataset with all nine index columns populated."""
    return Dataset(
        pixel_ids=dataset.pixel_ids,
        sources=dataset.sources,
        scenes=dataset.scenes,
        labels=dataset.labels,
        polymers=dataset.polymers,
        coverage_pct=dataset.coverage_pct,
        coverage_partial=dataset.coverage_partial,
        bands=dataset.bands,
        indices=index_matrix(dataset.bands),
        provenance=dict(dataset.provenance),
    )


def compute_all(record: PixelRecord) -> PixelRecord:
    """Record-level variant of `add_indices`; idempotent."""
    row = np.array([[record.bands[name] for name in BAND_NAMES]])
    values = index_matrix(row)[0]
    indices = {
        name: (None if np.isnan(v) else float(v)) for name, v in zip(INDEX_NAMES, values)
    }
    return PixelRecord(
        pixel_id=record.pixel_id,
        source=record.source,
        scene_or_date=record.scene_or_date,
        label=record.label,
        polymer=record.polymer,
        coverage_pct=record.coverage_pct,
        coverage_partial=record.coverage_partial,
        bands=dict(record.bands),
        indices=indices,
    )
