"""MSI band taxonomy, class labels and the closed feature-name namespace."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class MsiBand:
    name: str
    central_wavelength_nm: float
    native_resolution_m: int
    sentinel_code: str


# Sentinel-2A central wavelengths, canonical order. The order doubles as the
# band code (0-9) of the binary raster format and the CSV column order.
BANDS: tuple[MsiBand, ...] = (
    MsiBand("Blue", 496.6, 10, "B2"),
    MsiBand("Green", 560.0, 10, "B3"),
    MsiBand("Red", 664.5, 10, "B4"),
    MsiBand("RedEdge1", 703.9, 20, "B5"),
    MsiBand("RedEdge2", 740.2, 20, "B6"),
    MsiBand("RedEdge3", 782.5, 20, "B7"),
    MsiBand("NIR1", 835.1, 10, "B8"),
    MsiBand("NIR2", 864.8, 20, "B8A"),
    MsiBand("SWIR1", 1613.7, 20, "B11"),
    MsiBand("SWIR2", 2202.4, 20, "B12"),
)

BAND_NAMES: tuple[str, ...] = tuple(b.name for b in BANDS)
SENTINEL_CODES: tuple[str, ...] = tuple(b.sentinel_code for b in BANDS)
BAND_BY_NAME: dict[str, MsiBand] = {b.name: b for b in BANDS}
BAND_BY_CODE: dict[str, MsiBand] = {b.sentinel_code: b for b in BANDS}
BAND_CODE_INDEX: dict[str, int] = {b.name: i for i, b in enumerate(BANDS)}

INDEX_NAMES: tuple[str, ...] = (
    "NDWI",
    "WRI",
    "NDVI",
    "AWEI",
    "MNDWI",
    "SR",
    "PI",
    "RNDVI",
    "FDI",
)

# Closed namespace: 10 bands + 9 indices = 19 features.
FEATURE_NAMES: tuple[str, ...] = BAND_NAMES + INDEX_NAMES
FEATURE_ORDER: dict[str, int] = {f: i for i, f in enumerate(FEATURE_NAMES)}

CLASS_LABELS: tuple[str, ...] = ("Water", "Sand", "Coast", "Plastic", "Wood")
CLASS_ORDER: dict[str, int] = {c: i for i, c in enumerate(CLASS_LABELS)}
SIMULATED_LABELS = frozenset({"Water", "Sand", "Plastic"})
OBSERVED_LABELS = frozenset({"Water", "Coast", "Plastic", "Wood"})

# The six polymers of the default simulated campaign; the library additionally
# carries the mixed-microplastic signature uNAPO, and observed plastic targets
# may be HDPE. Wood records carry the sentinel polymer "none".
CAMPAIGN_POLYMERS: tuple[str, ...] = ("PA6", "PA66", "PVC", "LDPE", "PET", "PP")
LIBRARY_POLYMERS: tuple[str, ...] = CAMPAIGN_POLYMERS + ("uNAPO",)
PLASTIC_POLYMERS = frozenset(LIBRARY_POLYMERS) | {"HDPE"}
POLYMER_VALUES = PLASTIC_POLYMERS | {"none"}

SOURCES: tuple[str, ...] = ("simulated", "observed")


def is_band(feature: str) -> bool:
    return feature in BAND_BY_NAME


def is_index(feature: str) -> bool:
    return feature in INDEX_NAMES
