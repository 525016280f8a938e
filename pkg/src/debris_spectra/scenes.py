"""Simulated campaign generator: square plastic objects at five sub-pixel
coverage ratios over a half-water / half-sand substrate.

Scene geometry (1200 m x 1200 m): the 10 m grid is 120x120 with rows 0-59
water and 60-119 sand; 256 objects sit at 10 m cells {3+7i} x {3+7j}, 128 per
substrate, each entirely inside one 10 m cell and one 20 m cell and at least
three cells away from the substrate boundary. Pixel reflectance per band is
the area-weighted mixture f * R_object + (1 - f) * R_substrate with f the
object's area fraction of the pixel (the coverage ratio at 10 m, a quarter of
it at 20 m). Optional Gaussian noise is added per pixel per band, clamped to
[0, 1]; every value is then rounded to four decimals.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bands import BANDS, CAMPAIGN_POLYMERS
from .errors import ConfigError, DomainError, MissingMaterial, ShapeMismatch
from .rasters import RESAMPLERS, Raster, round_half_away_4dp, upsample_2x
from .records import Dataset
from .spectra import SignatureLibrary, band_reflectance

COVERAGE_FRACTIONS: tuple[float, ...] = (0.2, 0.4, 0.6, 0.8, 1.0)
EXTENT_M = 1200
GRID_10 = 120
GRID_20 = 60
WATER_ROWS_10 = 60  # rows [0, 60) are water, [60, 120) are sand

_OBJECT_ROWS_WATER = tuple(3 + 7 * i for i in range(8))
_OBJECT_ROWS_SAND = tuple(63 + 7 * i for i in range(8))
_OBJECT_COLS = tuple(3 + 7 * j for j in range(16))


@dataclass(frozen=True)
class SceneSpec:
    scene_id: str
    polymer: str
    coverage_fraction: float
    library: SignatureLibrary
    noise_sigma: float = 0.0
    seed: int = 0
    extent_m: int = EXTENT_M

    def __post_init__(self):
        if self.coverage_fraction not in COVERAGE_FRACTIONS:
            raise DomainError(
                f"coverage_fraction must be one of {COVERAGE_FRACTIONS}, "
                f"got {self.coverage_fraction}"
            )
        if self.extent_m % 10 or self.extent_m % 20:
            raise DomainError("extent must be divisible by 10 m and 20 m")
        if self.noise_sigma < 0:
            raise DomainError("noise_sigma must be >= 0")
        for material in (self.polymer, "water", "sand"):
            if material not in self.library:
                raise MissingMaterial(f"library lacks {material!r}")


@dataclass(frozen=True)
class ObjectPlacement:
    anchor_10m_cell: tuple[int, int]
    side_m: float


@dataclass(frozen=True)
class LabeledRasterStack:
    spec: SceneSpec
    rasters_10m: dict[str, Raster]
    rasters_20m: dict[str, Raster]
    labels_10m: np.ndarray
    labels_20m: np.ndarray
    coverage_10m: np.ndarray

    @property
    def scene_id(self) -> str:
        return self.spec.scene_id


def object_anchors() -> list[tuple[int, int]]:
    """Anchor 10 m cells of the 256 objects, row-major, water block first."""
    return [
        (r, c)
        for rows in (_OBJECT_ROWS_WATER, _OBJECT_ROWS_SAND)
        for r in rows
        for c in _OBJECT_COLS
    ]


def placements(spec: SceneSpec) -> list[ObjectPlacement]:
    side = 10.0 * float(np.sqrt(spec.coverage_fraction))
    return [ObjectPlacement(anchor, side) for anchor in object_anchors()]


def default_campaign(
    library: SignatureLibrary,
    seed: int,
    polymers=None,
    coverages=None,
    noise_sigma: float = 0.0,
) -> list[SceneSpec]:
    """One SceneSpec per (polymer, coverage): 6 x 5 = 30 scenes by default.

    Per-scene seeds are derived from the campaign seed by scene index, so
    scenes can be built in any order (or in parallel) with identical results.
    """
    polymers = tuple(polymers) if polymers is not None else CAMPAIGN_POLYMERS
    coverages = tuple(coverages) if coverages is not None else COVERAGE_FRACTIONS
    for material in polymers + ("water", "sand"):
        if material not in library:
            raise MissingMaterial(f"library lacks {material!r}")
    specs = []
    index = 0
    for polymer in polymers:
        for coverage in coverages:
            scene_seed = int(
                np.random.SeedSequence(seed, spawn_key=(index,)).generate_state(
                    1, np.uint64
                )[0]
            )
            specs.append(
                SceneSpec(
                    scene_id=f"{polymer}_{int(round(coverage * 100))}",
                    polymer=polymer,
                    coverage_fraction=coverage,
                    library=library,
                    noise_sigma=noise_sigma,
                    seed=scene_seed,
                )
            )
            index += 1
    return specs


def build_scene(spec: SceneSpec) -> LabeledRasterStack:
    f = spec.coverage_fraction
    anchors = object_anchors()

    coverage_10 = np.zeros((GRID_10, GRID_10), dtype=np.float64)
    coverage_20 = np.zeros((GRID_20, GRID_20), dtype=np.float64)
    for r, c in anchors:
        coverage_10[r, c] = f
        coverage_20[r // 2, c // 2] = f / 4.0

    labels_10 = np.where(
        coverage_10 > 0.0,
        "Plastic",
        np.where(np.arange(GRID_10)[:, None] < WATER_ROWS_10, "Water", "Sand"),
    )
    labels_20 = np.where(
        coverage_20 > 0.0,
        "Plastic",
        np.where(np.arange(GRID_20)[:, None] < WATER_ROWS_10 // 2, "Water", "Sand"),
    )

    rng = np.random.default_rng(spec.seed)
    rasters_10: dict[str, Raster] = {}
    rasters_20: dict[str, Raster] = {}
    for band in BANDS:
        poly = band_reflectance(spec.library[spec.polymer], band)
        water = band_reflectance(spec.library["water"], band)
        sand = band_reflectance(spec.library["sand"], band)
        if band.native_resolution_m == 10:
            grid_n, coverage, boundary = GRID_10, coverage_10, WATER_ROWS_10
        else:
            grid_n, coverage, boundary = GRID_20, coverage_20, WATER_ROWS_10 // 2
        substrate = np.where(np.arange(grid_n)[:, None] < boundary, water, sand)
        values = coverage * poly + (1.0 - coverage) * substrate
        if spec.noise_sigma > 0.0:
            values = values + rng.normal(0.0, spec.noise_sigma, size=values.shape)
            values = np.clip(values, 0.0, 1.0)
        values = round_half_away_4dp(values)
        raster = Raster(
            band.name, grid_n, grid_n, band.native_resolution_m, values.astype(np.float32)
        )
        (rasters_10 if band.native_resolution_m == 10 else rasters_20)[band.name] = raster

    return LabeledRasterStack(
        spec=spec,
        rasters_10m=rasters_10,
        rasters_20m=rasters_20,
        labels_10m=labels_10,
        labels_20m=labels_20,
        coverage_10m=coverage_10,
    )


def campaign_dataset(stacks, resampler: str = "bilinear") -> Dataset:
    """Assemble the 10 m pixel table: 20 m bands are upsampled, labels come
    from the 10 m grid, records run scene by scene in row-major pixel order."""
    stacks = list(stacks)
    if not stacks:
        raise ShapeMismatch("no scenes to assemble")
    if resampler not in RESAMPLERS:
        raise ConfigError(f"resampler must be one of {RESAMPLERS}, got {resampler!r}")

    per_scene = GRID_10 * GRID_10
    n = per_scene * len(stacks)
    bands = np.empty((n, len(BANDS)), dtype=np.float64)
    labels = np.empty(n, dtype="<U7")
    scenes = np.empty(n, dtype="<U16")
    polymers = np.zeros(n, dtype="<U8")
    coverage = np.full(n, np.nan, dtype=np.float64)

    for s, stack in enumerate(stacks):
        rows = slice(s * per_scene, (s + 1) * per_scene)
        for j, band in enumerate(BANDS):
            if band.native_resolution_m == 10:
                raster = stack.rasters_10m[band.name]
            else:
                raster = upsample_2x(stack.rasters_20m[band.name], resampler)
            if raster.values.shape != (GRID_10, GRID_10):
                raise ShapeMismatch(
                    f"{stack.scene_id}/{band.name}: raster is {raster.values.shape}"
                )
            bands[rows, j] = raster.values.astype(np.float64).ravel()
        labels[rows] = stack.labels_10m.ravel()
        scenes[rows] = stack.scene_id
        plastic = stack.labels_10m.ravel() == "Plastic"
        base = s * per_scene
        plastic_idx = base + np.flatnonzero(plastic)
        polymers[plastic_idx] = stack.spec.polymer
        coverage[plastic_idx] = 100.0 * stack.coverage_10m.ravel()[plastic]

    dataset = Dataset(
        pixel_ids=np.arange(n, dtype=np.int64),
        sources=np.full(n, "simulated", dtype="<U9"),
        scenes=scenes,
        labels=labels,
        polymers=polymers,
        coverage_pct=coverage,
        coverage_partial=np.zeros(n, dtype=bool),
        bands=bands,
        provenance={
            "generator": "debris-spectra 0.1.0",
            "kind": "simulated-campaign",
            "resampler": resampler,
            "scenes": ",".join(stack.scene_id for stack in stacks),
        },
    )
    return dataset
