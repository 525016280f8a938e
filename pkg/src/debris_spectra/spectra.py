"""Material spectral signatures and their resolution onto MSI band centers.

`builtin_default_library` ships a deterministic synthetic library: flat polymer
baselines carved by Gaussian absorption dips at 931/1215/1417/1732 nm, a dark
water curve with a small blue-green peak, and a bright slowly rising sand
curve. It is a generated constant (values rounded to 6 decimals, no RNG), so
it is identical across runs and platforms. Measured libraries are loaded from
signature CSVs instead.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .bands import BANDS, LIBRARY_POLYMERS, MsiBand
from .errors import DomainError, OutOfSpan, ParseError

SIGNATURE_KINDS = ("polymer", "water", "sand", "wood")

SPAN_LO_NM = 440.0
SPAN_HI_NM = 2250.0

# Shared absorption features of the synthetic polymers: center, sigma, depth
# (relative to baseline).
ABSORPTION_DIPS = ((931.0, 25.0, 0.35), (1215.0, 30.0, 0.45), (1417.0, 30.0, 0.50), (1732.0, 35.0, 0.55))

# LDPE additionally carries a near-infrared reflectance peak and a roll-off
# into the SWIR (thin translucent film over water); the other polymers are
# spectrally flat, so their normalized band ratios match their substrate's.
STRUCTURED_POLYMER = "LDPE"
NIR_PEAK_CENTER_NM = 810.0
NIR_PEAK_SIGMA_NM = 55.0
NIR_PEAK_HEIGHT = 0.07
SWIR_ROLLOFF_CENTER_NM = 1150.0
SWIR_ROLLOFF_WIDTH_NM = 130.0
SWIR_ROLLOFF_LEVEL = 0.03

# Distinct baseline per polymer; PET lowest (darkest, water-affine) and PVC
# highest (bright, sand-affine). Baselines are spread widely so that the
# mixing rays of different polymers stay separated.
POLYMER_BASELINES = {
    "PET": 0.040,
    "PA66": 0.100,
    "PA6": 0.160,
    "PP": 0.220,
    "uNAPO": 0.260,
    "LDPE": 0.300,
    "PVC": 0.370,
}


@dataclass(frozen=True)
class SpectralSignature:
    material_name: str
    kind: str
    wavelengths_nm: np.ndarray
    reflectance: np.ndarray

    def __post_init__(self):
        wl = np.asarray(self.wavelengths_nm, dtype=np.float64)
        rf = np.asarray(self.reflectance, dtype=np.float64)
        if self.kind not in SIGNATURE_KINDS:
            raise DomainError(f"{self.material_name}: unknown kind {self.kind!r}")
        if wl.ndim != 1 or wl.shape != rf.shape or wl.size < 2:
            raise DomainError(f"{self.material_name}: need >= 2 aligned samples")
        if not np.all(np.diff(wl) > 0):
            raise DomainError(f"{self.material_name}: wavelengths must be strictly increasing")
        if not np.all((rf >= 0.0) & (rf <= 1.0)):
            raise DomainError(f"{self.material_name}: reflectance outside [0, 1]")
        object.__setattr__(self, "wavelengths_nm", wl)
        object.__setattr__(self, "reflectance", rf)

    def check_span(self) -> None:
        """Library signatures must make every MSI band center interpolable."""
        wl = self.wavelengths_nm
        if wl[0] > SPAN_LO_NM or wl[-1] < SPAN_HI_NM:
            raise DomainError(
                f"{self.material_name}: span [{wl[0]}, {wl[-1]}] does not cover "
                f"[{SPAN_LO_NM}, {SPAN_HI_NM}] nm"
            )

    def interpolate(self, wavelength_nm: float) -> float:
        wl = self.wavelengths_nm
        if wavelength_nm < wl[0] or wavelength_nm > wl[-1]:
            raise OutOfSpan(
                f"{self.material_name}: {wavelength_nm} nm outside sampled range "
                f"[{wl[0]}, {wl[-1]}]"
            )
        return float(np.interp(wavelength_nm, wl, self.reflectance))


@dataclass(frozen=True)
class SignatureLibrary:
    signatures: dict[str, SpectralSignature] = field(default_factory=dict)

    def __contains__(self, material: str) -> bool:
        return material in self.signatures

    def __getitem__(self, material: str) -> SpectralSignature:
        return self.signatures[material]

    def materials(self) -> tuple[str, ...]:
        return tuple(self.signatures)


def band_reflectance(sig: SpectralSignature, band: MsiBand) -> float:
    """Linear interpolation of the signature at the band center."""
    return sig.interpolate(band.central_wavelength_nm)


def band_vector(sig: SpectralSignature) -> np.ndarray:
    """Reflectance at all ten band centers, canonical order."""
    return np.array([band_reflectance(sig, b) for b in BANDS], dtype=np.float64)


def load_library(path) -> SignatureLibrary:
    """Load a signature CSV (material,kind,wavelength_nm,reflectance)."""
    groups: dict[str, tuple[str, list[float], list[float]]] = {}
    current = None
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(f"{path}: empty file") from None
        if header != ["material", "kind", "wavelength_nm", "reflectance"]:
            raise ParseError(f"{path}: unexpected header {header!r}")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 4:
                raise ParseError(f"{path}:{lineno}: expected 4 cells")
            material, kind = row[0], row[1]
            try:
                wl, rf = float(row[2]), float(row[3])
            except ValueError:
                raise ParseError(f"{path}:{lineno}: bad number") from None
            if material != current:
                if material in groups:
                    raise ParseError(
                        f"{path}:{lineno}: rows for {material!r} must be contiguous"
                    )
                groups[material] = (kind, [], [])
                current = material
            if groups[material][0] != kind:
                raise ParseError(f"{path}:{lineno}: kind changed within {material!r}")
            groups[material][1].append(wl)
            groups[material][2].append(rf)
    signatures = {}
    for name, (kind, wls, rfs) in groups.items():
        sig = SpectralSignature(name, kind, np.array(wls), np.array(rfs))
        sig.check_span()
        signatures[name] = sig
    return SignatureLibrary(signatures)


def save_library(library: SignatureLibrary, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("material,kind,wavelength_nm,reflectance\n")
        for name, sig in library.signatures.items():
            for wl, rf in zip(sig.wavelengths_nm, sig.reflectance):
                fh.write(f"{name},{sig.kind},{repr(float(wl))},{repr(float(rf))}\n")


def _polymer_curve(grid: np.ndarray, baseline: float, structured: bool = False) -> np.ndarray:
    dip = np.zeros_like(grid)
    for center, sigma, depth in ABSORPTION_DIPS:
        dip += depth * np.exp(-((grid - center) ** 2) / (2.0 * sigma**2))
    level = np.full_like(grid, baseline)
    peak = 0.0
    if structured:
        rolloff = _sigmoid((grid - SWIR_ROLLOFF_CENTER_NM) / SWIR_ROLLOFF_WIDTH_NM)
        level = baseline - (baseline - SWIR_ROLLOFF_LEVEL) * rolloff
        peak = NIR_PEAK_HEIGHT * np.exp(
            -(((grid - NIR_PEAK_CENTER_NM) / NIR_PEAK_SIGMA_NM) ** 2)
        )
    return level * (1.0 - dip) + peak


def _water_curve(grid: np.ndarray) -> np.ndarray:
    # Flat floor with a small narrow blue peak: near-zero beyond 800 nm and
    # featureless in every band the radiometric indices consume, so water's
    # index profile matches that of any spectrally flat material.
    return 0.018 + 0.055 * np.exp(-(((grid - 468.0) / 26.0) ** 2))


def _sigmoid(x: np.ndarray) -> np.ndarray:
    return 1.0 / (1.0 + np.exp(-x))


def _sand_curve(grid: np.ndarray) -> np.ndarray:
    # Bright and slowly rising: most of the rise sits below the green band
    # and in the far SWIR, leaving the green-to-SWIR1 stretch almost flat (so
    # the normalized water/debris indices respond to plastic, not to the bare
    # substrates).
    return (
        0.22
        + 0.10 * _sigmoid((grid - 450.0) / 45.0)
        + 0.08 * _sigmoid((grid - 2000.0) / 120.0)
    )


def builtin_default_library() -> SignatureLibrary:
    """Deterministic synthetic library for the six campaign polymers + uNAPO,
    water and sand."""
    grid = np.arange(440.0, 2250.0 + 1.0, 5.0)
    signatures = {}
    for name in LIBRARY_POLYMERS:
        curve = _polymer_curve(
            grid, POLYMER_BASELINES[name], structured=(name == STRUCTURED_POLYMER)
        )
        signatures[name] = SpectralSignature(name, "polymer", grid, np.round(curve, 6))
    signatures["water"] = SpectralSignature("water", "water", grid, np.round(_water_curve(grid), 6))
    signatures["sand"] = SpectralSignature("sand", "sand", grid, np.round(_sand_curve(grid), 6))
    return SignatureLibrary(signatures)
