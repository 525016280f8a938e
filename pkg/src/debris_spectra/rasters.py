"""Single-band raster container, 2x upsampling, 4-decimal rounding and the
bit-exact binary raster format.

Resampling uses the pixel-center convention: output pixel i (at 10 m) sits at
source coordinate (i + 0.5) / 2 - 0.5 in 20 m cell units. Bilinear and cubic
clamp their stencils to the grid edge; cubic is Catmull-Rom and may overshoot
the source value range, bilinear and nearest cannot.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal

import numpy as np

from .bands import BAND_CODE_INDEX, BAND_NAMES
from .errors import FormatError, ResolutionError, ShapeMismatch

RESAMPLERS = ("nearest", "bilinear", "cubic")

_MAGIC = b"MDRS"
_VERSION = 1
_HEADER = struct.Struct("<4sHHIIH")


@dataclass(frozen=True)
class Raster:
    band: str
    width: int
    height: int
    resolution_m: int
    values: np.ndarray  # (height, width) float32

    def __post_init__(self):
        if self.band not in BAND_CODE_INDEX:
            raise ShapeMismatch(f"unknown band {self.band!r}")
        if self.resolution_m not in (10, 20):
            raise ResolutionError(f"resolution must be 10 or 20 m, got {self.resolution_m}")
        v = np.asarray(self.values, dtype=np.float32)
        if v.shape != (self.height, self.width):
            raise ShapeMismatch(
                f"values shape {v.shape} != ({self.height}, {self.width})"
            )
        if not np.all(np.isfinite(v)):
            raise ShapeMismatch("raster values must be finite")
        object.__setattr__(self, "values", v)


def _axis_coords(n_out: int) -> np.ndarray:
    return (np.arange(n_out) + 0.5) / 2.0 - 0.5


def _bilinear_axis(values: np.ndarray, axis: int) -> np.ndarray:
    n = values.shape[axis]
    s = _axis_coords(2 * n)
    base = np.floor(s).astype(np.int64)
    t = s - base
    i0 = np.clip(base, 0, n - 1)
    i1 = np.clip(base + 1, 0, n - 1)
    v0 = np.take(values, i0, axis=axis)
    v1 = np.take(values, i1, axis=axis)
    shape = [1, 1]
    shape[axis] = t.size
    t = t.reshape(shape)
    return v0 * (1.0 - t) + v1 * t


def _catmullrom_axis(values: np.ndarray, axis: int) -> np.ndarray:
    n = values.shape[axis]
    s = _axis_coords(2 * n)
    base = np.floor(s).astype(np.int64)
    t = s - base
    t2 = t * t
    t3 = t2 * t
    w0 = 0.5 * (-t3 + 2.0 * t2 - t)
    w1 = 0.5 * (3.0 * t3 - 5.0 * t2 + 2.0)
    w2 = 0.5 * (-3.0 * t3 + 4.0 * t2 + t)
    w3 = 0.5 * (t3 - t2)
    shape = [1, 1]
    shape[axis] = t.size
    out = np.zeros_like(np.take(values, np.clip(base, 0, n - 1), axis=axis))
    for off, w in ((-1, w0), (0, w1), (1, w2), (2, w3)):
        idx = np.clip(base + off, 0, n - 1)
        out = out + np.take(values, idx, axis=axis) * w.reshape(shape)
    return out


def upsample_2x(r: Raster, method: str) -> Raster:
    """Upsample a 20 m raster to 10 m (double width and height)."""
    if r.resolution_m != 20:
        raise ResolutionError(f"upsample_2x needs a 20 m raster, got {r.resolution_m} m")
    if method not in RESAMPLERS:
        raise ShapeMismatch(f"unknown resampling method {method!r}")
    v = r.values.astype(np.float64)
    if method == "nearest":
        out = np.repeat(np.repeat(v, 2, axis=0), 2, axis=1)
    elif method == "bilinear":
        out = _bilinear_axis(_bilinear_axis(v, 0), 1)
    else:
        out = _catmullrom_axis(_catmullrom_axis(v, 0), 1)
    return Raster(r.band, 2 * r.width, 2 * r.height, 10, out.astype(np.float32))


def _round4_scalar(x: float) -> float:
    # Interpret the float by its shortest decimal repr so that decimal halves
    # (0.12345) round the way a human reads them.
    return float(Decimal(repr(float(x))).quantize(Decimal("0.0001"), rounding=ROUND_HALF_UP))


def round_half_away_4dp(values: np.ndarray) -> np.ndarray:
    """Round to 4 decimals, halves away from zero; returns float64."""
    v = np.asarray(values, dtype=np.float64)
    uniq, inverse = np.unique(v.ravel(), return_inverse=True)
    rounded = np.array([_round4_scalar(u) for u in uniq], dtype=np.float64)
    return rounded[inverse.ravel()].reshape(v.shape)


def round_to_4dp(r: Raster) -> Raster:
    return Raster(
        r.band,
        r.width,
        r.height,
        r.resolution_m,
        round_half_away_4dp(r.values.astype(np.float64)).astype(np.float32),
    )


def write_raster(r: Raster, path) -> None:
    header = _HEADER.pack(
        _MAGIC, _VERSION, BAND_CODE_INDEX[r.band], r.width, r.height, r.resolution_m
    )
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(np.ascontiguousarray(r.values, dtype="<f4").tobytes())


def read_raster(path) -> Raster:
    with open(path, "rb") as fh:
        blob = fh.read()
    if len(blob) < _HEADER.size:
        raise FormatError(f"{path}: truncated header")
    magic, version, band_code, width, height, res = _HEADER.unpack_from(blob)
    if magic != _MAGIC:
        raise FormatError(f"{path}: bad magic {magic!r}")
    if version != _VERSION:
        raise FormatError(f"{path}: unsupported version {version}")
    if band_code >= len(BAND_NAMES):
        raise FormatError(f"{path}: bad band code {band_code}")
    expected = _HEADER.size + 4 * width * height
    if len(blob) != expected:
        raise FormatError(f"{path}: payload is {len(blob)} bytes, expected {expected}")
    values = np.frombuffer(blob, dtype="<f4", offset=_HEADER.size).reshape(height, width)
    try:
        return Raster(BAND_NAMES[band_code], width, height, res, values.copy())
    except (ResolutionError, ShapeMismatch) as exc:
        raise FormatError(f"{path}: {exc}") from None
