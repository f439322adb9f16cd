"""Grayscale / RGB raster types, PNG-PGM I/O, Catmull-Rom resizing, flips.

Intensities live in the real interval [0, 1] internally, whatever the bit
depth on disk. Images are immutable values: the backing arrays are marked
read-only so they can be shared freely across workers.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import cv2
import numpy as np

from .errors import DegenerateSize, IoFailure, UnreadableFile, UnsupportedFormat

_SUPPORTED_EXT = {".png", ".pgm"}


def _freeze(data: np.ndarray) -> np.ndarray:
    out = np.ascontiguousarray(data, dtype=np.float64)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class GrayImage:
    """Single-channel raster, shape (height, width), row-major, y down.

    Values are finite reals; pipeline stages that can overshoot [0, 1]
    (filtered back projection, transform visualizations) keep the raw
    values and clamp only on export.
    """

    data: np.ndarray

    def __post_init__(self):
        if self.data.ndim != 2:
            raise UnsupportedFormat(f"expected 2-d array, got shape {self.data.shape}")
        if not np.all(np.isfinite(self.data)):
            raise UnsupportedFormat("image contains non-finite values")
        object.__setattr__(self, "data", _freeze(self.data))

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def height(self) -> int:
        return self.data.shape[0]


@dataclass(frozen=True)
class RgbImage:
    """Three-channel raster, shape (height, width, 3), channels R, G, B."""

    data: np.ndarray

    def __post_init__(self):
        if self.data.ndim != 3 or self.data.shape[2] != 3:
            raise UnsupportedFormat(f"expected (h, w, 3) array, got shape {self.data.shape}")
        if not np.all(np.isfinite(self.data)):
            raise UnsupportedFormat("image contains non-finite values")
        object.__setattr__(self, "data", _freeze(self.data))

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def height(self) -> int:
        return self.data.shape[0]


def load_image(path) -> GrayImage:
    """Load an 8- or 16-bit PNG/PGM as a GrayImage in [0, 1].

    RGB inputs are converted to luma. Intensities are divided by the
    bit-depth maximum (255 or 65535).
    """
    path = os.fspath(path)
    ext = os.path.splitext(path)[1].lower()
    if ext not in _SUPPORTED_EXT:
        raise UnsupportedFormat(f"unsupported extension {ext!r} (PNG and PGM only)")
    if not os.path.isfile(path):
        raise UnreadableFile(f"no such file: {path}")
    raw = cv2.imread(path, cv2.IMREAD_UNCHANGED)
    if raw is None:
        raise UnreadableFile(f"could not decode {path}")
    if raw.dtype == np.uint8:
        scale = 255.0
    elif raw.dtype == np.uint16:
        scale = 65535.0
    else:
        raise UnsupportedFormat(f"unsupported sample type {raw.dtype} in {path}")
    if raw.ndim == 3:
        if raw.shape[2] == 4:
            raw = raw[:, :, :3]
        if raw.shape[2] != 3:
            raise UnsupportedFormat(f"unsupported channel count {raw.shape[2]} in {path}")
        b, g, r = raw[:, :, 0], raw[:, :, 1], raw[:, :, 2]
        data = (0.299 * r + 0.587 * g + 0.114 * b) / scale
    else:
        data = raw / scale
    return GrayImage(np.clip(data, 0.0, 1.0))


def load_rgb(path) -> RgbImage:
    """Load an 8- or 16-bit color PNG as an RgbImage in [0, 1]."""
    path = os.fspath(path)
    if not os.path.isfile(path):
        raise UnreadableFile(f"no such file: {path}")
    raw = cv2.imread(path, cv2.IMREAD_UNCHANGED)
    if raw is None:
        raise UnreadableFile(f"could not decode {path}")
    if raw.dtype == np.uint8:
        scale = 255.0
    elif raw.dtype == np.uint16:
        scale = 65535.0
    else:
        raise UnsupportedFormat(f"unsupported sample type {raw.dtype} in {path}")
    if raw.ndim != 3:
        raise UnsupportedFormat(f"{path} is not a color image")
    rgb = raw[:, :, 2::-1] / scale
    return RgbImage(rgb)


def save_image(img, path, bit_depth: int = 16) -> None:
    """Write an image as PNG or PGM at the given bit depth (8 or 16).

    Values are clamped to [0, 1] and quantized; a load of the saved file
    matches the original within one quantization step per pixel.
    """
    if bit_depth not in (8, 16):
        raise UnsupportedFormat(f"bit_depth must be 8 or 16, got {bit_depth}")
    path = os.fspath(path)
    parent = os.path.dirname(path) or "."
    if not os.path.isdir(parent):
        raise IoFailure(f"parent directory does not exist: {parent}")
    vmax = (1 << bit_depth) - 1
    dtype = np.uint8 if bit_depth == 8 else np.uint16
    quant = np.rint(np.clip(img.data, 0.0, 1.0) * vmax).astype(dtype)
    if isinstance(img, RgbImage):
        quant = quant[:, :, ::-1]  # cv2 expects BGR
    ok = cv2.imwrite(path, quant)
    if not ok:
        raise IoFailure(f"failed to write {path}")


def resize_bicubic(img: GrayImage, new_w: int, new_h: int) -> GrayImage:
    """Resample with a separable Catmull-Rom kernel, edge-clamped.

    Output is clamped to [0, 1]. Resampling to the same size is the
    identity (pixel centers align exactly).
    """
    if new_w < 2 or new_h < 2:
        raise DegenerateSize(f"target size {new_w}x{new_h} too small")
    data = _resample_axis(img.data, new_h, axis=0)
    data = _resample_axis(data, new_w, axis=1)
    return GrayImage(np.clip(data, 0.0, 1.0))


def _resample_axis(data: np.ndarray, new_n: int, axis: int) -> np.ndarray:
    old_n = data.shape[axis]
    if old_n == new_n:
        return data
    pos = (np.arange(new_n) + 0.5) * (old_n / new_n) - 0.5
    base = np.floor(pos).astype(int)
    t = pos - base
    # Catmull-Rom weights for the four taps around each sample position
    t2, t3 = t * t, t * t * t
    w = np.stack([
        0.5 * (-t3 + 2 * t2 - t),
        0.5 * (3 * t3 - 5 * t2 + 2),
        0.5 * (-3 * t3 + 4 * t2 + t),
        0.5 * (t3 - t2),
    ])
    moved = np.moveaxis(data, axis, 0)
    out = np.zeros((new_n,) + moved.shape[1:])
    for k in range(4):
        idx = np.clip(base - 1 + k, 0, old_n - 1)
        out += w[k].reshape((-1,) + (1,) * (moved.ndim - 1)) * moved[idx]
    return np.moveaxis(out, 0, axis)


def flip(img: GrayImage, axis: str) -> GrayImage:
    """Mirror the image; axis 'horizontal' flips left-right, 'vertical' top-bottom."""
    if axis == "horizontal":
        return GrayImage(img.data[:, ::-1])
    if axis == "vertical":
        return GrayImage(img.data[::-1, :])
    raise UnsupportedFormat(f"unknown flip axis {axis!r}")
