"""Green-magenta false-color fusion of two grayscale images."""

from __future__ import annotations

import numpy as np

from .errors import GridMismatch
from .image import GrayImage, RgbImage


def fuse_green_magenta(a: GrayImage, b: GrayImage) -> RgbImage:
    """Overlay with R = b, G = a, B = b.

    Pixels where a == b render exactly gray; where a dominates, green;
    where b dominates, magenta.
    """
    if a.data.shape != b.data.shape:
        raise GridMismatch("fusion inputs have different dimensions")
    return RgbImage(np.stack([b.data, a.data, b.data], axis=-1))


def discordance(fused: RgbImage) -> np.ndarray:
    """Per-pixel |a - b| of a green-magenta fusion (|G - R|)."""
    return np.abs(fused.data[:, :, 1] - fused.data[:, :, 0])
