"""Breast segmentation, crop/resize, orientation standardization, CLAHE."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .errors import DegenerateSize, GridMismatch, InvalidParams, NoForeground
from .image import GrayImage, flip, resize_bicubic


@dataclass(frozen=True)
class BreastMask:
    """Boolean foreground mask with its tight bounding box (x0, y0, x1, y1).

    The box is inclusive-exclusive: pixels with x0 <= x < x1, y0 <= y < y1.
    The mask holds exactly one 8-connected foreground component.
    """

    width: int
    height: int
    mask: np.ndarray
    bbox: tuple[int, int, int, int]


def _otsu_threshold(values: np.ndarray, nbins: int = 256) -> float:
    hist, edges = np.histogram(values, bins=nbins, range=(0.0, 1.0))
    hist = hist.astype(np.float64)
    total = hist.sum()
    centers = 0.5 * (edges[:-1] + edges[1:])
    w0 = np.cumsum(hist)
    w1 = total - w0
    sum0 = np.cumsum(hist * centers)
    mu0 = np.divide(sum0, w0, out=np.zeros_like(sum0), where=w0 > 0)
    mu1 = np.divide(sum0[-1] - sum0, w1, out=np.zeros_like(sum0), where=w1 > 0)
    between = w0 * w1 * (mu0 - mu1) ** 2
    return centers[int(np.argmax(between))]


def _disk(radius: int) -> np.ndarray:
    y, x = np.ogrid[-radius:radius + 1, -radius:radius + 1]
    return x * x + y * y <= radius * radius


_EIGHT = np.ones((3, 3), dtype=bool)


def segment_breast(img: GrayImage) -> BreastMask:
    """Foreground mask: Otsu threshold, largest 8-connected component,
    morphological closing with a 5-pixel-radius disk.
    """
    data = img.data
    if data.size == 0:
        raise NoForeground("empty image")
    # threshold a lightly smoothed copy so tissue texture cannot punch
    # holes in the foreground
    smooth = ndimage.gaussian_filter(data, 2.0)
    # half the Otsu level: the between-class optimum sits well inside the
    # tissue intensity range and would erode the dim breast edge
    thresh = 0.5 * _otsu_threshold(smooth)
    fg = smooth > thresh
    if not fg.any():
        raise NoForeground("no pixel above the automatic threshold")
    labels, n = ndimage.label(fg, structure=_EIGHT)
    sizes = np.bincount(labels.ravel())
    sizes[0] = 0
    mask = labels == int(np.argmax(sizes))
    # pad before closing: plain binary_closing erodes components touching
    # the frame (e.g. the chest wall edge)
    pad = 6
    padded = np.pad(mask, pad, mode="edge")
    padded = ndimage.binary_closing(padded, structure=_disk(5))
    mask = ndimage.binary_fill_holes(padded[pad:-pad, pad:-pad])
    # closing with a border-touching component can leave crumbs; keep the
    # largest component so the single-component invariant holds
    labels, n = ndimage.label(mask, structure=_EIGHT)
    if n > 1:
        sizes = np.bincount(labels.ravel())
        sizes[0] = 0
        mask = labels == int(np.argmax(sizes))
    if not mask.any():
        raise NoForeground("mask vanished during morphology")
    ys, xs = np.nonzero(mask)
    bbox = (int(xs.min()), int(ys.min()), int(xs.max()) + 1, int(ys.max()) + 1)
    return BreastMask(width=img.width, height=img.height, mask=mask, bbox=bbox)


def crop_resize_to(img: GrayImage, mask: BreastMask, target_w: int, target_h: int) -> GrayImage:
    """Zero the background, crop to the mask's bounding box, resize."""
    if (mask.height, mask.width) != img.data.shape:
        raise GridMismatch("mask dimensions do not match the image")
    x0, y0, x1, y1 = mask.bbox
    cropped = (img.data * mask.mask)[y0:y1, x0:x1]
    return resize_bicubic(GrayImage(cropped), target_w, target_h)


def standardize_orientation(img: GrayImage, side: str) -> GrayImage:
    """Horizontally flip right-side images so both sides share one orientation."""
    if side == "left":
        return img
    if side == "right":
        return flip(img, "horizontal")
    raise InvalidParams(f"side must be 'left' or 'right', got {side!r}")


def clahe(img: GrayImage, clip_limit: float = 0.01, tiles: tuple[int, int] = (8, 8),
          nbins: int = 256) -> GrayImage:
    """Contrast-limited adaptive histogram equalization.

    Per-tile histograms are clipped at clip_limit * (pixels per tile) with
    the excess redistributed uniformly; pixel mappings are bilinearly
    blended between the four surrounding tile centers.
    """
    if not (0.0 < clip_limit <= 1.0):
        raise InvalidParams(f"clip_limit must be in (0, 1], got {clip_limit}")
    nx, ny = tiles
    if nx < 1 or ny < 1:
        raise InvalidParams(f"tiles must be >= (1, 1), got {tiles}")
    h, w = img.data.shape
    tile_w, tile_h = w // nx, h // ny
    if tile_w < 2 or tile_h < 2:
        raise DegenerateSize(f"tiles of {tile_w}x{tile_h} pixels are smaller than 2x2")

    # pad on the bottom/right so the grid divides evenly
    pad_h, pad_w = ny * tile_h, nx * tile_w
    if (h % ny) or (w % nx):
        tile_h = -(-h // ny)
        tile_w = -(-w // nx)
        pad_h, pad_w = ny * tile_h, nx * tile_w
    padded = np.pad(img.data, ((0, pad_h - h), (0, pad_w - w)), mode="reflect") \
        if (pad_h, pad_w) != (h, w) else img.data

    bins = np.clip((padded * nbins).astype(int), 0, nbins - 1)
    npix = tile_h * tile_w
    clip = max(clip_limit * npix, 1.0)

    luts = np.empty((ny, nx, nbins))
    for ty in range(ny):
        for tx in range(nx):
            tb = bins[ty * tile_h:(ty + 1) * tile_h, tx * tile_w:(tx + 1) * tile_w]
            hist = np.bincount(tb.ravel(), minlength=nbins).astype(np.float64)
            excess = np.maximum(hist - clip, 0.0).sum()
            hist = np.minimum(hist, clip) + excess / nbins
            luts[ty, tx] = np.cumsum(hist) / npix

    # bilinear blend between tile-center mappings, clamped at the borders
    ys = np.arange(pad_h)
    xs = np.arange(pad_w)
    fy = np.clip((ys - (tile_h - 1) / 2.0) / tile_h, 0.0, ny - 1.0)
    fx = np.clip((xs - (tile_w - 1) / 2.0) / tile_w, 0.0, nx - 1.0)
    y0 = np.minimum(fy.astype(int), ny - 2) if ny > 1 else np.zeros(pad_h, int)
    x0 = np.minimum(fx.astype(int), nx - 2) if nx > 1 else np.zeros(pad_w, int)
    wy = (fy - y0)[:, None] if ny > 1 else np.zeros((pad_h, 1))
    wx = (fx - x0)[None, :] if nx > 1 else np.zeros((1, pad_w))
    y1 = np.minimum(y0 + 1, ny - 1)
    x1 = np.minimum(x0 + 1, nx - 1)

    g = np.empty((pad_h, pad_w))
    y0g, y1g = y0[:, None], y1[:, None]
    x0g, x1g = x0[None, :], x1[None, :]
    g = ((1 - wy) * (1 - wx) * luts[y0g, x0g, bins]
         + (1 - wy) * wx * luts[y0g, x1g, bins]
         + wy * (1 - wx) * luts[y1g, x0g, bins]
         + wy * wx * luts[y1g, x1g, bins])
    return GrayImage(np.clip(g[:h, :w], 0.0, 1.0))
