"""Parallel-beam Radon transform and filtered back projection."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage
from scipy.fft import fft, ifft

from .errors import GridMismatch, NegativeInput, TooFewAngles
from .image import GrayImage


@dataclass(frozen=True)
class Sinogram:
    """Line integrals indexed by centered displacement t (rows) and angle
    theta in [0, pi) (columns).
    """

    values: np.ndarray
    t_grid: np.ndarray
    theta_grid: np.ndarray

    def __post_init__(self):
        if self.values.shape != (len(self.t_grid), len(self.theta_grid)):
            raise GridMismatch("sinogram values do not match the (t, theta) grids")
        if np.any(np.diff(self.theta_grid) <= 0):
            raise GridMismatch("theta grid must be strictly increasing")

    @property
    def n_t(self) -> int:
        return len(self.t_grid)

    @property
    def n_theta(self) -> int:
        return len(self.theta_grid)

    def same_grid(self, other: "Sinogram") -> bool:
        return (self.values.shape == other.values.shape
                and np.array_equal(self.t_grid, other.t_grid)
                and np.array_equal(self.theta_grid, other.theta_grid))


def _grids(w: int, h: int, n_theta: int):
    n_t = math.ceil(math.hypot(w, h))
    if n_t % 2 == 0:
        n_t += 1
    t_grid = np.arange(n_t) - (n_t - 1) / 2.0
    theta_grid = np.arange(n_theta) * math.pi / n_theta
    return t_grid, theta_grid


def radon(img: GrayImage, n_theta: int = 180) -> Sinogram:
    """Forward transform by bicubic rotation resampling plus column sums.

    t = (x - cx) cos(theta) + (y - cy) sin(theta) with x rightward and
    y downward; angles theta_k = k*pi/n_theta. Each column integrates to
    the total image mass (up to interpolation error).
    """
    if n_theta < 1:
        raise TooFewAngles("n_theta must be >= 1")
    if np.any(img.data < 0):
        raise NegativeInput("radon requires a nonnegative image")
    h, w = img.data.shape
    t_grid, theta_grid = _grids(w, h, n_theta)
    n_t = len(t_grid)

    canvas = np.zeros((n_t, n_t))
    oy, ox = (n_t - h) // 2, (n_t - w) // 2
    canvas[oy:oy + h, ox:ox + w] = img.data
    coeffs = ndimage.spline_filter(canvas, order=3, mode="constant")
    c = (n_t - 1) / 2.0

    tt, ss = np.meshgrid(t_grid, t_grid, indexing="ij")
    values = np.empty((n_t, n_theta))
    for k, th in enumerate(theta_grid):
        cos, sin = math.cos(th), math.sin(th)
        x = c + tt * cos - ss * sin
        y = c + tt * sin + ss * cos
        sample = ndimage.map_coordinates(coeffs, [y, x], order=3,
                                         prefilter=False, mode="constant")
        values[:, k] = sample.sum(axis=1)
    np.clip(values, 0.0, None, out=values)
    return Sinogram(values=values, t_grid=t_grid, theta_grid=theta_grid)


def _ramp_filter(n_fft: int, window: str) -> np.ndarray:
    # Ram-Lak response derived from the band-limited spatial kernel; using
    # |f| directly biases the DC term on discrete data
    kernel = np.zeros(n_fft)
    kernel[0] = 0.25
    odd = np.arange(1, n_fft // 2 + 1, 2)
    kernel[odd] = -1.0 / (math.pi * odd) ** 2
    kernel[-odd] = -1.0 / (math.pi * odd) ** 2
    ramp = 2.0 * np.real(fft(kernel))
    if window == "hann":
        f = np.fft.fftfreq(n_fft)
        ramp *= 0.5 * (1 + np.cos(2 * math.pi * f))
    elif window != "none":
        raise ValueError(f"unknown apodization window {window!r}")
    return ramp


def filter_backproject(values: np.ndarray, t_grid: np.ndarray, theta_grid: np.ndarray,
                       out_w: int, out_h: int, window: str = "none") -> np.ndarray:
    """Ram-Lak filtered back projection of raw (possibly signed) sinogram
    values; returns the reconstructed array without range clamping.
    """
    n_t, n_theta = values.shape
    if n_theta < 2:
        raise TooFewAngles("filtered back projection needs at least 2 angles")
    n_fft = 1 << max(6, (2 * n_t - 1).bit_length())
    ramp = _ramp_filter(n_fft, window)
    spec = fft(values, n=n_fft, axis=0) * ramp[:, None]
    filtered = np.real(ifft(spec, axis=0))[:n_t]

    cx, cy = (out_w - 1) / 2.0, (out_h - 1) / 2.0
    xs = np.arange(out_w) - cx
    ys = np.arange(out_h) - cy
    xg, yg = np.meshgrid(xs, ys)
    recon = np.zeros((out_h, out_w))
    for k, th in enumerate(theta_grid):
        t = xg * math.cos(th) + yg * math.sin(th)
        recon += np.interp(t, t_grid, filtered[:, k], left=0.0, right=0.0)
    return recon * (math.pi / (2.0 * n_theta))


def iradon(sino: Sinogram, out_w: int, out_h: int, window: str = "none") -> GrayImage:
    """Inverse transform; values may overshoot [0, 1] and are clamped only
    on export.
    """
    recon = filter_backproject(sino.values, sino.t_grid, sino.theta_grid,
                               out_w, out_h, window=window)
    return GrayImage(recon)
