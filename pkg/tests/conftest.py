import numpy as np
import pytest
from scipy import ndimage

from rcdtscreen.image import GrayImage


def gaussian_blob(n, cx, cy, sigma=8.0, amp=0.8):
    y, x = np.mgrid[0:n, 0:n]
    return amp * np.exp(-((x - cx) ** 2 + (y - cy) ** 2) / (2 * sigma * sigma))


def smooth_ellipse(n, rx=0.35, ry=0.25, amp=0.8, blur=3.0):
    y, x = np.mgrid[0:n, 0:n]
    disk = ((x - n / 2) ** 2 / (n * rx) ** 2
            + (y - n / 2) ** 2 / (n * ry) ** 2) <= 1.0
    return ndimage.gaussian_filter(disk * amp, blur)


def smooth_random(n, seed, blur=4.0):
    rng = np.random.default_rng(seed)
    img = ndimage.gaussian_filter(rng.random((n, n)), blur)
    img -= img.min()
    return img / max(img.max(), 1e-12)


@pytest.fixture
def smooth_phantom():
    return GrayImage(smooth_ellipse(128))
