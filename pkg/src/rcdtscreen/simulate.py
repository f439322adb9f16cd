"""Contralateral-image simulator interface with a deterministic mirror
baseline; external mode plugs in images produced by any generator.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .errors import GridMismatch, InvalidParams, MissingExternalImage
from .image import GrayImage, flip, load_image


@dataclass(frozen=True)
class SimulatorSpec:
    """kind 'mirror': horizontal flip + Gaussian blur of smoothing_sigma px.
    kind 'external': load ``<case_id>_<view>_sim.png`` from external_dir.
    """

    kind: str = "mirror"
    smoothing_sigma: float = 2.0
    external_dir: str | None = None

    def __post_init__(self):
        if self.kind not in ("mirror", "external"):
            raise InvalidParams(f"unknown simulator kind {self.kind!r}")
        if self.smoothing_sigma < 0:
            raise InvalidParams("smoothing_sigma must be >= 0")
        if self.kind == "external" and not self.external_dir:
            raise InvalidParams("external simulator needs external_dir")


def external_sim_path(external_dir, case_id: str, view: str) -> str:
    return os.path.join(os.fspath(external_dir), f"{case_id}_{view}_sim.png")


def simulate_contralateral(input_img: GrayImage, spec: SimulatorSpec,
                           case_id: str, view: str = "cc") -> GrayImage:
    """Predict the opposite-side image from a preprocessed input.

    Deterministic in (input, spec, case_id); output dimensions equal the
    input's.
    """
    if spec.kind == "mirror":
        out = flip(input_img, "horizontal")
        if spec.smoothing_sigma > 0:
            blurred = ndimage.gaussian_filter(out.data, spec.smoothing_sigma)
            out = GrayImage(np.clip(blurred, 0.0, 1.0))
        return out
    path = external_sim_path(spec.external_dir, case_id, view)
    if not os.path.isfile(path):
        raise MissingExternalImage(f"no simulated image at {path}")
    out = load_image(path)
    if out.data.shape != input_img.data.shape:
        raise GridMismatch(
            f"simulated image {path} is {out.width}x{out.height}, "
            f"input is {input_img.width}x{input_img.height}")
    return out
