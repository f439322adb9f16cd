"""Seeded synthetic bilateral breast phantoms with optional occult lesions.

Each case carries four views (left/right CC and MLO). Textures are value
noise: three octaves of smoothed white noise, with a component shared
between sides to model bilateral tissue similarity. Left images keep the
chest wall at the left edge; right images are stored mirrored (chest wall
at the right edge), matching real acquisition orientation.
"""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from .errors import InvalidParams, UnreadableFile
from .image import GrayImage, load_image, save_image

VIEWS = ("cc", "mlo")
IMAGE_KEYS = ("left_cc", "right_cc", "left_mlo", "right_mlo")


@dataclass(frozen=True)
class PhantomParams:
    size: int = 512
    texture_correlation: float = 0.5
    lesion_contrast: float = 0.15
    lesion_radius: float = 14.0
    lesion_jitter: float = 6.0
    noise_sigma: float = 0.02

    def __post_init__(self):
        if self.size < 32:
            raise InvalidParams("size must be >= 32")
        if not 0.0 <= self.texture_correlation <= 1.0:
            raise InvalidParams("texture_correlation must be in [0, 1]")
        if not 0.0 <= self.lesion_contrast <= 1.0:
            raise InvalidParams("lesion_contrast must be in [0, 1]")
        if self.lesion_radius <= 0 or self.lesion_jitter < 0 or self.noise_sigma < 0:
            raise InvalidParams("lesion_radius must be > 0; jitter and noise >= 0")


@dataclass(frozen=True)
class CaseRecord:
    case_id: str
    label: str  # 'cancer' | 'control'
    images: dict
    cancer_side: str = "none"  # 'left' | 'right' | 'none'
    lesion_masks: dict | None = None  # per view, in the stored orientation
    lesion_centers: dict | None = None  # per view, canonical (x, y)
    breast_axes: tuple = (0.0, 0.0)

    def __post_init__(self):
        if self.label not in ("cancer", "control"):
            raise InvalidParams(f"unknown label {self.label!r}")
        if (self.label == "cancer") != (self.cancer_side in ("left", "right")):
            raise InvalidParams("cancer label requires a cancer side and vice versa")


def _ellipse_mask(size: int, ax: float, ay: float) -> np.ndarray:
    """Half-ellipse breast region, chest wall flush with the left edge."""
    y, x = np.mgrid[0:size, 0:size]
    cy = (size - 1) / 2.0
    return (x / ax) ** 2 + ((y - cy) / ay) ** 2 <= 1.0


def _value_noise(rng: np.random.Generator, size: int) -> np.ndarray:
    """Three octaves of bicubically upsampled white noise, zero mean."""
    out = np.zeros((size, size))
    for cells, amp in ((8, 1.0), (16, 0.5), (32, 0.25)):
        coarse = rng.standard_normal((cells, cells))
        out += amp * ndimage.zoom(coarse, size / cells, order=3, grid_mode=True,
                                  mode="reflect")
    return out


def _rng_for(seed) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed))


def lesion_profile(size: int, center: tuple, contrast: float, radius: float) -> np.ndarray:
    """Additive Gaussian lesion: contrast * exp(-r^2 / (2 sigma^2)) with
    sigma = radius / 2, in the canonical (chest-left) frame.
    """
    y, x = np.mgrid[0:size, 0:size]
    sigma = radius / 2.0
    r2 = (x - center[0]) ** 2 + (y - center[1]) ** 2
    return contrast * np.exp(-r2 / (2.0 * sigma * sigma))


def generate_case(seed, params: PhantomParams, label: str,
                  case_id: str | None = None) -> CaseRecord:
    """Deterministic case from a seed (an int or a tuple of ints)."""
    if label not in ("cancer", "control"):
        raise InvalidParams(f"unknown label {label!r}")
    rng = _rng_for(seed)
    size = params.size
    ax = size * (0.68 + 0.05 * (rng.random() - 0.5))
    ay = size * (0.42 + 0.04 * (rng.random() - 0.5))
    breast = _ellipse_mask(size, ax, ay)

    cancer_side = "none"
    if label == "cancer":
        cancer_side = "left" if rng.random() < 0.5 else "right"

    rho = params.texture_correlation
    images, lesion_masks, lesion_centers = {}, {}, {}
    for view in VIEWS:
        shared = _value_noise(rng, size)
        fields = {}
        for side in ("left", "right"):
            indep = _value_noise(rng, size)
            tex = rho * shared + (1.0 - rho) * indep
            inside = tex[breast]
            z = (tex - inside.mean()) / max(inside.std(), 1e-12)
            fields[side] = np.clip(0.55 + 0.13 * z, 0.05, 0.95)

        if cancer_side != "none":
            canvas = fields[cancer_side]
            density = ndimage.gaussian_filter(canvas * breast, size / 32.0)
            interior = _ellipse_mask(size, 0.80 * ax, 0.80 * ay)
            cand = interior & (density > np.percentile(density[breast], 60.0))
            if not cand.any():
                cand = interior
            ys, xs = np.nonzero(cand)
            pick = rng.integers(len(ys))
            cx = xs[pick] + rng.uniform(-params.lesion_jitter, params.lesion_jitter)
            cy = ys[pick] + rng.uniform(-params.lesion_jitter, params.lesion_jitter)
            cx = float(np.clip(cx, 0, size - 1))
            cy = float(np.clip(cy, 0, size - 1))
            profile = lesion_profile(size, (cx, cy), params.lesion_contrast,
                                     params.lesion_radius)
            fields[cancer_side] = canvas + profile
            mask = profile >= params.lesion_contrast * np.exp(-2.0)
            if cancer_side == "right":
                mask = mask[:, ::-1]  # stored orientation
            lesion_masks[view] = mask
            lesion_centers[view] = (cx, cy)

        for side in ("left", "right"):
            data = fields[side] * breast
            if params.noise_sigma > 0:
                data = data + rng.normal(0, params.noise_sigma, (size, size)) * breast
            data = np.clip(data, 0.0, 1.0)
            if side == "right":
                data = data[:, ::-1]
            images[f"{side}_{view}"] = GrayImage(data)

    return CaseRecord(
        case_id=case_id or f"case_{abs(hash(str(seed))) % 10 ** 8:08d}",
        label=label,
        images=images,
        cancer_side=cancer_side,
        lesion_masks=lesion_masks or None,
        lesion_centers=lesion_centers or None,
        breast_axes=(ax, ay),
    )


def ground_truth_breast_mask(case: CaseRecord, key: str) -> np.ndarray:
    """Analytic breast mask for a stored image key (e.g. 'right_cc')."""
    size = case.images[key].height
    mask = _ellipse_mask(size, *case.breast_axes)
    if key.startswith("right"):
        mask = mask[:, ::-1]
    return mask


def generate_cohort(seed: int, n_controls: int, n_cancers: int,
                    params: PhantomParams) -> list:
    """Deterministic cohort; per-case RNG streams are keyed on (seed,
    case index) so parallel generation cannot change the output.
    """
    if n_controls < 0 or n_cancers < 0:
        raise InvalidParams("case counts must be >= 0")
    cases = []
    for i in range(n_controls + n_cancers):
        label = "control" if i < n_controls else "cancer"
        cases.append(generate_case((seed, i), params, label,
                                   case_id=f"case_{i:04d}"))
    return cases


def save_cohort(cases, out_dir) -> None:
    """Write manifest.csv (case_id,label,cancer_side) and 16-bit PNGs named
    ``<case_id>_<side>_<view>.png``.
    """
    out_dir = os.fspath(out_dir)
    os.makedirs(out_dir, exist_ok=True)
    with open(os.path.join(out_dir, "manifest.csv"), "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["case_id", "label", "cancer_side"])
        for case in cases:
            writer.writerow([case.case_id, case.label, case.cancer_side])
            for key, img in case.images.items():
                save_image(img, os.path.join(out_dir, f"{case.case_id}_{key}.png"),
                           bit_depth=16)


def load_cohort(in_dir) -> list:
    """Read a cohort saved by save_cohort; ground-truth masks are not
    persisted, so loaded records carry none.
    """
    in_dir = os.fspath(in_dir)
    manifest = os.path.join(in_dir, "manifest.csv")
    if not os.path.isfile(manifest):
        raise UnreadableFile(f"no manifest.csv in {in_dir}")
    cases = []
    with open(manifest, newline="") as fh:
        for row in csv.DictReader(fh):
            images = {
                key: load_image(os.path.join(in_dir, f"{row['case_id']}_{key}.png"))
                for key in IMAGE_KEYS
            }
            cases.append(CaseRecord(case_id=row["case_id"], label=row["label"],
                                    images=images, cancer_side=row["cancer_side"]))
    return cases
