"""Radon-domain cumulative distribution transform of bilateral image pairs.

Per projection angle, a monotone warp matches the target projection's CDF
to the template's; the transform stores the warp displacement weighted by
the square root of the (normalized) template projection. The transform of
an image against itself is exactly zero, and amplitude scaling of either
input drops out after per-angle normalization.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GridMismatch, IoFailure, NonMonotoneWarp
from .image import GrayImage, save_image
from .radon import Sinogram, filter_backproject, iradon, radon

#: relative floor added to every sinogram sample before normalization so
#: per-angle CDFs are strictly increasing and invertible
REGULARIZER = 1e-8


@dataclass(frozen=True)
class WarpField:
    """Per-angle monotone displacement maps on a sinogram grid."""

    f: np.ndarray
    t_grid: np.ndarray
    theta_grid: np.ndarray

    def __post_init__(self):
        if self.f.shape != (len(self.t_grid), len(self.theta_grid)):
            raise GridMismatch("warp values do not match the (t, theta) grids")


@dataclass(frozen=True)
class RcdtImage:
    """Signed transform values on a sinogram grid."""

    values: np.ndarray
    t_grid: np.ndarray
    theta_grid: np.ndarray

    def __post_init__(self):
        if self.values.shape != (len(self.t_grid), len(self.theta_grid)):
            raise GridMismatch("transform values do not match the (t, theta) grids")


def normalize_columns(values: np.ndarray) -> np.ndarray:
    """Regularize and scale each angle column to unit mass."""
    colmax = values.max(axis=0)
    eps = REGULARIZER * np.where(colmax > 0, colmax, 1.0)
    reg = values + eps
    return reg / reg.sum(axis=0)


def compute_warp(template_sino: Sinogram, target_sino: Sinogram) -> WarpField:
    """Per-angle monotone map f with CDF_target(f(t)) = CDF_template(t).

    Both sinograms are regularized and column-normalized first; f is the
    linear interpolation of the target's inverse CDF evaluated at the
    template's CDF, so it is nondecreasing by construction.
    """
    if not template_sino.same_grid(target_sino):
        raise GridMismatch("template and target sinograms use different grids")
    tpl = normalize_columns(template_sino.values)
    tgt = normalize_columns(target_sino.values)
    t = template_sino.t_grid
    # anchor the piecewise-linear CDF at zero one step below the grid so
    # the inverse covers [0, 1] instead of clamping to the first bin's mass
    dt = t[1] - t[0] if len(t) > 1 else 1.0
    t_ext = np.concatenate(([t[0] - dt], t))
    f = np.empty_like(tpl)
    for k in range(tpl.shape[1]):
        cdf_tpl = np.cumsum(tpl[:, k])
        cdf_tgt = np.concatenate(([0.0], np.cumsum(tgt[:, k])))
        f[:, k] = np.interp(cdf_tpl, cdf_tgt, t_ext)
    return WarpField(f=f, t_grid=t, theta_grid=template_sino.theta_grid)


def forward_rcdt_from_sinos(template_sino: Sinogram, target_sino: Sinogram) -> RcdtImage:
    """Transform of a target against a template given their sinograms."""
    warp = compute_warp(template_sino, target_sino)
    tpl = normalize_columns(template_sino.values)
    values = (warp.f - warp.t_grid[:, None]) * np.sqrt(tpl)
    return RcdtImage(values=values, t_grid=warp.t_grid, theta_grid=warp.theta_grid)


def forward_rcdt(template: GrayImage, target: GrayImage, n_theta: int = 180) -> RcdtImage:
    """Transform of the target image against the template image."""
    if template.data.shape != target.data.shape:
        raise GridMismatch("template and target images have different dimensions")
    return forward_rcdt_from_sinos(radon(template, n_theta), radon(target, n_theta))


def recover_warp(rcdt: RcdtImage, template_sino: Sinogram) -> WarpField:
    """Invert the template weighting to get back the warp f = t + v/sqrt."""
    if rcdt.values.shape != template_sino.values.shape:
        raise GridMismatch("transform and template sinogram use different grids")
    tpl = normalize_columns(template_sino.values)
    f = rcdt.t_grid[:, None] + rcdt.values / np.sqrt(tpl)
    return WarpField(f=f, t_grid=rcdt.t_grid, theta_grid=rcdt.theta_grid)


def inverse_rcdt(rcdt: RcdtImage, template_sino: Sinogram,
                 out_w: int, out_h: int) -> GrayImage:
    """Reconstruct the target image from its transform and the template.

    The recovered warp must be nondecreasing per angle (tolerance 1e-6);
    its inverse and the Jacobian term rebuild the normalized target
    sinogram, which is rescaled to the template's per-angle mass before
    filtered back projection.
    """
    warp = recover_warp(rcdt, template_sino)
    t = rcdt.t_grid
    tpl = normalize_columns(template_sino.values)
    col_mass = template_sino.values.sum(axis=0)
    dt = t[1] - t[0] if len(t) > 1 else 1.0

    rebuilt = np.empty_like(tpl)
    for k in range(tpl.shape[1]):
        f = warp.f[:, k]
        drops = np.diff(f)
        if drops.size and drops.min() < -1e-6:
            raise NonMonotoneWarp(
                f"recovered warp decreases by {-drops.min():.3g} at angle index {k}")
        f = np.maximum.accumulate(f)
        f += np.arange(len(f)) * 1e-12  # strictly increasing for inversion
        finv = np.interp(t, f, t, left=t[0], right=t[-1])
        dfinv = np.gradient(finv, dt)
        rebuilt[:, k] = np.interp(finv, t, tpl[:, k]) * dfinv * col_mass[k]
    recon = filter_backproject(rebuilt, t, rcdt.theta_grid, out_w, out_h)
    return GrayImage(recon)


def visualize_rcdt(rcdt: RcdtImage, out_w: int, out_h: int) -> GrayImage:
    """Back-project the raw transform values and min-max scale to [0, 1].

    A constant back projection (identical input pair) maps to all zeros.
    """
    recon = filter_backproject(rcdt.values, rcdt.t_grid, rcdt.theta_grid, out_w, out_h)
    lo, hi = recon.min(), recon.max()
    if hi - lo <= 0:
        return GrayImage(np.zeros_like(recon))
    return GrayImage((recon - lo) / (hi - lo))


def dump_sinogram(values: np.ndarray, t_grid: np.ndarray, theta_grid: np.ndarray,
                  path) -> None:
    """Debug dump: 16-bit PNG of min-max scaled values plus a sidecar text
    header recording the grids and the affine scale.
    """
    lo, hi = float(values.min()), float(values.max())
    span = hi - lo if hi > lo else 1.0
    save_image(GrayImage((values - lo) / span), path, bit_depth=16)
    try:
        with open(f"{path}.txt", "w") as fh:
            fh.write(f"min = {lo!r}\nmax = {hi!r}\n")
            fh.write("t_grid = " + ",".join(repr(v) for v in t_grid) + "\n")
            fh.write("theta_grid = " + ",".join(repr(v) for v in theta_grid) + "\n")
    except OSError as exc:
        raise IoFailure(str(exc)) from exc


__all__ = [
    "REGULARIZER", "WarpField", "RcdtImage", "normalize_columns",
    "compute_warp", "forward_rcdt", "forward_rcdt_from_sinos",
    "recover_warp", "inverse_rcdt", "visualize_rcdt", "dump_sinogram",
    "radon", "iradon",
]
