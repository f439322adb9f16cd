import numpy as np
import pytest

from rcdtscreen.errors import DegenerateSize, GridMismatch, NoForeground
from rcdtscreen.image import GrayImage, resize_bicubic
from rcdtscreen.phantom import PhantomParams, generate_case, ground_truth_breast_mask
from rcdtscreen.preprocess import (clahe, crop_resize_to, segment_breast,
                                   standardize_orientation)


def test_segment_phantom_iou():
    case = generate_case(7, PhantomParams(size=256), "control")
    for key in ("left_cc", "right_mlo"):
        mask = segment_breast(case.images[key]).mask
        truth = ground_truth_breast_mask(case, key)
        iou = (mask & truth).sum() / (mask | truth).sum()
        assert iou >= 0.95


def test_segment_all_zero_raises():
    with pytest.raises(NoForeground):
        segment_breast(GrayImage(np.zeros((32, 32))))


def test_segment_keeps_largest_blob():
    data = np.zeros((64, 64))
    data[5:45, 5:45] = 0.8  # large blob
    data[55:59, 55:59] = 0.8  # small blob
    mask = segment_breast(GrayImage(data)).mask
    assert mask[20, 20] and not mask[56, 56]


def test_segment_bbox_tight():
    data = np.zeros((40, 40))
    data[10:30, 5:25] = 0.9
    bm = segment_breast(GrayImage(data))
    x0, y0, x1, y1 = bm.bbox
    sub = bm.mask[y0:y1, x0:x1]
    assert sub[0].any() and sub[-1].any() and sub[:, 0].any() and sub[:, -1].any()
    assert not bm.mask[:y0].any() and not bm.mask[y1:].any()


def test_crop_resize_full_mask_is_pure_resize():
    rng = np.random.default_rng(0)
    img = GrayImage(0.2 + 0.6 * rng.random((64, 48)))
    bm = segment_breast(GrayImage(np.ones((64, 48)) * 0.5))
    out = crop_resize_to(img, bm, 24, 32)
    assert np.allclose(out.data, resize_bicubic(img, 24, 32).data)


def test_crop_removes_empty_margin():
    data = np.zeros((60, 80))
    data[10:50, 0:40] = 0.8
    img = GrayImage(data)
    bm = segment_breast(img)
    x0, y0, x1, y1 = bm.bbox
    # crop hugs the block up to the few-pixel smoothing halo, discarding
    # the 40 empty columns on the right
    assert x0 == 0 and x1 <= 46
    assert y0 >= 4 and y1 <= 56
    out = crop_resize_to(img, bm, 40, 40)
    # nearly every output column touches the cropped foreground
    assert (out.data.max(axis=0) > 0.1)[:-4].all()


def test_crop_resize_dims_match_target():
    case = generate_case(3, PhantomParams(size=128), "control")
    img = case.images["left_cc"]
    out = crop_resize_to(img, segment_breast(img), 800, 500)
    assert (out.width, out.height) == (800, 500)


def test_crop_resize_grid_mismatch():
    img = GrayImage(np.ones((30, 30)) * 0.5)
    bm = segment_breast(GrayImage(np.ones((20, 20)) * 0.5))
    with pytest.raises(GridMismatch):
        crop_resize_to(img, bm, 10, 10)


def test_standardize_orientation():
    rng = np.random.default_rng(1)
    img = GrayImage(rng.random((16, 16)))
    assert standardize_orientation(img, "left") is img
    twice = standardize_orientation(standardize_orientation(img, "right"), "right")
    assert np.array_equal(twice.data, img.data)


def test_standardize_moves_chest_wall():
    case = generate_case(11, PhantomParams(size=128), "control")
    right = case.images["right_cc"]
    # stored right image: chest wall (mass) at the right edge
    cols = right.data.sum(axis=0)
    assert cols[-1] > cols[0]
    std = standardize_orientation(right, "right")
    cols = std.data.sum(axis=0)
    assert cols[0] > cols[-1]


def test_clahe_constant_stays_constant():
    out = clahe(GrayImage(np.full((64, 64), 0.42)))
    assert np.ptp(out.data) < 1e-12


def test_clahe_boosts_low_contrast_ramp():
    x = np.linspace(0.4, 0.6, 96)
    img = GrayImage(np.tile(x, (96, 1)))
    out = clahe(img, clip_limit=0.05, tiles=(4, 4))
    assert out.data.std() > img.data.std()
    assert out.data.min() >= 0.0 and out.data.max() <= 1.0


def test_clahe_global_limit_matches_plain_equalization():
    rng = np.random.default_rng(2)
    img = GrayImage(rng.random((64, 64)))
    out = clahe(img, clip_limit=1.0, tiles=(1, 1))
    # plain global equalization: value -> CDF(value)
    bins = np.clip((img.data * 256).astype(int), 0, 255)
    hist = np.bincount(bins.ravel(), minlength=256)
    cdf = np.cumsum(hist) / img.data.size
    assert np.allclose(out.data, cdf[bins], atol=1e-12)


def test_clahe_monotone_per_tile():
    rng = np.random.default_rng(3)
    img = GrayImage(rng.random((32, 32)))
    out = clahe(img, tiles=(1, 1), clip_limit=0.5)
    order = np.argsort(img.data.ravel())
    assert np.all(np.diff(out.data.ravel()[order]) >= -1e-12)


def test_clahe_degenerate_tiles():
    with pytest.raises(DegenerateSize):
        clahe(GrayImage(np.random.default_rng(0).random((8, 8))), tiles=(8, 8))
