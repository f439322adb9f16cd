import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from rcdtscreen.errors import GridMismatch
from rcdtscreen.fusion import discordance, fuse_green_magenta
from rcdtscreen.image import GrayImage


unit_pair = hnp.arrays(np.float64, (7, 5),
                       elements=st.floats(0.0, 1.0, width=32))


def test_channel_mapping():
    a = GrayImage(np.full((4, 4), 0.25))
    b = GrayImage(np.full((4, 4), 0.75))
    fused = fuse_green_magenta(a, b)
    assert np.array_equal(fused.data[:, :, 0], b.data)  # R
    assert np.array_equal(fused.data[:, :, 1], a.data)  # G
    assert np.array_equal(fused.data[:, :, 2], b.data)  # B


@given(unit_pair)
def test_equal_inputs_render_gray(arr):
    fused = fuse_green_magenta(GrayImage(arr), GrayImage(arr))
    assert np.array_equal(fused.data[:, :, 0], fused.data[:, :, 1])
    assert np.array_equal(fused.data[:, :, 1], fused.data[:, :, 2])
    assert discordance(fused).max() == 0.0


@given(unit_pair, unit_pair)
def test_gray_pixels_iff_equal_inputs(a, b):
    fused = fuse_green_magenta(GrayImage(a), GrayImage(b))
    r, g, bl = (fused.data[:, :, c] for c in range(3))
    gray = (r == g) & (g == bl)
    assert np.array_equal(gray, a == b)
    assert np.array_equal(discordance(fused), np.abs(a - b))


def test_swap_exchanges_green_and_magenta():
    rng = np.random.default_rng(0)
    a, b = rng.random((6, 6)), rng.random((6, 6))
    f1 = fuse_green_magenta(GrayImage(a), GrayImage(b))
    f2 = fuse_green_magenta(GrayImage(b), GrayImage(a))
    assert np.array_equal(f1.data[:, :, 1], f2.data[:, :, 0])
    assert np.array_equal(discordance(f1), discordance(f2))


def test_shape_mismatch_rejected():
    with pytest.raises(GridMismatch):
        fuse_green_magenta(GrayImage(np.zeros((4, 4))),
                           GrayImage(np.zeros((4, 5))))
