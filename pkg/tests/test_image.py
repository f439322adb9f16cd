import numpy as np
import pytest

from rcdtscreen.errors import DegenerateSize, UnreadableFile, UnsupportedFormat
from rcdtscreen.image import (GrayImage, RgbImage, flip, load_image, load_rgb,
                              resize_bicubic, save_image)


def write_pgm(path, arr, maxval):
    arr = np.asarray(arr)
    dtype = ">u2" if maxval > 255 else "u1"
    with open(path, "wb") as fh:
        fh.write(f"P5\n{arr.shape[1]} {arr.shape[0]}\n{maxval}\n".encode())
        fh.write(arr.astype(dtype).tobytes())


def test_load_8bit_pgm_full_scale(tmp_path):
    path = tmp_path / "full.pgm"
    write_pgm(path, np.full((4, 5), 255), 255)
    img = load_image(path)
    assert img.data.shape == (4, 5)
    assert np.all(img.data == 1.0)


def test_load_16bit_png_zero(tmp_path):
    path = tmp_path / "zero.png"
    save_image(GrayImage(np.zeros((3, 3))), path, bit_depth=16)
    assert np.all(load_image(path).data == 0.0)


def test_load_16bit_midpoint(tmp_path):
    path = tmp_path / "mid.pgm"
    write_pgm(path, np.full((2, 2), 32768), 65535)
    assert load_image(path).data[0, 0] == pytest.approx(32768 / 65535, abs=1e-12)


@pytest.mark.parametrize("bit_depth,ext", [(8, "png"), (16, "png"), (8, "pgm"), (16, "pgm")])
def test_round_trip_quantization(tmp_path, bit_depth, ext):
    rng = np.random.default_rng(0)
    img = GrayImage(rng.random((13, 17)))
    path = tmp_path / f"rt.{ext}"
    save_image(img, path, bit_depth=bit_depth)
    back = load_image(path)
    assert np.abs(back.data - img.data).max() <= 1.0 / ((1 << bit_depth) - 1)


def test_rgb_round_trip(tmp_path):
    rng = np.random.default_rng(1)
    img = RgbImage(rng.random((6, 7, 3)))
    path = tmp_path / "rgb.png"
    save_image(img, path, bit_depth=8)
    back = load_rgb(path)
    assert np.abs(back.data - img.data).max() <= 1.0 / 255


def test_rgb_loads_as_luma(tmp_path):
    data = np.zeros((4, 4, 3))
    data[:, :, 0] = 1.0  # pure red
    path = tmp_path / "red.png"
    save_image(RgbImage(data), path, bit_depth=8)
    img = load_image(path)
    assert img.data[0, 0] == pytest.approx(0.299, abs=2e-3)


def test_pgm_16bit_is_big_endian(tmp_path):
    path = tmp_path / "be.pgm"
    save_image(GrayImage(np.full((2, 2), 32768 / 65535)), path, bit_depth=16)
    raw = path.read_bytes()
    body = raw.split(b"65535\n", 1)[1]
    assert np.frombuffer(body, dtype=">u2")[0] == 32768


def test_load_errors(tmp_path):
    with pytest.raises(UnreadableFile):
        load_image(tmp_path / "missing.png")
    with pytest.raises(UnsupportedFormat):
        load_image(tmp_path / "wrong.jpg")


def test_resize_constant():
    img = GrayImage(np.full((20, 30), 0.3))
    out = resize_bicubic(img, 13, 7)
    assert out.data.shape == (7, 13)
    assert np.allclose(out.data, 0.3, atol=1e-12)


def test_resize_identity():
    rng = np.random.default_rng(2)
    img = GrayImage(rng.random((15, 11)))
    out = resize_bicubic(img, 11, 15)
    assert np.abs(out.data - img.data).max() < 1e-6


def test_resize_ramp_preserves_mean():
    x = np.linspace(0.1, 0.9, 1024)
    img = GrayImage(np.tile(x, (1024, 1)))
    out = resize_bicubic(img, 800, 500)
    assert out.data.shape == (500, 800)
    assert abs(out.data.mean() / img.data.mean() - 1) < 0.02


def test_resize_degenerate():
    img = GrayImage(np.zeros((8, 8)))
    with pytest.raises(DegenerateSize):
        resize_bicubic(img, 1, 10)


def test_flip_symmetric_identity():
    data = np.zeros((5, 6))
    data[2, 1] = data[2, 4] = 0.7
    img = GrayImage(data)
    assert np.array_equal(flip(img, "horizontal").data, data)


def test_flip_involution():
    rng = np.random.default_rng(3)
    img = GrayImage(rng.random((9, 5)))
    for axis in ("horizontal", "vertical"):
        assert np.array_equal(flip(flip(img, axis), axis).data, img.data)


def test_flip_index_map():
    data = np.zeros((4, 6))
    data[0, 0] = 1.0
    out = flip(GrayImage(data), "horizontal")
    assert out.data[0, 5] == 1.0 and out.data[0, 0] == 0.0


def test_no_nan_for_valid_input():
    rng = np.random.default_rng(4)
    img = GrayImage(rng.random((33, 21)))
    out = resize_bicubic(img, 50, 40)
    assert np.all(np.isfinite(out.data))
    assert out.data.min() >= 0.0 and out.data.max() <= 1.0
