"""Lattice types, normalization, index mapping, and file round-trips."""

import numpy as np
import pytest

import fpscore as fp
from fpscore.fields import load_field_stack, save_field_stack


def test_normalize_constant_maps_to_half():
    img = fp.normalize_image(np.full((4, 4), 7.0))
    assert np.all(img.values == 0.5)


def test_normalize_endpoints():
    raw = np.zeros((3, 4))
    raw[1, 2] = 255.0
    img = fp.normalize_image(raw)
    assert img.values.min() == 0.0
    assert img.values.max() == 1.0
    assert np.all(np.isin(img.values, (0.0, 1.0)))


def test_normalize_three_level_row():
    raw = np.tile(np.array([10.0, 20.0, 30.0]), (3, 1))
    img = fp.normalize_image(raw)
    assert np.allclose(img.as_grid()[0], [0.0, 0.5, 1.0])


def test_normalize_idempotent_on_non_constant():
    rng = np.random.default_rng(5)
    for _ in range(20):
        raw = rng.random((5, 7))
        once = fp.normalize_image(raw)
        twice = fp.normalize_image(once.as_grid())
        assert np.allclose(once.values, twice.values, atol=1e-15)


def test_normalize_rejects_non_finite():
    raw = np.ones((4, 4))
    raw[2, 2] = np.nan
    with pytest.raises(fp.InvalidInput):
        fp.normalize_image(raw)


def test_normalize_rejects_small_grid():
    with pytest.raises(fp.GridTooSmall):
        fp.normalize_image(np.ones((2, 5)))


def test_image_field_is_immutable():
    img = fp.ImageField(3, 3, np.zeros(9))
    with pytest.raises(ValueError):
        img.values[0] = 1.0


def test_image_field_rejects_non_finite():
    with pytest.raises(fp.InvalidInput):
        fp.ImageField(3, 3, np.full(9, np.inf))


def test_flatten_index_examples():
    assert fp.flatten_index(0, 0, 7) == 0
    assert fp.flatten_index(1, 0, 5) == 5
    assert fp.flatten_index(2, 3, 5) == 13


def test_flatten_index_bijection_small_grids():
    for h, w in [(3, 3), (4, 7), (5, 4)]:
        seen = set()
        for i in range(h):
            for j in range(w):
                k = fp.flatten_index(i, j, w)
                assert fp.unflatten_index(k, w) == (i, j)
                seen.add(k)
        assert seen == set(range(h * w))


def test_flatten_index_out_of_range():
    with pytest.raises(IndexError):
        fp.flatten_index(0, 5, 5)
    with pytest.raises(IndexError):
        fp.flatten_index(-1, 0, 5)


def test_time_grid():
    grid = fp.TimeGrid(1.0, 100)
    assert grid.dt == 0.01
    assert grid.time(100) == pytest.approx(1.0)
    with pytest.raises(fp.InvalidInput):
        fp.TimeGrid(1.0, 0)


def test_sde_spec_presets():
    zero = fp.SdeSpec("zero-drift", sigma=0.7)
    assert zero.g(0.3) == 0.7
    assert np.all(zero.drift(np.ones(4), 0.1) == 0.0)
    vp = fp.SdeSpec("vp-like", beta=2.0)
    assert vp.g(0.0) == pytest.approx(np.sqrt(2.0))
    assert np.allclose(vp.drift(np.array([0.5]), 0.0), [-0.5])
    with pytest.raises(fp.InvalidInput):
        fp.SdeSpec("brownian-bridge")


# -- image file round-trips --------------------------------------------------

def test_pgm_round_trip_8bit(tmp_path):
    ramp = np.linspace(0.0, 1.0, 16).reshape(4, 4)
    img = fp.ImageField(4, 4, ramp.reshape(-1))
    path = tmp_path / "ramp.pgm"
    fp.save_image(img, path)
    loaded = fp.load_image(path)
    fp.save_image(loaded, tmp_path / "ramp2.pgm")
    assert (tmp_path / "ramp.pgm").read_bytes() == (tmp_path / "ramp2.pgm").read_bytes()
    assert np.allclose(loaded.values, np.round(ramp.reshape(-1) * 255) / 255)


def test_pgm_all_black(tmp_path):
    path = tmp_path / "black.pgm"
    path.write_bytes(b"P5\n3 3\n255\n" + bytes(9))
    img = fp.load_image(path)
    assert img.height == 3 and img.width == 3
    assert np.all(img.values == 0.0)


def test_pgm_16bit_midpoint(tmp_path):
    grid = np.full((3, 3), 32768 / 65535)
    path = tmp_path / "mid.pgm"
    fp.save_image(fp.ImageField(3, 3, grid.reshape(-1)), path, maxval=65535)
    loaded = fp.load_image(path)
    assert np.allclose(loaded.values, 0.5, atol=1.0 / 65535)


def test_pgm_header_comment(tmp_path):
    path = tmp_path / "c.pgm"
    path.write_bytes(b"P5\n# a comment\n3 3\n255\n" + bytes(range(9)))
    img = fp.load_image(path)
    assert img.values[8] == pytest.approx(8 / 255)


def test_png_round_trip(tmp_path):
    from PIL import Image

    arr = (np.linspace(0, 255, 12).reshape(3, 4)).astype(np.uint8)
    path = tmp_path / "g.png"
    Image.fromarray(arr, mode="L").save(path)
    img = fp.load_image(path)
    assert img.height == 3 and img.width == 4
    assert np.allclose(img.values, arr.reshape(-1) / 255)


def test_png_color_rejected(tmp_path):
    from PIL import Image

    arr = np.zeros((4, 4, 3), dtype=np.uint8)
    path = tmp_path / "rgb.png"
    Image.fromarray(arr, mode="RGB").save(path)
    with pytest.raises(fp.FormatError):
        fp.load_image(path)


def test_unsupported_format(tmp_path):
    path = tmp_path / "x.pgm"
    path.write_bytes(b"JUNKJUNKJUNK")
    with pytest.raises(fp.FormatError):
        fp.load_image(path)


def test_truncated_pgm(tmp_path):
    path = tmp_path / "t.pgm"
    path.write_bytes(b"P5\n4 4\n255\n" + bytes(5))
    with pytest.raises(IOError):
        fp.load_image(path)


def test_missing_file():
    with pytest.raises(IOError):
        fp.load_image("/nonexistent/nowhere.pgm")


# -- field stack dumps --------------------------------------------------------

def test_field_stack_round_trip(tmp_path):
    grid = fp.TimeGrid(1.0, 4)
    rng = np.random.default_rng(2)
    values = rng.normal(size=(5, 12))
    path = tmp_path / "m.fpsc"
    save_field_stack(path, grid, 3, 4, values)
    h, w, n, back = load_field_stack(path)
    assert (h, w, n) == (3, 4, 4)
    assert np.array_equal(back, values)


def test_field_stack_bad_magic(tmp_path):
    path = tmp_path / "bad.fpsc"
    path.write_bytes(b"NOPE!" + bytes(20))
    with pytest.raises(fp.FormatError):
        load_field_stack(path)


def test_field_stack_truncated(tmp_path):
    grid = fp.TimeGrid(1.0, 2)
    path = tmp_path / "t.fpsc"
    save_field_stack(path, grid, 3, 3, np.zeros((3, 9)))
    data = path.read_bytes()
    path.write_bytes(data[:-8])
    with pytest.raises(IOError):
        load_field_stack(path)
