"""Initial-density estimation against brute-force and closed-form oracles."""

import numpy as np
import pytest

import fpscore as fp


def brute_force_log_density(grid_values, h, eps):
    """O((HW)^2) direct double sum with the same per-node mass normalization."""
    height, width = grid_values.shape
    w = grid_values / grid_values.sum()

    def kern(u):
        return max(0.0, 1.0 - abs(u))

    p = np.zeros((height, width))
    kappa = np.zeros((height, width))
    for i in range(height):
        for j in range(width):
            for r in range(height):
                for c in range(width):
                    k = kern((i - r) / h) * kern((j - c) / h)
                    p[i, j] += w[r, c] * k
                    kappa[i, j] += k
    p /= kappa
    p /= p.sum()
    return np.log(np.maximum(p, eps))


def test_scott_bandwidth_examples():
    assert fp.scott_bandwidth(1, 2, 1.0) == 1.0
    assert fp.scott_bandwidth(10, 2, 0.0) == 1.0
    # 64^(1/6) == 2 exactly, so sigma=2 gives h = 2 * 1/2 = 1.
    assert fp.scott_bandwidth(64, 2, 2.0) == pytest.approx(1.0, rel=1e-12)


def test_scott_bandwidth_rejects_empty():
    with pytest.raises(fp.InvalidInput):
        fp.scott_bandwidth(0.5, 2, 1.0)


def test_uniform_image_gives_uniform_density():
    img = fp.ImageField(8, 8, np.full(64, 0.37))
    m0 = fp.kde_log_density(img)
    assert np.allclose(m0, -np.log(64), atol=1e-12)
    assert np.exp(m0).sum() == pytest.approx(1.0, abs=1e-6)


def test_single_impulse_unit_bandwidth():
    vals = np.zeros((5, 5))
    vals[2, 3] = 1.0
    img = fp.ImageField(5, 5, vals.reshape(-1))
    cfg = fp.KdeConfig(bandwidth=1.0)
    m0 = fp.kde_log_density(img, cfg).reshape(5, 5)
    # Kernel support of one pixel: the impulse keeps all the mass, every
    # other node sits on the epsilon floor.
    assert m0[2, 3] == pytest.approx(0.0, abs=1e-12)
    mask = np.ones((5, 5), bool)
    mask[2, 3] = False
    assert np.allclose(m0[mask], np.log(cfg.epsilon))


def test_two_impulse_matches_brute_force():
    vals = np.zeros((8, 8))
    vals[2, 3] = 1.0
    vals[6, 1] = 0.5
    img = fp.ImageField(8, 8, vals.reshape(-1))
    m0 = fp.kde_log_density(img, fp.KdeConfig(bandwidth=2.0))
    oracle = brute_force_log_density(vals, 2.0, 1e-12)
    rel = np.max(np.abs(m0 - oracle.reshape(-1))) / np.max(np.abs(oracle))
    assert rel <= 1e-12


def test_random_images_match_brute_force():
    rng = np.random.default_rng(11)
    for h in (1.5, 2.7, 4.0):
        vals = rng.random((16, 16)) + 0.01
        img = fp.ImageField(16, 16, vals.reshape(-1))
        m0 = fp.kde_log_density(img, fp.KdeConfig(bandwidth=h))
        oracle = brute_force_log_density(vals, h, 1e-12)
        rel = np.max(np.abs(m0 - oracle.reshape(-1))) / np.max(np.abs(oracle))
        assert rel <= 1e-10


def test_density_sums_to_one_with_scott():
    rng = np.random.default_rng(7)
    for _ in range(5):
        img = fp.ImageField(12, 10, rng.random(120) + 0.05)
        m0 = fp.kde_log_density(img)
        assert np.exp(m0).sum() == pytest.approx(1.0, abs=1e-6)


def test_translation_equivariance_in_interior():
    base = np.zeros((12, 12))
    base[5, 5] = 1.0
    shifted = np.zeros((12, 12))
    shifted[6, 7] = 1.0
    cfg = fp.KdeConfig(bandwidth=2.0)
    p0 = np.exp(fp.kde_log_density(fp.ImageField(12, 12, base.reshape(-1)), cfg))
    p1 = np.exp(fp.kde_log_density(fp.ImageField(12, 12, shifted.reshape(-1)), cfg))
    assert np.allclose(np.roll(np.roll(p0.reshape(12, 12), 1, 0), 2, 1)[3:10, 3:10],
                       p1.reshape(12, 12)[3:10, 3:10], rtol=1e-10)


def test_all_zero_image_rejected():
    img = fp.ImageField(4, 4, np.zeros(16))
    with pytest.raises(fp.InvalidInput):
        fp.kde_log_density(img)


def test_config_validation():
    with pytest.raises(fp.InvalidInput):
        fp.KdeConfig(bandwidth="silverman")
    with pytest.raises(fp.InvalidInput):
        fp.KdeConfig(bandwidth=-1.0)
    with pytest.raises(fp.InvalidInput):
        fp.KdeConfig(epsilon=0.0)
