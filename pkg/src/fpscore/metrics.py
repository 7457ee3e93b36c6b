"""Image quality metrics: MSE and a whole-image SSIM.

SSIM here uses single global statistics per image (no sliding window) and
the linear stabilizers c1 = 0.01*L, c2 = 0.03*L, c3 = c2/2. All sample
statistics use the 1/(H*W) normalization. mse/ssim accept ImageField objects
or plain arrays of matching shape.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ShapeError
from .fields import ImageField


@dataclass(frozen=True)
class SsimConstants:
    """Stabilizers for dynamic range L; exponents are fixed at 1."""

    dynamic_range: float = 1.0

    @property
    def c1(self) -> float:
        return 0.01 * self.dynamic_range

    @property
    def c2(self) -> float:
        return 0.03 * self.dynamic_range

    @property
    def c3(self) -> float:
        return self.c2 / 2.0


@dataclass(frozen=True)
class SsimResult:
    value: float
    luminance: float
    contrast: float
    structure: float


def _values(img) -> np.ndarray:
    if isinstance(img, ImageField):
        return img.values
    return np.asarray(img, dtype=np.float64).reshape(-1)


def _pair(y, y_hat) -> tuple[np.ndarray, np.ndarray]:
    a, b = _values(y), _values(y_hat)
    if a.shape != b.shape:
        raise ShapeError(f"image shapes differ: {a.shape} vs {b.shape}")
    return a, b


def mse(y, y_hat) -> float:
    """Mean over pixels of the squared difference."""
    a, b = _pair(y, y_hat)
    diff = a - b
    return float(np.mean(diff * diff))


def ssim(y, y_hat, consts: SsimConstants = SsimConstants()) -> SsimResult:
    """SSIM = luminance * contrast * structure with global statistics.

    sqrt(var_y * var_yh) is used wherever sigma_y * sigma_yh appears so that
    identical inputs give exactly 1.0.
    """
    a, b = _pair(y, y_hat)
    mu_a = float(np.mean(a))
    mu_b = float(np.mean(b))
    da = a - mu_a
    db = b - mu_b
    var_a = float(np.mean(da * da))
    var_b = float(np.mean(db * db))
    cov = float(np.mean(da * db))
    sig_prod = float(np.sqrt(var_a * var_b))

    lum = (2.0 * mu_a * mu_b + consts.c1) / (mu_a * mu_a + mu_b * mu_b + consts.c1)
    con = (2.0 * sig_prod + consts.c2) / (var_a + var_b + consts.c2)
    struct = (cov + consts.c3) / (sig_prod + consts.c3)
    return SsimResult(lum * con * struct, lum, con, struct)
