"""Lattice data types, normalization, index mapping, and serialization.

All values live on an H x W pixel lattice flattened row-major: node (i, j)
maps to k = i*W + j. Lattice spacing is one pixel, so no grid-size factors
appear in any stencil. Types are immutable after construction and safe to
share across threads.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import FormatError, GridTooSmall, InvalidInput

MIN_SIDE = 3  # five-point stencil needs at least one interior node

FPSC_MAGIC = b"FPSC1"


def _frozen(values, shape=None) -> np.ndarray:
    out = np.array(values, dtype=np.float64, copy=True)
    if shape is not None:
        out = out.reshape(shape)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class ImageField:
    """Grayscale image on the pixel lattice, stored as a flat row-major vector.

    Values are dimensionless intensities. They sit in [0, 1] right after
    ``normalize_image`` but may leave that range during transport; only
    finiteness is enforced here.
    """

    height: int
    width: int
    values: np.ndarray

    def __post_init__(self):
        if self.height < MIN_SIDE or self.width < MIN_SIDE:
            raise GridTooSmall(
                f"need at least {MIN_SIDE}x{MIN_SIDE}, got {self.height}x{self.width}"
            )
        vals = _frozen(self.values)
        if vals.size != self.height * self.width:
            raise InvalidInput(
                f"expected {self.height * self.width} values, got {vals.size}"
            )
        if not np.all(np.isfinite(vals)):
            raise InvalidInput("image contains non-finite values")
        object.__setattr__(self, "values", vals.reshape(-1))

    @property
    def size(self) -> int:
        return self.height * self.width

    def as_grid(self) -> np.ndarray:
        """Read-only (H, W) view of the pixel values."""
        return self.values.reshape(self.height, self.width)

    def with_values(self, values) -> "ImageField":
        return ImageField(self.height, self.width, values)


@dataclass(frozen=True)
class TimeGrid:
    """Uniform grid of N steps on [0, T]; node times are n*dt for n = 0..N."""

    final_time: float
    steps: int

    def __post_init__(self):
        if self.steps < 1:
            raise InvalidInput("need at least one time step")
        if not (self.final_time > 0 and np.isfinite(self.final_time)):
            raise InvalidInput("final time must be positive and finite")

    @property
    def dt(self) -> float:
        return self.final_time / self.steps

    def time(self, n: int) -> float:
        return n * self.dt


@dataclass(frozen=True)
class SdeSpec:
    """Forward-dynamics preset: drift f(x, t) applied per pixel value and a
    constant-in-time diffusion amplitude g(t).

    ``zero-drift``: f = 0, g(t) = sigma.
    ``vp-like``:    f(x, t) = -beta*x/2, g(t) = sqrt(beta).

    sigma = 0 is allowed as the degenerate no-dynamics case (the solve then
    copies the field forward unchanged); training requires g > 0 and rejects
    it there.
    """

    kind: str = "zero-drift"
    sigma: float = 0.5
    beta: float = 1.0

    def __post_init__(self):
        if self.kind not in ("zero-drift", "vp-like"):
            raise InvalidInput(f"unknown drift kind {self.kind!r}")
        if self.kind == "zero-drift" and not self.sigma >= 0:
            raise InvalidInput("sigma must be nonnegative")
        if self.kind == "vp-like" and not self.beta > 0:
            raise InvalidInput("beta must be positive")

    def drift(self, x: np.ndarray, t: float) -> np.ndarray:
        if self.kind == "zero-drift":
            return np.zeros_like(x)
        return -0.5 * self.beta * x

    def g(self, t: float) -> float:
        if self.kind == "zero-drift":
            return self.sigma
        return float(np.sqrt(self.beta))


def _stack_field(grid: TimeGrid, height: int, width: int, values) -> np.ndarray:
    vals = _frozen(values, shape=(grid.steps + 1, height * width))
    if not np.all(np.isfinite(vals)):
        raise InvalidInput("field contains non-finite values")
    return vals


@dataclass(frozen=True)
class LogDensityField:
    """log-density m on the lattice for every timestep n = 0..N."""

    grid: TimeGrid
    height: int
    width: int
    values: np.ndarray  # (N+1, H*W)

    def __post_init__(self):
        object.__setattr__(
            self, "values", _stack_field(self.grid, self.height, self.width, self.values)
        )

    def slice(self, n: int) -> np.ndarray:
        return self.values[n]


@dataclass(frozen=True)
class ScoreField:
    """Divergence-style score (sum of both axis derivatives of m) per node,
    for every timestep n = 0..N."""

    grid: TimeGrid
    height: int
    width: int
    values: np.ndarray  # (N+1, H*W)

    def __post_init__(self):
        object.__setattr__(
            self, "values", _stack_field(self.grid, self.height, self.width, self.values)
        )

    def slice(self, n: int) -> np.ndarray:
        return self.values[n]


def flatten_index(i: int, j: int, width: int) -> int:
    """Row-major node index k = i*width + j."""
    if not 0 <= j < width:
        raise IndexError(f"column {j} out of range for width {width}")
    if i < 0:
        raise IndexError(f"negative row {i}")
    return i * width + j


def unflatten_index(k: int, width: int) -> tuple[int, int]:
    """Inverse of ``flatten_index``."""
    if k < 0:
        raise IndexError(f"negative index {k}")
    return divmod(k, width)


def normalize_image(raw: np.ndarray) -> ImageField:
    """Affinely map raw intensities onto [0, 1] via (v - min) / (max - min).

    A constant image maps to all 0.5 (documented convention; avoids a zero
    denominator).
    """
    arr = np.asarray(raw, dtype=np.float64)
    if arr.ndim != 2:
        raise InvalidInput(f"expected a 2-d array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInput("raw image contains non-finite values")
    h, w = arr.shape
    if h < MIN_SIDE or w < MIN_SIDE:
        raise GridTooSmall(f"need at least {MIN_SIDE}x{MIN_SIDE}, got {h}x{w}")
    lo = arr.min()
    hi = arr.max()
    if hi > lo:
        out = (arr - lo) / (hi - lo)
    else:
        out = np.full_like(arr, 0.5)
    return ImageField(h, w, out.reshape(-1))


# --------------------------------------------------------------------------
# Image file I/O: PGM (P5, 8- or 16-bit) and grayscale PNG in, PGM out.
# --------------------------------------------------------------------------

def _read_pgm(data: bytes, path: Path) -> tuple[int, int, np.ndarray]:
    if not data.startswith(b"P5"):
        raise FormatError(f"{path}: not a binary PGM (P5) file")
    # Header tokens: magic, width, height, maxval; '#' starts a comment.
    pos = 2
    tokens: list[int] = []
    while len(tokens) < 3:
        if pos >= len(data):
            raise IOError(f"{path}: truncated PGM header")
        ch = data[pos:pos + 1]
        if ch == b"#":
            nl = data.find(b"\n", pos)
            pos = len(data) if nl < 0 else nl + 1
        elif ch.isspace():
            pos += 1
        else:
            end = pos
            while end < len(data) and not data[end:end + 1].isspace():
                end += 1
            tokens.append(int(data[pos:end]))
            pos = end
    width, height, maxval = tokens
    if not (0 < maxval < 65536):
        raise FormatError(f"{path}: bad maxval {maxval}")
    pos += 1  # single whitespace byte after maxval
    dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
    need = width * height * dtype.itemsize
    raster = data[pos:pos + need]
    if len(raster) < need:
        raise IOError(f"{path}: truncated PGM raster")
    pixels = np.frombuffer(raster, dtype=dtype).astype(np.float64)
    return maxval, height, pixels.reshape(height, width)


def _read_png(path: Path) -> tuple[int, int, np.ndarray]:
    from PIL import Image

    with Image.open(path) as img:
        if img.mode == "L":
            maxval = 255
        elif img.mode in ("I", "I;16", "I;16B"):
            maxval = 65535
        else:
            raise FormatError(f"{path}: PNG mode {img.mode!r} is not grayscale")
        arr = np.asarray(img, dtype=np.float64)
    return maxval, arr.shape[0], arr


def load_image(path) -> ImageField:
    """Read a grayscale PGM or PNG; values are scaled by the file's maxval."""
    path = Path(path)
    if not path.exists():
        raise IOError(f"{path}: no such file")
    head = path.read_bytes()[:8] if path.stat().st_size >= 2 else b""
    if head.startswith(b"P5"):
        maxval, height, grid = _read_pgm(path.read_bytes(), path)
    elif head.startswith(b"\x89PNG"):
        maxval, height, grid = _read_png(path)
    else:
        raise FormatError(f"{path}: unsupported image format")
    h, w = grid.shape
    return ImageField(h, w, (grid / maxval).reshape(-1))


def save_image(field: ImageField, path, maxval: int = 255) -> None:
    """Write a binary PGM, clamping to [0, 1] and quantizing to maxval levels."""
    if maxval not in (255, 65535):
        raise FormatError(f"maxval must be 255 or 65535, got {maxval}")
    clipped = np.clip(field.as_grid(), 0.0, 1.0)
    quant = np.floor(clipped * maxval + 0.5)
    dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
    header = f"P5\n{field.width} {field.height}\n{maxval}\n".encode("ascii")
    Path(path).write_bytes(header + quant.astype(dtype).tobytes())


# --------------------------------------------------------------------------
# Flat binary dump for per-timestep field stacks.
#
# Layout: magic b"FPSC1", then H, W, N as u32 little-endian, then
# (N+1)*H*W float64 little-endian in (n, i, j) order. N is the number of
# time steps, so the payload holds N+1 slices (n = 0..N inclusive).
# --------------------------------------------------------------------------

def save_field_stack(path, grid: TimeGrid, height: int, width: int,
                     values: np.ndarray) -> None:
    vals = np.ascontiguousarray(values, dtype=np.float64)
    expected = (grid.steps + 1, height * width)
    if vals.shape != expected:
        raise InvalidInput(f"expected shape {expected}, got {vals.shape}")
    header = FPSC_MAGIC + struct.pack("<III", height, width, grid.steps)
    Path(path).write_bytes(header + vals.astype("<f8").tobytes())


def load_field_stack(path) -> tuple[int, int, int, np.ndarray]:
    """Read an FPSC1 dump; returns (H, W, N, values of shape (N+1, H*W))."""
    data = Path(path).read_bytes()
    if not data.startswith(FPSC_MAGIC):
        raise FormatError(f"{path}: bad magic, not an FPSC1 file")
    if len(data) < len(FPSC_MAGIC) + 12:
        raise IOError(f"{path}: truncated header")
    height, width, steps = struct.unpack_from("<III", data, len(FPSC_MAGIC))
    count = (steps + 1) * height * width
    body = data[len(FPSC_MAGIC) + 12:]
    if len(body) < count * 8:
        raise IOError(f"{path}: truncated payload")
    values = np.frombuffer(body[:count * 8], dtype="<f8").reshape(steps + 1, -1)
    return height, width, steps, values.astype(np.float64)
