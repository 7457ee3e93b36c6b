"""Implicit lattice solver for the log-density evolution equation.

Each time step solves a five-diagonal linear system obtained from the
five-point stencil (unit pixel spacing), with the quadratic gradient term
linearized around the previous outer iterate's score. The outer loop
re-freezes that score until the whole space-time field stops changing.

For node (i, j) with phi = f(x_ij, t) - g^2 * s_ij / 2 (s_ij being the
frozen score) the row of A*m = rhs reads

    (1 + 2 g^2 dt) m_ij
      + (-g^2 dt/2 + phi dt/2) (m_{i+1,j} + m_{i,j+1})
      + (-g^2 dt/2 - phi dt/2) (m_{i-1,j} + m_{i,j-1})  =  m_prev_ij - div_f dt

so A has bandwidth W: diagonals at offsets 0, +-1, +-W.
"""

from __future__ import annotations

import time
import warnings
from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import as_strided

from .errors import AssemblyError, InvalidInput, NotConvergedWarning, SingularSystem
from .fields import ImageField, LogDensityField, ScoreField, SdeSpec, TimeGrid

BOUNDARY_MODES = ("reflect", "truncate")


@dataclass(frozen=True)
class SolverConfig:
    """tol: L2 convergence tolerance over all (n, i, j); max_iters caps the
    outer fixed-point loop; boundary picks the stencil treatment where a
    neighbor falls off the grid ("reflect" folds the cut coefficient into the
    diagonal, "truncate" drops it, i.e. zero ghost values)."""

    tol: float = 1e-6
    max_iters: int = 50
    boundary: str = "reflect"

    def __post_init__(self):
        if not self.tol > 0:
            raise InvalidInput("tol must be positive")
        if self.max_iters < 1:
            raise InvalidInput("max_iters must be >= 1")
        if self.boundary not in BOUNDARY_MODES:
            raise InvalidInput(f"boundary must be one of {BOUNDARY_MODES}")


@dataclass
class BandedSystem:
    """Five-diagonal system A*m = rhs on an H x W lattice (D = H*W rows).

    Diagonal arrays all have length D; slots whose column would leave the
    matrix or wrap across a row hold exact zeros. sup1/sub1 are the +-1
    diagonals (east/west neighbors), supw/subw the +-W diagonals
    (south/north neighbors).
    """

    height: int
    width: int
    diag: np.ndarray
    sup1: np.ndarray
    sub1: np.ndarray
    supw: np.ndarray
    subw: np.ndarray
    rhs: np.ndarray

    @property
    def dim(self) -> int:
        return self.height * self.width

    def matvec(self, v: np.ndarray) -> np.ndarray:
        out = self.diag * v
        out[:-1] += self.sup1[:-1] * v[1:]
        out[1:] += self.sub1[1:] * v[:-1]
        w = self.width
        out[:-w] += self.supw[:-w] * v[w:]
        out[w:] += self.subw[w:] * v[:-w]
        return out

    def to_dense(self) -> np.ndarray:
        d = self.dim
        a = np.zeros((d, d))
        idx = np.arange(d)
        a[idx, idx] = self.diag
        a[idx[:-1], idx[:-1] + 1] = self.sup1[:-1]
        a[idx[1:], idx[1:] - 1] = self.sub1[1:]
        w = self.width
        a[idx[:-w], idx[:-w] + w] = self.supw[:-w]
        a[idx[w:], idx[w:] - w] = self.subw[w:]
        return a


def assemble_system(m_prev_time: np.ndarray, score_prev_iter: np.ndarray,
                    sde: SdeSpec, t: float, dt: float,
                    image_values: np.ndarray | None = None,
                    boundary: str = "reflect",
                    height: int | None = None,
                    width: int | None = None) -> BandedSystem:
    """Build the implicit system advancing m_prev_time by one step of size dt.

    The drift f is evaluated on the image's pixel values; passing
    image_values=None is allowed only for zero-drift dynamics.
    """
    if boundary not in BOUNDARY_MODES:
        raise InvalidInput(f"boundary must be one of {BOUNDARY_MODES}")
    if height is None or width is None:
        raise InvalidInput("assemble_system needs the lattice height and width")
    h, w = height, width
    d = h * w
    m_prev = np.asarray(m_prev_time, dtype=np.float64).reshape(d)
    score = np.asarray(score_prev_iter, dtype=np.float64).reshape(d)

    if image_values is None:
        if sde.kind != "zero-drift":
            raise InvalidInput("drift evaluation needs the image values")
        f = np.zeros(d)
    else:
        f = sde.drift(np.asarray(image_values, dtype=np.float64).reshape(d), t)

    g = sde.g(t)
    g2dt = g * g * dt
    phi_dt = (f - 0.5 * g * g * score) * dt

    diag = np.full(d, 1.0 + 2.0 * g2dt)
    east = -0.5 * g2dt + 0.5 * phi_dt   # +1 and +W neighbors
    west = -0.5 * g2dt - 0.5 * phi_dt   # -1 and -W neighbors

    cols = np.tile(np.arange(w), h)
    rows = np.repeat(np.arange(h), w)
    has_e = cols < w - 1
    has_w = cols > 0
    has_s = rows < h - 1
    has_n = rows > 0

    sup1 = np.where(has_e, east, 0.0)
    sub1 = np.where(has_w, west, 0.0)
    supw = np.where(has_s, east, 0.0)
    subw = np.where(has_n, west, 0.0)
    if boundary == "reflect":
        # Fold cut stencil legs back into the diagonal (mirror ghost values),
        # so the row sum stays exactly 1 and constants are preserved.
        diag = diag + np.where(has_e, 0.0, east) + np.where(has_w, 0.0, west) \
                    + np.where(has_s, 0.0, east) + np.where(has_n, 0.0, west)

    f_grid = f.reshape(h, w)
    pad_mode = "edge" if boundary == "reflect" else "constant"
    fp = np.pad(f_grid, 1, mode=pad_mode)
    div_f = 0.5 * (fp[2:, 1:-1] - fp[:-2, 1:-1] + fp[1:-1, 2:] - fp[1:-1, :-2])
    rhs = m_prev - div_f.reshape(d) * dt

    sys = BandedSystem(h, w, diag, sup1, sub1, supw, subw, rhs)
    for arr in (diag, sup1, sub1, supw, subw, rhs):
        if not np.all(np.isfinite(arr)):
            raise AssemblyError("non-finite coefficient in assembled system")
    return sys


def solve_banded(system: BandedSystem) -> np.ndarray:
    """Solve A*m = rhs by banded LU without pivoting.

    Work stays inside the band: O(D * W^2) operations and O(D * W) storage,
    A is never densified. Diagonal dominance of the assembled systems keeps
    the unpivoted elimination stable; a vanishing pivot raises SingularSystem
    with the offending row.
    """
    d = system.dim
    bw = system.width
    nb = 2 * bw + 1
    scale = max(float(np.abs(system.diag).max(initial=0.0)),
                float(np.abs(system.sup1).max(initial=0.0)),
                float(np.abs(system.sub1).max(initial=0.0)),
                float(np.abs(system.supw).max(initial=0.0)),
                float(np.abs(system.subw).max(initial=0.0)))
    piv_tol = scale * 1e-14

    # Row-major band storage R[i, bw + (j - i)] = A[i, j], padded with bw
    # extra rows so the strided elimination views below never leave the buffer.
    band = np.zeros((d + bw, nb))
    band[:d, bw] = system.diag
    band[:d, bw + 1] = system.sup1
    band[:d, bw - 1] = system.sub1
    band[:d, 2 * bw] = system.supw
    band[:d, 0] = system.subw

    itemsize = band.itemsize
    flat = band.reshape(-1)
    # cols_view[k, r] = A[k+1+r, k]; blocks_view[k, r, c] = A[k+1+r, k+1+c].
    # Both are diagonal walks through the band rows, expressible as strided
    # views, which turns each column elimination into one rank-1 update.
    cols_view = as_strided(flat[nb + bw - 1:], shape=(max(d - 1, 0), bw),
                           strides=(nb * itemsize, (nb - 1) * itemsize))
    blocks_view = as_strided(flat[nb + bw:], shape=(max(d - 1, 0), bw, bw),
                             strides=(nb * itemsize, (nb - 1) * itemsize,
                                      itemsize))

    for k in range(d - 1):
        piv = band[k, bw]
        if abs(piv) <= piv_tol:
            raise SingularSystem(k, piv)
        nr = bw if k < d - 1 - bw else d - 1 - k
        mult = cols_view[k, :nr]
        mult /= piv
        blocks_view[k, :nr, :nr] -= mult[:, None] * band[k, bw + 1: bw + 1 + nr]
    if abs(band[d - 1, bw]) <= piv_tol:
        raise SingularSystem(d - 1, band[d - 1, bw])

    # Forward substitution with the unit-lower factors stored in the band.
    y = np.asarray(system.rhs, dtype=np.float64).copy()
    for i in range(1, d):
        lo = max(0, i - bw)
        y[i] -= band[i, bw - (i - lo):bw] @ y[lo:i]
    # Back substitution with U.
    x = np.empty(d)
    x[d - 1] = y[d - 1] / band[d - 1, bw]
    for i in range(d - 2, -1, -1):
        hi = min(d - 1, i + bw)
        x[i] = (y[i] - band[i, bw + 1: bw + 1 + hi - i] @ x[i + 1: hi + 1]) \
            / band[i, bw]
    return x


def central_difference_score(m: np.ndarray, height: int, width: int) -> np.ndarray:
    """Second-order score (m_{i+1,j} + m_{i,j+1} - m_{i-1,j} - m_{i,j-1}) / 2.

    The border ring, where the centered stencil has no neighbor, is padded
    with zero score; a spatially constant field therefore maps to an exactly
    zero field.
    """
    grid = np.asarray(m, dtype=np.float64).reshape(height, width)
    out = np.zeros_like(grid)
    out[1:-1, 1:-1] = 0.5 * (grid[2:, 1:-1] + grid[1:-1, 2:]
                             - grid[:-2, 1:-1] - grid[1:-1, :-2])
    return out.reshape(-1)


@dataclass(frozen=True)
class IterationRecord:
    k: int
    error: float
    wall_ms: float


@dataclass(frozen=True)
class PolicyIterationResult:
    log_density: LogDensityField
    score: ScoreField
    trace: tuple[IterationRecord, ...]
    converged: bool
    iterations: int


def policy_iteration(m0: np.ndarray, sde: SdeSpec, grid: TimeGrid,
                     cfg: SolverConfig = SolverConfig(),
                     image: ImageField | None = None,
                     height: int | None = None,
                     width: int | None = None) -> PolicyIterationResult:
    """Outer fixed-point loop freezing the previous iterate's score.

    Every outer pass k sweeps n = 1..N, assembling each step against the
    score field of pass k-1 (score identically zero on the first pass) and
    solving for m. The pass ends by recomputing the full score field and the
    L2 change over all timesteps and nodes; iteration stops at cfg.tol or
    cfg.max_iters, the latter with a NotConvergedWarning carrying the final
    error (the result is still returned).
    """
    if image is not None:
        height, width = image.height, image.width
        image_values = image.values
    else:
        image_values = None
        if height is None or width is None:
            raise InvalidInput("need an image or explicit lattice dimensions")
    d = height * width
    m0 = np.asarray(m0, dtype=np.float64).reshape(d)
    n_steps = grid.steps
    dt = grid.dt

    # Initial guesses: the previous-iterate field defaults to m0 held at every
    # timestep and the previous-iterate score to zero, making the first sweep
    # a pure advection-diffusion solve.
    m_old = np.tile(m0, (n_steps + 1, 1))
    score_old = np.zeros((n_steps + 1, d))

    trace: list[IterationRecord] = []
    converged = False
    k = 0
    while k < cfg.max_iters:
        k += 1
        tick = time.perf_counter()
        m_new = np.empty_like(m_old)
        m_new[0] = m0
        for n in range(1, n_steps + 1):
            system = assemble_system(m_new[n - 1], score_old[n], sde,
                                     grid.time(n), dt, image_values,
                                     cfg.boundary, height, width)
            m_new[n] = solve_banded(system)
        score_new = np.empty_like(score_old)
        for n in range(n_steps + 1):
            score_new[n] = central_difference_score(m_new[n], height, width)
        error = float(np.linalg.norm(m_new - m_old))
        trace.append(IterationRecord(k, error, (time.perf_counter() - tick) * 1e3))
        m_old, score_old = m_new, score_new
        if error <= cfg.tol:
            converged = True
            break

    if not converged:
        warnings.warn(NotConvergedWarning(trace[-1].error, k))

    return PolicyIterationResult(
        log_density=LogDensityField(grid, height, width, m_old),
        score=ScoreField(grid, height, width, score_old),
        trace=tuple(trace),
        converged=converged,
        iterations=k,
    )
