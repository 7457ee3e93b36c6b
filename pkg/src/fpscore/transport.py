"""Deterministic transport of an image along the probability-flow dynamics.

Forward integration embeds a precomputed score field into the image pixel by
pixel; reverse integration denoises with a learned (or given) score. Both
use fixed-step forward Euler; pixel values are free to leave [0, 1] during
transport and are only clamped at image export.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DivergedTrajectory, InvalidInput
from .fields import ImageField, ScoreField, SdeSpec, TimeGrid


@dataclass(frozen=True)
class EmbeddedTrajectory:
    """States x^n for n = 0..N produced by the forward transport steps."""

    grid: TimeGrid
    height: int
    width: int
    states: np.ndarray  # (N+1, H*W)

    def image(self, n: int) -> ImageField:
        return ImageField(self.height, self.width, self.states[n])


def average_drift(score_slice: np.ndarray, image: ImageField, sde: SdeSpec,
                  t: float) -> np.ndarray:
    """Transport drift a = f(x, t) - g(t)^2 * score / 2, one scalar per node."""
    score = np.asarray(score_slice, dtype=np.float64).reshape(-1)
    if score.size != image.size:
        raise InvalidInput("score slice does not match the image lattice")
    g = sde.g(t)
    return sde.drift(image.values, t) - 0.5 * g * g * score


def embed_forward(x0: ImageField, scores: ScoreField, sde: SdeSpec,
                  grid: TimeGrid) -> EmbeddedTrajectory:
    """x^n = x^{n-1} + a^{n-1} dt using the score slice at timestep n-1."""
    if scores.values.shape[0] < grid.steps:
        raise InvalidInput("score field does not cover timesteps 0..N-1")
    dt = grid.dt
    states = np.empty((grid.steps + 1, x0.size))
    states[0] = x0.values
    cur = x0.values.copy()
    for n in range(1, grid.steps + 1):
        drift = average_drift(scores.slice(n - 1),
                              ImageField(x0.height, x0.width, cur),
                              sde, grid.time(n - 1))
        cur = cur + drift * dt
        if not np.all(np.isfinite(cur)):
            raise DivergedTrajectory(n)
        states[n] = cur
    return EmbeddedTrajectory(grid, x0.height, x0.width, states)


ScoreFn = Callable[[ImageField, float], np.ndarray]


def ode_denoise(x_final: ImageField, score_fn: ScoreFn, sde: SdeSpec,
                grid: TimeGrid, snapshots: int = 10) -> list[ImageField]:
    """Integrate x^{n-1} = x^n - [f - g^2 score / 2] dt from n = N down to 0.

    Returns ``snapshots`` evenly spaced states of the reverse trajectory,
    always including the final (fully denoised) one.
    """
    if not 1 <= snapshots <= grid.steps + 1:
        raise InvalidInput("snapshots must be between 1 and N+1")
    dt = grid.dt
    cur = x_final.values.copy()
    trajectory = [cur.copy()]
    for n in range(grid.steps, 0, -1):
        t = grid.time(n)
        g = sde.g(t)
        score = np.asarray(
            score_fn(ImageField(x_final.height, x_final.width, cur), t),
            dtype=np.float64).reshape(-1)
        cur = cur - (sde.drift(cur, t) - 0.5 * g * g * score) * dt
        if not np.all(np.isfinite(cur)):
            raise DivergedTrajectory(n - 1)
        trajectory.append(cur.copy())
    picks = np.round(np.linspace(0, grid.steps, snapshots)).astype(int)
    return [ImageField(x_final.height, x_final.width, trajectory[p])
            for p in picks]
