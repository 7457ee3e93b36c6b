"""Small trainable score network with hand-written reverse-mode gradients.

Architecture: dense layers [D+1, h1, h2, D] with tanh hidden activations and
a linear output. The extra input is the linear time feature t/T appended to
the flattened image. Training minimizes the sliced objective

    loss(t) = || s(x + lambda(t) z, t) * lambda(t) + z ||^2 / (2 g(t)^2)

summed over the timesteps of one epoch, with a single Adam update per epoch.
Everything is deterministic given the seed.
"""

from __future__ import annotations

import struct
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from .errors import FormatError, InvalidInput, NumericalError
from .fields import ImageField, ScoreField, SdeSpec, TimeGrid
from .transport import embed_forward

FPNW_MAGIC = b"FPNW1"

TRAIN_MODES = ("embedded", "baseline")


@dataclass
class ScoreNetParams:
    sizes: tuple[int, ...]
    weights: list[np.ndarray]  # each (fan_out, fan_in)
    biases: list[np.ndarray]

    def copy(self) -> "ScoreNetParams":
        return ScoreNetParams(self.sizes,
                              [w.copy() for w in self.weights],
                              [b.copy() for b in self.biases])

    def flat(self) -> np.ndarray:
        chunks = []
        for w, b in zip(self.weights, self.biases):
            chunks.append(w.reshape(-1))
            chunks.append(b.reshape(-1))
        return np.concatenate(chunks)


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 500
    learning_rate: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps_adam: float = 1e-8
    lambda_min: float = 0.1
    lambda_max: float = 0.5
    hidden: tuple[int, ...] = (128, 128)
    seed: int = 0
    mode: str = "embedded"

    def __post_init__(self):
        if not 0 < self.lambda_min <= self.lambda_max:
            raise InvalidInput("need 0 < lambda_min <= lambda_max")
        if not self.learning_rate > 0:
            raise InvalidInput("learning rate must be positive")
        if self.epochs < 0:
            raise InvalidInput("epochs must be nonnegative")
        if self.mode not in TRAIN_MODES:
            raise InvalidInput(f"mode must be one of {TRAIN_MODES}")


def lambda_schedule(t: float, total_time: float, lam_min: float,
                    lam_max: float):
    """Geometric perturbation ladder lambda(t) = min * (max/min)^(t/T)."""
    return lam_min * (lam_max / lam_min) ** (np.asarray(t) / total_time)


def init_network(d: int, hidden=(128, 128), seed=0) -> ScoreNetParams:
    """Zero-mean weights scaled by 1/sqrt(fan_in), zero biases."""
    sizes = (d + 1, *hidden, d)
    if any(s < 1 for s in sizes):
        raise InvalidInput("layer sizes must be positive")
    rng = np.random.default_rng(seed)
    weights, biases = [], []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        weights.append(rng.standard_normal((fan_out, fan_in)) / np.sqrt(fan_in))
        biases.append(np.zeros(fan_out))
    return ScoreNetParams(sizes, weights, biases)


def _forward_batch(params: ScoreNetParams, inputs: np.ndarray):
    """Hidden activations and output for a (rows, D+1) input batch."""
    h1 = np.tanh(inputs @ params.weights[0].T + params.biases[0])
    h2 = np.tanh(h1 @ params.weights[1].T + params.biases[1])
    out = h2 @ params.weights[2].T + params.biases[2]
    return h1, h2, out


def forward(params: ScoreNetParams, x: np.ndarray, t: float,
            total_time: float) -> np.ndarray:
    """Network output s(x, t) for one flattened image."""
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    if x.size + 1 != params.sizes[0]:
        raise InvalidInput(f"expected {params.sizes[0] - 1} pixels, got {x.size}")
    inputs = np.append(x, t / total_time)[None, :]
    out = _forward_batch(params, inputs)[2][0]
    if not np.all(np.isfinite(out)):
        raise NumericalError("non-finite network output")
    return out


def _backward_batch(params, inputs, h1, h2, d_out):
    """Gradients of a scalar loss given d(loss)/d(output), summed over rows."""
    grads_w = [None, None, None]
    grads_b = [None, None, None]
    grads_w[2] = d_out.T @ h2
    grads_b[2] = d_out.sum(axis=0)
    d_h2 = (d_out @ params.weights[2]) * (1.0 - h2 * h2)
    grads_w[1] = d_h2.T @ h1
    grads_b[1] = d_h2.sum(axis=0)
    d_h1 = (d_h2 @ params.weights[1]) * (1.0 - h1 * h1)
    grads_w[0] = d_h1.T @ inputs
    grads_b[0] = d_h1.sum(axis=0)
    return grads_w, grads_b


def sliced_loss(params: ScoreNetParams, x_embedded: np.ndarray, t: float,
                z: np.ndarray, lam: float, g: float,
                total_time: float = 1.0):
    """Loss ||s(x + lam z, t) lam + z||^2 / (2 g^2) and its parameter gradient.

    Returns (loss, (grads_w, grads_b)) with gradients shaped like the
    parameters.
    """
    if not (lam > 0 and g > 0):
        raise InvalidInput("lambda and g must be positive")
    x = np.asarray(x_embedded, dtype=np.float64).reshape(-1)
    z = np.asarray(z, dtype=np.float64).reshape(-1)
    inputs = np.append(x + lam * z, t / total_time)[None, :]
    h1, h2, out = _forward_batch(params, inputs)
    residual = out * lam + z[None, :]
    loss = float(np.sum(residual * residual)) / (2.0 * g * g)
    d_out = (lam / (g * g)) * residual
    return loss, _backward_batch(params, inputs, h1, h2, d_out)


@dataclass
class AdamState:
    m_w: list[np.ndarray]
    v_w: list[np.ndarray]
    m_b: list[np.ndarray]
    v_b: list[np.ndarray]
    step: int = 0

    @classmethod
    def for_params(cls, params: ScoreNetParams) -> "AdamState":
        return cls(m_w=[np.zeros_like(w) for w in params.weights],
                   v_w=[np.zeros_like(w) for w in params.weights],
                   m_b=[np.zeros_like(b) for b in params.biases],
                   v_b=[np.zeros_like(b) for b in params.biases])


def adam_step(params: ScoreNetParams, grads, state: AdamState,
              lr: float = 1e-3, beta1: float = 0.9, beta2: float = 0.999,
              eps: float = 1e-8) -> None:
    """One Adam update with bias correction, in place."""
    grads_w, grads_b = grads
    state.step += 1
    t = state.step
    c1 = 1.0 - beta1 ** t
    c2 = 1.0 - beta2 ** t
    for tensors, moments1, moments2, gs in (
            (params.weights, state.m_w, state.v_w, grads_w),
            (params.biases, state.m_b, state.v_b, grads_b)):
        for p, m, v, grad in zip(tensors, moments1, moments2, gs):
            m *= beta1
            m += (1.0 - beta1) * grad
            v *= beta2
            v += (1.0 - beta2) * grad * grad
            p -= lr * (m / c1) / (np.sqrt(v / c2) + eps)


@dataclass(frozen=True)
class TrainResult:
    params: ScoreNetParams
    losses: tuple[float, ...]
    wall_ms: tuple[float, ...]
    epochs_run: int


EpochHook = Callable[[int, ScoreNetParams, float], bool]


def train(scores: ScoreField | None, image: ImageField, sde: SdeSpec,
          grid: TimeGrid, cfg: TrainConfig,
          on_epoch: EpochHook | None = None) -> TrainResult:
    """Train the score network on one image; returns params and loss trace.

    In "embedded" mode the inputs follow the transport trajectory driven by
    the precomputed score field; in "baseline" mode the image is held fixed,
    isolating the effect of the embedding. Both modes run the same epoch body
    on the per-timestep states: draw z, perturb, evaluate, and take one Adam
    step per timestep (N updates per epoch; the reported epoch loss sums the
    per-timestep terms). ``on_epoch(epoch, params, loss)`` may return True to
    stop early.
    """
    d = image.size
    n_steps = grid.steps
    total_time = grid.final_time

    base = np.random.SeedSequence(cfg.seed)
    init_seed, z_seed = base.spawn(2)
    params = init_network(d, cfg.hidden, init_seed)
    state = AdamState.for_params(params)
    rng = np.random.default_rng(z_seed)

    if cfg.mode == "embedded":
        if scores is None:
            raise InvalidInput("embedded mode needs a precomputed score field")
        states = embed_forward(image, scores, sde, grid).states[1:]
    else:
        states = np.tile(image.values, (n_steps, 1))

    times = np.array([grid.time(n) for n in range(1, n_steps + 1)])
    lams = lambda_schedule(times, total_time, cfg.lambda_min, cfg.lambda_max)
    g_sq = np.array([sde.g(t) ** 2 for t in times])
    if np.any(g_sq <= 0):
        raise InvalidInput("training requires g(t) > 0 on the whole grid")
    time_feature = times / total_time

    losses: list[float] = []
    walls: list[float] = []
    epochs_run = 0
    inputs = np.empty((1, d + 1))
    for epoch in range(1, cfg.epochs + 1):
        tick = time.perf_counter()
        epoch_loss = 0.0
        for n in range(n_steps):
            z = rng.standard_normal(d)
            inputs[0, :d] = states[n] + lams[n] * z
            inputs[0, d] = time_feature[n]
            h1, h2, out = _forward_batch(params, inputs)
            residual = out * lams[n] + z
            epoch_loss += float(np.sum(residual * residual)) / (2.0 * g_sq[n])
            d_out = (lams[n] / g_sq[n]) * residual
            grads = _backward_batch(params, inputs, h1, h2, d_out)
            adam_step(params, grads, state, cfg.learning_rate, cfg.beta1,
                      cfg.beta2, cfg.eps_adam)
        if not np.isfinite(epoch_loss):
            raise NumericalError(f"non-finite loss at epoch {epoch}")
        losses.append(epoch_loss)
        walls.append((time.perf_counter() - tick) * 1e3)
        epochs_run = epoch
        if on_epoch is not None and on_epoch(epoch, params, epoch_loss):
            break

    return TrainResult(params, tuple(losses), tuple(walls), epochs_run)


def network_score_fn(params: ScoreNetParams, total_time: float):
    """Adapter turning trained parameters into an (image, t) -> score callable."""
    def score_fn(img: ImageField, t: float) -> np.ndarray:
        return forward(params, img.values, t, total_time)
    return score_fn


# --------------------------------------------------------------------------
# Checkpoint format: magic b"FPNW1", u32 layer count L, u32 sizes[L], then
# for each layer its weight matrix (row-major) followed by its bias vector,
# all float64 little-endian.
# --------------------------------------------------------------------------

def save_checkpoint(path, params: ScoreNetParams) -> None:
    parts = [FPNW_MAGIC, struct.pack("<I", len(params.sizes))]
    parts.append(struct.pack(f"<{len(params.sizes)}I", *params.sizes))
    for w, b in zip(params.weights, params.biases):
        parts.append(np.ascontiguousarray(w, dtype="<f8").tobytes())
        parts.append(np.ascontiguousarray(b, dtype="<f8").tobytes())
    Path(path).write_bytes(b"".join(parts))


def load_checkpoint(path) -> ScoreNetParams:
    data = Path(path).read_bytes()
    if not data.startswith(FPNW_MAGIC):
        raise FormatError(f"{path}: bad magic, not an FPNW1 checkpoint")
    pos = len(FPNW_MAGIC)
    if len(data) < pos + 4:
        raise IOError(f"{path}: truncated checkpoint header")
    (n_sizes,) = struct.unpack_from("<I", data, pos)
    pos += 4
    sizes = struct.unpack_from(f"<{n_sizes}I", data, pos)
    pos += 4 * n_sizes
    weights, biases = [], []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        need = fan_out * fan_in * 8
        if len(data) < pos + need + fan_out * 8:
            raise IOError(f"{path}: truncated checkpoint payload")
        weights.append(np.frombuffer(data[pos:pos + need], dtype="<f8")
                       .reshape(fan_out, fan_in).astype(np.float64))
        pos += need
        biases.append(np.frombuffer(data[pos:pos + fan_out * 8], dtype="<f8")
                      .astype(np.float64))
        pos += fan_out * 8
    return ScoreNetParams(tuple(sizes), weights, biases)
