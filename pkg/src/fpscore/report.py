"""Figure rendering for the report paths: every CSV a command writes gets a
matching PNG rendered next to it."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def save_iteration_trace(path, ks, errors) -> None:
    """Fixed-point error per outer iteration, log scale."""
    fig, ax = plt.subplots(figsize=(5, 3.2))
    ax.semilogy(ks, errors, marker="o", ms=3)
    ax.set_xlabel("iteration")
    ax.set_ylabel("L2 change")
    ax.set_title("fixed-point convergence")
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_loss_curve(path, losses_by_label: dict[str, list[float]]) -> None:
    fig, ax = plt.subplots(figsize=(5, 3.2))
    for label, losses in losses_by_label.items():
        ax.semilogy(np.arange(1, len(losses) + 1), losses, label=label)
    ax.set_xlabel("epoch")
    ax.set_ylabel("loss")
    ax.set_title("training loss")
    ax.grid(True, alpha=0.3)
    if len(losses_by_label) > 1:
        ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_metric_curves(path, series_by_label: dict[str, tuple[list, list, list]]
                       ) -> None:
    """SSIM and MSE against epoch; series values are (epochs, ssim, mse)."""
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 3.2))
    for label, (epochs, ssims, mses) in series_by_label.items():
        ax1.plot(epochs, ssims, label=label)
        ax2.semilogy(epochs, mses, label=label)
    ax1.set_xlabel("epoch")
    ax1.set_ylabel("SSIM")
    ax2.set_xlabel("epoch")
    ax2.set_ylabel("MSE")
    for ax in (ax1, ax2):
        ax.grid(True, alpha=0.3)
        ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_snapshot_panel(path, grids: list[np.ndarray], title: str = "") -> None:
    """Row of snapshot images, clamped to [0, 1] for display."""
    n = len(grids)
    fig, axes = plt.subplots(1, n, figsize=(1.6 * n, 2.0))
    if n == 1:
        axes = [axes]
    for idx, (ax, grid) in enumerate(zip(axes, grids)):
        ax.imshow(np.clip(grid, 0.0, 1.0), cmap="gray", vmin=0.0, vmax=1.0)
        ax.set_title(f"step {idx}", fontsize=8)
        ax.axis("off")
    if title:
        fig.suptitle(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
