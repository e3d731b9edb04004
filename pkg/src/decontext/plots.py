"""Figure rendering for benchmark reports."""

from __future__ import annotations

from typing import Mapping, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402


def plot_recall_curves(
    curves: Mapping[str, Sequence[tuple[float, float]]], out_path: str
) -> None:
    """Plot recall against compute budget, one line per segmentation strategy."""
    fig, ax = plt.subplots(figsize=(6, 4))
    for name in sorted(curves):
        points = curves[name]
        xs = [t for t, _ in points]
        ys = [r for _, r in points]
        ax.plot(xs, ys, marker="o", markersize=3, label=name)
    ax.set_xscale("log")
    ax.set_xlabel("compute budget")
    ax.set_ylabel("recall")
    ax.set_ylim(0, 1.02)
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(out_path, dpi=150, metadata={"Software": None})
    plt.close(fig)


def plot_category_distribution(category_pct: Mapping[str, float], out_path: str) -> None:
    """Bar chart of the annotation category distribution."""
    fig, ax = plt.subplots(figsize=(5, 3.5))
    names = list(category_pct)
    ax.bar(names, [category_pct[n] for n in names], color="steelblue")
    ax.set_ylabel("% of annotations")
    ax.tick_params(axis="x", rotation=20)
    fig.tight_layout()
    fig.savefig(out_path, dpi=150, metadata={"Software": None})
    plt.close(fig)
