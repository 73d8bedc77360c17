"""SVG figures: projection scatters per window pair and per-subreddit drift bars."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt


def scatter_projection(projection, title: str, path):
    """2-D scatter of a tagged projection, one color per window of origin."""
    fig, ax = plt.subplots(figsize=(5, 4))
    windows = sorted({tag[1] for tag in projection.tags})
    for window in windows:
        xs = [projection.coordinates[i, 0] for i, t in enumerate(projection.tags)
              if t[1] == window]
        ys = [projection.coordinates[i, 1] for i, t in enumerate(projection.tags)
              if t[1] == window]
        ax.scatter(xs, ys, s=12, alpha=0.7, label=window)
    ax.set_xlabel("PC1")
    ax.set_ylabel("PC2")
    ax.set_title(title)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)


def drift_bars(rows, path):
    """Mean cosine-distance bars per subreddit, grouped by window pair."""
    fig, ax = plt.subplots(figsize=(max(6, len(rows) * 0.5), 4))
    labels = [f"{r.subreddit}\n{r.window_pair}" for r in rows]
    values = [r.mean_cos_dist for r in rows]
    errors = [r.std_cos_dist for r in rows]
    colors = ["tab:blue" if r.class_label == "loyal"
              else "tab:orange" if r.class_label == "vagrant" else "tab:gray"
              for r in rows]
    ax.bar(range(len(rows)), values, yerr=errors, color=colors, capsize=2)
    ax.set_xticks(range(len(rows)))
    ax.set_xticklabels(labels, fontsize=7, rotation=45, ha="right")
    ax.set_ylabel("mean cosine distance")
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)
