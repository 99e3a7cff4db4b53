"""Static report figures rendered from an exported document or eval reports.

These mirror what the interactive UI shows: an overview scatter of feature
scores, per-feature curve plots (bar charts for binary features), and summary
charts for the evaluation reports. All figures are written to files.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

# categorical palette; black stays reserved for the PDP
PALETTE = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
]


def cluster_color(cluster_id: int) -> str:
    return PALETTE[cluster_id % len(PALETTE)]


def stroke_width(size: int) -> float:
    """Cluster-size line width, log-scaled and clamped to [1.5, 8]."""
    return float(np.clip(1.5 + 1.5 * np.log10(max(size, 1)), 1.5, 8.0))


def save_overview_figure(doc: dict, path: str | Path) -> Path:
    """Scatter of interaction strength (x) vs importance (y), one dot per feature."""
    fig, ax = plt.subplots(figsize=(7, 5))
    for feat in doc["features"]:
        x = feat["scores"]["interaction_strength"]
        y = feat["scores"]["importance"]
        ax.scatter([x], [y], s=40, color="#444444", zorder=3)
        ax.annotate(feat["name"], (x, y), textcoords="offset points", xytext=(5, 4), fontsize=8)
    ax.set_xlabel("interaction strength")
    ax.set_ylabel("feature importance (PDP std dev)")
    ax.set_title(f"feature space: {doc['dataset']['name']}")
    ax.grid(alpha=0.3)
    path = Path(path)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def _is_binary_grid(grid: list[float]) -> bool:
    return len(grid) == 2 and grid[0] == 0.0 and grid[1] == 1.0


def save_feature_figure(doc: dict, feature_name: str, path: str | Path) -> Path:
    """PDP in black plus one colored curve per surviving cluster.

    Binary features render as grouped bars of the 0-to-1 prediction change.
    """
    feat = next(f for f in doc["features"] if f["name"] == feature_name)
    grid = feat["grid"]
    fig, ax = plt.subplots(figsize=(7, 5))
    if _is_binary_grid(grid):
        deltas = [feat["pdp"][1] - feat["pdp"][0]]
        labels = ["PDP"]
        colors = ["black"]
        for curve in feat["vine_curves"]:
            deltas.append(curve["centroid"][1] - curve["centroid"][0])
            labels.append(curve["predicate"]["text"])
            colors.append(cluster_color(curve["id"]))
        ax.bar(range(len(deltas)), deltas, color=colors)
        ax.set_xticks(range(len(deltas)), labels, rotation=20, ha="right", fontsize=8)
        ax.set_ylabel("prediction change from 0 to 1")
    else:
        ax.plot(grid, feat["pdp"], color="black", linewidth=2.5, label="PDP", zorder=3)
        for curve in feat["vine_curves"]:
            ax.plot(
                grid,
                curve["centroid"],
                color=cluster_color(curve["id"]),
                linewidth=stroke_width(curve["size"]),
                label=f"{curve['predicate']['text']} (n={curve['size']})",
            )
        ax.set_xlabel(feature_name)
        ax.set_ylabel("change vs mean prediction")
        ax.legend(fontsize=8)
    ax.set_title(feature_name)
    ax.grid(alpha=0.3)
    path = Path(path)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def save_ceiling_figure(report: dict, path: str | Path) -> Path:
    """Bar chart of the reconstruction r-squared per curve family."""
    methods = ["pdp", "vine", "ice"]
    values = [report["r2"][m] for m in methods]
    fig, ax = plt.subplots(figsize=(5, 4))
    ax.bar(methods, values, color=["black", PALETTE[0], PALETTE[2]])
    ax.set_ylabel("reconstruction r²")
    ax.set_ylim(min(0.0, min(values)), 1.05)
    ax.set_title(f"information ceiling: {report['dataset']}")
    for i, v in enumerate(values):
        ax.text(i, v, f"{v:.3f}", ha="center", va="bottom", fontsize=9)
    path = Path(path)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def save_baseline_figure(report: dict, path: str | Path) -> Path:
    """Mean explanation accuracy, pipeline clusters vs random partitions."""
    fig, ax = plt.subplots(figsize=(5, 4))
    values = [report["mean_real_accuracy"], report["mean_random_accuracy"]]
    ax.bar(["pipeline clusters", "random clusters"], values, color=[PALETTE[0], "#999999"])
    ax.set_ylabel("mean explanation accuracy")
    ax.set_ylim(0, 1.05)
    ax.set_title(f"cluster explanation accuracy: {report['dataset']}")
    for i, v in enumerate(values):
        ax.text(i, v, f"{v:.3f}", ha="center", va="bottom", fontsize=9)
    path = Path(path)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def save_hstat_figure(values: np.ndarray, names: list[str], path: str | Path) -> Path:
    """Heatmap of the pairwise H matrix."""
    fig, ax = plt.subplots(figsize=(6, 5))
    shown = np.ma.masked_invalid(values)
    im = ax.imshow(shown, cmap="viridis", vmin=0.0, vmax=1.0)
    ax.set_xticks(range(len(names)), names, rotation=90, fontsize=7)
    ax.set_yticks(range(len(names)), names, fontsize=7)
    fig.colorbar(im, ax=ax, label="H")
    ax.set_title("pairwise interaction strength")
    path = Path(path)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def save_analysis_figures(doc: dict, outdir: str | Path) -> list[Path]:
    """Overview plus one detail figure per analyzed feature."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    written = [save_overview_figure(doc, outdir / "overview.png")]
    for feat in doc["features"]:
        safe = "".join(ch if ch.isalnum() or ch in "-_=" else "_" for ch in feat["name"])
        written.append(save_feature_figure(doc, feat["name"], outdir / f"feature_{safe}.png"))
    return written
