"""Static SVG figures written next to the CSV outputs.

Figures are built on :class:`matplotlib.figure.Figure` directly (no pyplot
state) and saved without a timestamp, so reruns produce identical files.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib as mpl
import numpy as np
from matplotlib.figure import Figure
from matplotlib.patches import Circle

from .annotate import BARRIERS

CLASS_COLORS = {
    "information-not-crossing": "#c0392b",
    "unsure": "#27ae60",
    "information-crossing": "#2e5fa3",
    "not-crossed": "#c0392b",
    "crossed": "#2e5fa3",
}
BARRIER_COLORS = {
    "political": "#c0392b",
    "linguistic": "#27ae60",
    "geographic": "#e67e22",
    "economic": "#2e5fa3",
    "cultural": "#7f8c8d",
}


def save_svg(fig: Figure, path: str | Path) -> Path:
    with mpl.rc_context({"svg.hashsalt": "newsbarriers"}):
        fig.savefig(path, format="svg", metadata={"Date": None}, bbox_inches="tight")
    return Path(path)


def plot_class_distribution(dists, path) -> Path:
    fig = Figure(figsize=(14, 3.2))
    axes = fig.subplots(1, len(BARRIERS), sharey=False)
    for ax, b in zip(axes, BARRIERS):
        cells = [d for d in dists if d.barrier == b.value]
        cats = [d.category for d in cells]
        classes = list(cells[0].counts) if cells else []
        x = np.arange(len(cats))
        width = 0.8 / max(len(classes), 1)
        for i, cls in enumerate(classes):
            ax.bar(x + i * width, [d.counts[cls] for d in cells], width, label=cls, color=CLASS_COLORS.get(cls))
        ax.set_title(b.value)
        ax.set_xticks(x + 0.4 - width / 2, cats, rotation=60, fontsize=7)
        if classes:
            ax.legend(fontsize=6)
    axes[0].set_ylabel("events")
    return save_svg(fig, path)


def plot_publisher_stats(stats, path) -> Path:
    fig = Figure(figsize=(13, 3.4))
    axes = fig.subplots(1, 3)
    panels = (("publishers", lambda s: s.publishers), ("avg articles / publisher", lambda s: float(s.avg_articles)),
              ("avg events / publisher", lambda s: float(s.avg_events)))
    for ax, (title, getter) in zip(axes, panels):
        for b in BARRIERS:
            rows = [s for s in stats if s.barrier == b.value]
            ax.plot([s.category for s in rows], [getter(s) for s in rows], marker="o", label=b.value,
                    color=BARRIER_COLORS[b.value])
        ax.set_title(title)
        ax.tick_params(axis="x", labelrotation=60, labelsize=7)
    axes[0].legend(fontsize=6)
    return save_svg(fig, path)


_VENN_CENTERS = {
    2: [(-0.5, 0.0), (0.5, 0.0)],
    3: [(-0.5, 0.3), (0.5, 0.3), (0.0, -0.55)],
}


def _region_anchor(member_mask, centers):
    """Label position for a Venn region: mean of member centres pushed away from non-members."""
    inside = [c for c, m in zip(centers, member_mask) if m]
    outside = [c for c, m in zip(centers, member_mask) if not m]
    x, y = np.mean(inside, axis=0)
    if outside:
        ox, oy = np.mean(outside, axis=0)
        x, y = x + 0.45 * (x - ox), y + 0.45 * (y - oy)
    return x, y


def plot_concept_overlap(groups: dict, overlap, path) -> Path:
    names = list(overlap.sizes)
    if len(names) in _VENN_CENTERS:
        centers = _VENN_CENTERS[len(names)]
        fig = Figure(figsize=(5, 4.5))
        ax = fig.subplots()
        for (cx, cy), name, color in zip(centers, names, BARRIER_COLORS.values()):
            ax.add_patch(Circle((cx, cy), 0.9, alpha=0.25, color=color))
            ax.text(cx * 1.9, cy * 1.9 + (0.2 if cy >= 0 else -0.2), name, ha="center", fontsize=9)
        for key, n in sorted(overlap.venn_regions(groups).items()):
            mask = [nm in key for nm in names]
            x, y = _region_anchor(mask, centers)
            ax.text(x, y, str(n), ha="center", va="center", fontsize=10)
        ax.set_xlim(-2, 2)
        ax.set_ylim(-1.9, 1.7)
        ax.set_aspect("equal")
        ax.axis("off")
    else:
        fig = Figure(figsize=(5.5, 4.5))
        ax = fig.subplots()
        mat = np.zeros((len(names), len(names)), dtype=int)
        for i, a in enumerate(names):
            mat[i, i] = overlap.sizes[a]
        for (a, b), n in overlap.pairwise.items():
            i, j = names.index(a), names.index(b)
            mat[i, j] = mat[j, i] = n
        ax.imshow(mat, cmap="Blues")
        for i in range(len(names)):
            for j in range(len(names)):
                ax.text(j, i, str(mat[i, j]), ha="center", va="center", fontsize=8)
        ax.set_xticks(range(len(names)), names, rotation=45, fontsize=8)
        ax.set_yticks(range(len(names)), names, fontsize=8)
        ax.set_title(f"shared concepts (all groups: {overlap.full})", fontsize=9)
    return save_svg(fig, path)


def plot_metric_comparison(deltas, path, metric="macro_f1") -> Path:
    """Best-model baseline vs concept-feature score per (barrier, category)."""
    barriers = sorted({d["barrier"] for d in deltas})
    fig = Figure(figsize=(4 * max(len(barriers), 1), 3.4))
    axes = np.atleast_1d(fig.subplots(1, max(len(barriers), 1)))
    for ax, b in zip(axes, barriers):
        rows = [d for d in deltas if d["barrier"] == b]
        cats = sorted({d["category"] for d in rows})
        base = [max(d[f"baseline_{metric}"] for d in rows if d["category"] == c) for c in cats]
        prop = [max(d[f"proposed_{metric}"] for d in rows if d["category"] == c) for c in cats]
        x = np.arange(len(cats))
        ax.bar(x - 0.2, base, 0.4, label="text", color="#95a5a6")
        ax.bar(x + 0.2, prop, 0.4, label="text+concepts", color="#2e5fa3")
        ax.set_xticks(x, cats, rotation=60, fontsize=7)
        ax.set_ylim(0, 1)
        ax.set_title(f"{b}: {metric}")
        ax.legend(fontsize=6)
    return save_svg(fig, path)


def plot_improvement(table: dict, path) -> Path:
    fig = Figure(figsize=(6, 3.4))
    ax = fig.subplots()
    names = list(table)
    x = np.arange(len(names))
    ax.bar(x - 0.2, [table[b]["improved"] for b in names], 0.4, label="improved", color="#27ae60")
    ax.bar(x + 0.2, [table[b]["not_improved"] for b in names], 0.4, label="not improved", color="#95a5a6")
    ax.set_xticks(x, names)
    ax.set_ylabel("categories")
    ax.legend(fontsize=7)
    return save_svg(fig, path)
