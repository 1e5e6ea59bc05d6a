"""Figure rendering for the report commands (PNG files next to the TSV output)."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .qa import CoverageReport, RootStat


def root_stats_figure(stats: list[RootStat], path) -> Path:
    path = Path(path)
    slugs = [s.slug for s in stats]
    x = np.arange(len(slugs))
    fig, ax = plt.subplots(figsize=(max(6, len(slugs) * 0.6), 4.5))
    ax.bar(x - 0.2, [s.node_count for s in stats], width=0.4, label="nodes")
    ax.bar(x + 0.2, [s.edge_count for s in stats], width=0.4, label="edges")
    ax.set_xticks(x)
    ax.set_xticklabels(slugs, rotation=45, ha="right", fontsize=8)
    ax.set_ylabel("count")
    ax.set_title("Nodes and edges per root category")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def coverage_figure(report: CoverageReport, path) -> Path:
    path = Path(path)
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4), width_ratios=[1, 3])
    ax1.bar(["matched", "unmatched"], [report.matched_fraction, 1 - report.matched_fraction])
    ax1.set_ylim(0, 1)
    ax1.set_title("Keyword coverage")
    top = list(report.missing[:15])
    if top:
        ax2.barh([kw for kw, _ in reversed(top)], [f for _, f in reversed(top)])
        ax2.set_title("Top missing keywords by frequency")
        ax2.tick_params(axis="y", labelsize=8)
    else:
        ax2.set_axis_off()
        ax2.text(0.5, 0.5, "no missing keywords", ha="center")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def scope_figure(rows: list[tuple[int, int]], path) -> Path:
    path = Path(path)
    counts = [c for _, c in rows]
    fig, ax = plt.subplots(figsize=(6, 4))
    if counts:
        ax.hist(counts, bins=min(20, max(1, len(set(counts)))))
    ax.set_xlabel("usage count")
    ax.set_ylabel("topics")
    ax.set_title(f"Age-out candidates ({len(rows)} topics)")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
