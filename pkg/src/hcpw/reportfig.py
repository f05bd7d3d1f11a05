"""Figure and delimited-text rendering for CLI reports."""

from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt


def write_csv(path: str | Path, header: list[str], rows: list[list]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def save_cue_rate_histogram(histogram: dict, path: str | Path, title: str = "") -> None:
    """Bar chart of per-cue natural-visit rates."""
    edges = histogram["rate_bin_edges"]
    counts = histogram["counts"]
    centers = [(edges[i] + edges[i + 1]) / 2 for i in range(len(counts))]
    widths = [(edges[i + 1] - edges[i]) * 0.9 for i in range(len(counts))]
    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.bar(centers, counts, width=widths, color="#4878a8", edgecolor="black", linewidth=0.5)
    ax.set_xlabel("aggregate visits/day covering the cue")
    ax.set_ylabel("cues")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_attack_diagnostics(stats: dict, path: str | Path, title: str = "") -> None:
    """Simple bar panel of scalar attack statistics."""
    numeric = {k: v for k, v in stats.items() if isinstance(v, (int, float))}
    if not numeric:
        numeric = {"(none)": 0}
    fig, ax = plt.subplots(figsize=(7, 4.5))
    keys = list(numeric)
    ax.barh(range(len(keys)), [numeric[k] for k in keys], color="#a85448")
    ax.set_yticks(range(len(keys)), keys)
    ax.set_xlabel("value")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
