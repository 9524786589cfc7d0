"""Matplotlib figures written next to the JSON results.

All plots use the Agg backend and strip the PNG software stamp so identical
inputs give byte-identical files.
"""
from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

_STYLE = {
    "figure.figsize": (6.0, 3.8),
    "figure.dpi": 100,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "axes.titlesize": 11,
    "axes.labelsize": 10,
    "legend.frameon": False,
    "font.size": 9,
}


def _save(fig, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, format="png", metadata={"Software": None})
    plt.close(fig)
    return path


def plot_trace(trace, path, title="SWC score trace") -> Path:
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        x = np.arange(len(trace.current))
        ax.plot(x, trace.current, lw=0.8, color="0.55", label="current")
        ax.plot(x, trace.best, lw=1.4, color="C0", label="best so far")
        ax.set_xlabel("sweep")
        ax.set_ylabel("log posterior")
        ax.set_title(title)
        ax2 = ax.twinx()
        ax2.plot(x, trace.temperature, lw=0.8, ls="--", color="C3")
        ax2.set_ylabel("temperature", color="C3")
        ax.legend(loc="lower right")
        fig.tight_layout()
        return _save(fig, path)


def plot_topic_sizes(sizes, path, title="Topic sizes") -> Path:
    sizes = sorted(sizes, reverse=True)
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        ax.bar(np.arange(1, len(sizes) + 1), sizes, color="C0")
        ax.set_xlabel("topic rank")
        ax.set_ylabel("stories")
        ax.set_title(title)
        fig.tight_layout()
        return _save(fig, path)


def plot_pr_curve(points, path, title="Pairwise precision-recall") -> Path:
    """``points`` are dicts with ``alpha``, ``precision`` and ``recall``."""
    pts = sorted(points, key=lambda p: (p["recall"], p["precision"]))
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        ax.plot([p["recall"] for p in pts], [p["precision"] for p in pts], marker="o", ms=3, color="C0")
        for p in pts:
            ax.annotate(f"{p['alpha']:.3g}", (p["recall"], p["precision"]), fontsize=6,
                        xytext=(3, 3), textcoords="offset points")
        ax.set_xlim(0, 1.02)
        ax.set_ylim(0, 1.02)
        ax.set_xlabel("recall")
        ax.set_ylabel("precision")
        ax.set_title(title)
        fig.tight_layout()
        return _save(fig, path)


def plot_trajectories(doc, path, title="Topic trajectories") -> Path:
    """Timeline of a ``track`` document: one column per window, links as segments."""
    nodes = doc["nodes"]
    rank: dict = {}
    pos = {}
    for node in nodes:
        w = node["window"]
        pos[node["id"]] = (w, rank.get(w, 0))
        rank[w] = rank.get(w, 0) + 1
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        for link in doc["links"]:
            (x0, y0), (x1, y1) = pos[link["source"]], pos[link["target"]]
            ax.plot([x0, x1], [y0, y1], color="C0", lw=0.5 + 3 * link["similarity"], alpha=0.6)
        sizes = np.array([n["size"] for n in nodes], dtype=float)
        xs = [pos[n["id"]][0] for n in nodes]
        ys = [pos[n["id"]][1] for n in nodes]
        ax.scatter(xs, ys, s=20 + 200 * sizes / max(sizes.max(), 1), color="C1", zorder=3)
        ax.set_xlabel("window")
        ax.set_ylabel("topic (rank within window)")
        ax.set_title(title)
        fig.tight_layout()
        return _save(fig, path)
