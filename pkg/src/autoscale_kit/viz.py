"""Figure rendering for the CLI report paths.

Every helper writes a PNG next to the delimited output of its command.
Matplotlib is forced onto the Agg backend so rendering works headless.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

STYLE = {
    "figure.figsize": (6.0, 3.7),
    "figure.dpi": 110,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "font.size": 9,
}


def save_histogram_figure(path, result, title="density value distribution"):
    """Log-scale histogram of positive pixel values with the tail ratio."""
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        widths = np.diff(result.bin_edges)
        ax.bar(result.bin_edges[:-1], result.counts, width=widths, align="edge",
               color="#cc4444", edgecolor="none")
        ax.set_yscale("log")
        ax.set_xlabel("pixel value")
        ax.set_ylabel("count")
        tail = "n/a" if result.tail_ratio is None else f"{result.tail_ratio:.3g}"
        ax.set_title(f"{title} (p99/median = {tail})")
        fig.tight_layout()
        fig.savefig(path)
        plt.close(fig)


def save_trace_figure(path, loss_trace, centers=None):
    """Optimizer trace: loss per iteration, optionally the center alongside."""
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        ax.plot(loss_trace, color="#2255aa", label="loss")
        ax.set_yscale("log")
        ax.set_xlabel("iteration")
        ax.set_ylabel("center loss")
        if centers is not None:
            ax2 = ax.twinx()
            ax2.plot(centers, color="#888888", lw=0.9, label="center")
            ax2.set_ylabel("center")
            ax2.grid(False)
        fig.tight_layout()
        fig.savefig(path)
        plt.close(fig)


def save_scene_figure(path, raster, region=None, points=None, title="prediction"):
    """Prediction raster with the refined region box and detections overlaid."""
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(5.2, 5.2))
        ax.imshow(raster, cmap="inferno", origin="upper", interpolation="nearest")
        ax.grid(False)
        if region is not None:
            b = region.bbox
            ax.add_patch(plt.Rectangle((b.x0, b.y0), b.width, b.height,
                                       fill=False, edgecolor="#00ff88", lw=1.4))
            ax.text(b.x0, b.y0 - 2, f"r = {region.scale:.2f}",
                    color="#00ff88", fontsize=8)
        if points is not None and len(points):
            ax.scatter(points.xy[:, 0] - 0.5, points.xy[:, 1] - 0.5,
                       s=6, c="#44ccff", marker="+", linewidths=0.7)
        ax.set_title(title)
        fig.tight_layout()
        fig.savefig(path)
        plt.close(fig)
