"""PNG figures for the report commands. Uses the Agg backend only."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


def space_time_figure(rows, window, params, path, title=None):
    """Rows top to bottom, digit 0 white and pq-1 black."""
    lo, hi = window
    data = np.asarray(rows, dtype=float)
    fig, ax = plt.subplots(figsize=(max(4, 0.18 * data.shape[1]), max(3, 0.18 * data.shape[0])))
    ax.imshow(data, cmap="gray_r", vmin=0, vmax=params.base - 1, interpolation="nearest",
              extent=(lo - 0.5, hi + 0.5, data.shape[0] - 0.5, -0.5))
    ax.axvline(0.5, color="tab:red", lw=0.8)
    ax.set_xlabel("position")
    ax.set_ylabel("step")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def complexity_figure(ns, counts, formula, path, label="words"):
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.semilogy(ns, counts, "o", label=label)
    if formula is not None:
        ax.semilogy(ns, formula, "-", lw=1, label="closed form")
    ax.set_xlabel("n")
    ax.set_ylabel("count")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def search_figure(results, path, top=30):
    shown = results[:top]
    fig, ax = plt.subplots(figsize=(6, 3.5))
    ax.bar(range(len(shown)), [r.run_length for r in shown], color="tab:gray")
    ax.set_xticks(range(len(shown)))
    ax.set_xticklabels([str(r.xi) for r in shown], rotation=90, fontsize=6)
    ax.set_ylabel("run length")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
