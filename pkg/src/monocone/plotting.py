"""Scatter figures of state points against the cone boundaries."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .cone import CURVE_POINTS, ConeBoundary  # noqa: E402

FAMILY_COLORS = {
    "ghz_class": "tab:blue",
    "w_class": "tab:green",
    "haar": "tab:blue",
    "gen_ghz": "tab:red",
    "explicit": "black",
}

AXIS_LABELS = {
    "tangle": r"entanglement monogamy score $\delta_C$",
    "discord": r"discord monogamy score $\delta_D$ (bits)",
}


def cone_figure(score, ggm, measure: str, families=None, title: str | None = None):
    """Build the (score, GGM) scatter with the matching cone boundary.

    ``measure`` is ``"tangle"`` or ``"discord"``; ``families`` optionally
    tags each point for coloring.
    """
    score = np.asarray(score, dtype=float)
    ggm = np.asarray(ggm, dtype=float)
    kind = "entanglement_cone" if measure == "tangle" else "discord_cone"
    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    if families is None:
        families = np.full(score.shape, "haar", dtype=object)
    families = np.asarray(families, dtype=object)
    for fam in dict.fromkeys(families.tolist()):
        sel = families == fam
        ax.scatter(
            score[sel], ggm[sel], s=1.5, alpha=0.5, lw=0,
            color=FAMILY_COLORS.get(fam, "gray"), label=fam, rasterized=False,
        )
    for x, y in ConeBoundary(kind).curves(CURVE_POINTS):
        ax.plot(x, y, color="k", lw=1.0)
    ax.set_xlabel(AXIS_LABELS[measure])
    ax.set_ylabel("GGM")
    ax.set_ylim(0.0, 0.52)
    if measure == "tangle":
        ax.set_xlim(-0.02, 1.02)
    else:
        ax.set_xlim(-1.05, 1.05)
    if title:
        ax.set_title(title)
    if len(set(families.tolist())) > 1:
        ax.legend(markerscale=6, frameon=False, loc="upper left")
    fig.tight_layout()
    return fig


def save_cone_plot(path, score, ggm, measure: str, families=None, title: str | None = None) -> Path:
    """Render the cone scatter to ``path``; the format follows the suffix."""
    path = Path(path)
    fig = cone_figure(score, ggm, measure, families, title)
    fig.savefig(path, format=path.suffix.lstrip(".") or "svg")
    plt.close(fig)
    return path


def save_scan_plot(path, alpha_sq, delta_c, delta_d, ggm) -> Path:
    """Both boundaries with the generalized-GHZ scan points overlaid."""
    path = Path(path)
    fig, (left, right) = plt.subplots(1, 2, figsize=(9.0, 4.0), sharey=True)
    for ax, kind, score, label in (
        (left, "entanglement_cone", delta_c, AXIS_LABELS["tangle"]),
        (right, "discord_cone", delta_d, AXIS_LABELS["discord"]),
    ):
        for x, y in ConeBoundary(kind).curves(CURVE_POINTS):
            ax.plot(x, y, color="k", lw=1.0)
        ax.scatter(score, ggm, s=8, c=alpha_sq, cmap="viridis", zorder=3)
        ax.set_xlabel(label)
    left.set_ylabel("GGM")
    fig.tight_layout()
    fig.savefig(path, format=path.suffix.lstrip(".") or "svg")
    plt.close(fig)
    return path
