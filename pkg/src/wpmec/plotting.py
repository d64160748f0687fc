"""Matplotlib rendering of :class:`~wpmec.figures.FigureData` to image files."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .figures import FigureData  # noqa: E402

_COLORS = {
    "local": "tab:blue",
    "full": "tab:red",
    "partial": "tab:green",
    "optimal": "black",
}
_GROUP_STYLES = ["-", "--", ":", "-."]


def publication_style() -> None:
    plt.rcParams.update(
        {
            "font.size": 10,
            "axes.labelsize": 11,
            "legend.fontsize": 7,
            "axes.grid": True,
            "grid.color": "0.85",
            "axes.spines.top": False,
            "axes.spines.right": False,
            "savefig.dpi": 200,
        }
    )


def _color(key: str) -> str:
    for name, color in _COLORS.items():
        if f"_{name}" in key:
            return color
    return "tab:gray"


def _draw(ax, fig: FigureData, curves) -> None:
    groups = list(dict.fromkeys(c.group for c in curves))
    for curve in curves:
        style = _GROUP_STYLES[groups.index(curve.group) % len(_GROUP_STYLES)]
        color = _color(curve.key)
        if curve.metric == "success-lb":
            ax.plot(curve.x, curve.y, linestyle=(0, (1, 1)), color=color, lw=1.0, alpha=0.7,
                    label=f"{curve.label} [{curve.group}]")
            continue
        ax.plot(curve.x, curve.y, linestyle=style, color=color, lw=1.4, label=f"{curve.label} [{curve.group}]")
        mc = [(r.x, r.mc_estimate) for r in curve.rows if r.mc_estimate is not None]
        if mc:
            xs, ys = zip(*mc)
            ax.plot(xs, ys, "o", mfc="none", color=color, ms=4)
    keys = {c.key for c in curves}
    for m in fig.markers:
        if m.curve in keys:
            ax.plot([m.r_max_m], [m.value], marker="s", color=_color(m.curve), ms=6)


def render_figure(fig: FigureData, path: str | Path) -> Path:
    publication_style()
    path = Path(path)
    groups = list(dict.fromkeys(c.group for c in fig.curves))
    if fig.name == "fig3":
        figure, axes = plt.subplots(len(groups), 1, figsize=(6.0, 3.4 * len(groups)), sharex=True)
        axes = list(axes) if len(groups) > 1 else [axes]
        for ax, group in zip(axes, groups):
            _draw(ax, fig, [c for c in fig.curves if c.group == group])
            ax.set_yscale("log")
            ax.set_ylabel("expected computed bits")
            ax.set_title(group)
            ax.legend(loc="upper right")
        axes[-1].set_xlabel("distance r (m)")
    else:
        figure, ax = plt.subplots(figsize=(8.5, 4.2))
        _draw(ax, fig, fig.curves)
        ax.set_xlabel("distance r (m)")
        ax.set_ylabel("success probability")
        ax.set_ylim(0.0, 1.02)
        ax.legend(loc="upper left", bbox_to_anchor=(1.01, 1.0), borderaxespad=0.0)
    figure.tight_layout()
    figure.savefig(path, bbox_inches="tight")
    plt.close(figure)
    return path
