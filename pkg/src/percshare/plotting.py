"""Line charts of sweep results, written as SVG (or any matplotlib format)."""

from __future__ import annotations

from pathlib import Path
from typing import Mapping, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

# 800 x 600 user units: matplotlib's SVG backend works in points (72/in)
FIGSIZE = (800 / 72.0, 600 / 72.0)

STRATEGY_LABELS = {
    "none": "No sharing",
    "active": "Active sharing",
    "passive": "Passive sharing",
    "gdm": "Gilbert disk model",
}

STRATEGY_STYLES = {
    "none": dict(color="tab:red", marker="o"),
    "active": dict(color="tab:purple", marker="s"),
    "passive": dict(color="tab:blue", marker="^"),
    "gdm": dict(color="tab:green", marker="D"),
}


def _setup():
    matplotlib.rcParams.update({
        "svg.hashsalt": "percshare",
        "svg.fonttype": "none",
        "font.size": 14,
        "axes.labelsize": 16,
        "legend.fontsize": 13,
    })
    fig, ax = plt.subplots(figsize=FIGSIZE)
    return fig, ax


def _save(fig, path):
    path = Path(path)
    fmt = path.suffix.lstrip(".") or "svg"
    # Date metadata would make repeated runs differ byte-wise
    meta = {"Date": None} if fmt == "svg" else None
    fig.savefig(path, format=fmt, metadata=meta)
    plt.close(fig)


def plot_series(series: Mapping[str, Sequence], path, *, ylabel: str,
                xlabel: str = r"MNO $a$ BS density $\lambda_a$ (BSs/m$^2$)",
                theory: Mapping[str, tuple[Sequence[float], Sequence[float]]] | None = None,
                hline: float | None = None, title: str | None = None,
                errorbars: bool = True, sci_x: bool = True):
    """Plot one line per strategy.

    ``series`` maps a strategy key to ``(x, y)`` or ``(x, y, ci_low,
    ci_high)`` tuples.  ``theory`` adds dashed curves keyed the same way.
    """
    fig, ax = _setup()
    for key, pts in series.items():
        style = STRATEGY_STYLES.get(key, {})
        label = STRATEGY_LABELS.get(key, key)
        xs = [p[0] for p in pts]
        ys = [p[1] for p in pts]
        ax.plot(xs, ys, linestyle="-", label=label, **style)
        if errorbars and pts and len(pts[0]) >= 4:
            lo = [y - p[2] for y, p in zip(ys, pts)]
            hi = [p[3] - y for y, p in zip(ys, pts)]
            ax.errorbar(xs, ys, yerr=[lo, hi], fmt="none", ecolor=style.get("color"), capsize=3)
    for key, (xs, ys) in (theory or {}).items():
        style = STRATEGY_STYLES.get(key, {})
        ax.plot(xs, ys, linestyle="--", color=style.get("color"),
                label=f"{STRATEGY_LABELS.get(key, key)} (theory)")
    if hline is not None:
        ax.axhline(hline, color="0.5", linewidth=1, linestyle=":")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.set_ylim(-0.02, 1.02)
    if sci_x:
        ax.ticklabel_format(axis="x", style="sci", scilimits=(0, 0))
    ax.grid(True, alpha=0.3)
    ax.legend(loc="best")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    _save(fig, path)


def plot_percolation(results: Mapping[str, object], path, title: str | None = None):
    series = {k: [(p.lambda_a, p.perc_prob, p.ci_low, p.ci_high) for p in res]
              for k, res in results.items()}
    plot_series(series, path, ylabel="Percolation (crossing) probability", title=title)


def plot_coverage(results: Mapping[str, object], path, theory=None, title: str | None = None):
    series = {k: [(p.lambda_a, p.cov_prop_mean) for p in res] for k, res in results.items()}
    plot_series(series, path, ylabel="SINR coverage proportion", theory=theory,
                hline=0.5, title=title, errorbars=False)


def plot_hex(rows: Sequence[tuple[float, float]], path):
    plot_series({"hex": list(rows)}, path, xlabel="Open-cell probability",
                ylabel="Crossing frequency", hline=0.5, errorbars=False, sci_x=False)
