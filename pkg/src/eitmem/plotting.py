"""Figures for the scenario reports, rendered off-screen."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

_RC = {
    "font.size": 9,
    "axes.labelsize": 9,
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "svg.hashsalt": "eitmem",
}
COLORS = {"1": "tab:blue", "2": "tab:red"}


def _fig(w=6.0, h=3.6, **kw):
    with plt.rc_context(_RC):
        return plt.subplots(figsize=(w, h), **kw)


def temporal_figure(traces: dict, schedule_rows):
    """Pulse sequence for a few slots (top) and leakage/retrieved traces (bottom).

    ``traces`` maps channel label to ``(t, leakage, retrieved)`` arrays, with
    ``t`` in seconds relative to the probe rising edge.
    """
    fig, (ax0, ax1) = _fig(6.0, 5.0, nrows=2)
    for s in schedule_rows:
        ax0.fill_between([s.probe_on * 1e6, s.probe_off * 1e6], 1.1, 2.0, color="tab:blue", alpha=0.6, lw=0)
        ax0.fill_between([s.coupling_on * 1e6, s.coupling_off * 1e6], 0.0, 0.9, color="tab:red", alpha=0.6, lw=0)
    ax0.set_yticks([0.45, 1.55], ["coupling", "probe"])
    ax0.set_xlabel("time (us)")
    for label, (t, leak, ret) in traces.items():
        ax1.plot(t * 1e6, leak, color=COLORS.get(label, "k"), lw=1.2, label=f"probe {label} leakage")
        ax1.plot(t * 1e6, ret, color=COLORS.get(label, "k"), lw=1.2, ls="--", label=f"probe {label} retrieved")
    ax1.set_xlabel("time after probe rising edge (us)")
    ax1.set_ylabel("photons / bin")
    ax1.legend(frameon=False)
    fig.tight_layout()
    return fig


def image_panel(images: list, titles: list, ncols: int = 2):
    n = len(images)
    nrows = int(np.ceil(n / ncols))
    fig, axes = _fig(3.0 * ncols, 1.8 * nrows, nrows=nrows, ncols=ncols, squeeze=False)
    for ax in axes.flat:
        ax.set_axis_off()
    for ax, img, title in zip(axes.flat, images, titles):
        ax.imshow(img, cmap="gray", interpolation="nearest")
        ax.set_title(title, fontsize=8)
    fig.tight_layout()
    return fig


def sweep_figure(rows: list):
    """Visibility and similarity against photons per pulse, one line per channel."""
    fig, (ax0, ax1) = _fig(7.0, 3.0, ncols=2)
    for label in sorted({r["channel"] for r in rows}):
        sub = sorted((r for r in rows if r["channel"] == label), key=lambda r: r["photons_per_pulse"])
        x = [r["photons_per_pulse"] for r in sub]
        marker = "s" if label == "1" else "o"
        ax0.errorbar(x, [r["V"] for r in sub], yerr=[r["V_std"] for r in sub], marker=marker,
                     color=COLORS.get(label), capsize=2, label=f"probe {label}")
        ax1.errorbar(x, [r["R"] for r in sub], yerr=[r["R_std"] for r in sub], marker=marker,
                     color=COLORS.get(label), capsize=2, label=f"probe {label}")
    for ax, name in ((ax0, "visibility"), (ax1, "similarity")):
        ax.set_xscale("log")
        ax.set_xlabel("photons per pulse")
        ax.set_ylabel(name)
        ax.set_ylim(0, 1.05)
        ax.legend(frameon=False)
    fig.tight_layout()
    return fig


def decay_figure(t, measured, fit_t, fit_y, tau):
    fig, ax = _fig(4.5, 3.2)
    ax.plot(np.asarray(t) * 1e6, measured, "s", color="tab:blue", label="retrieved")
    ax.plot(np.asarray(fit_t) * 1e6, fit_y, "-", color="tab:red", label=f"fit, tau = {tau * 1e6:.2f} us")
    ax.set_xlabel("storage time (us)")
    ax.set_ylabel("retrieved photons per pulse")
    ax.legend(frameon=False)
    fig.tight_layout()
    return fig
