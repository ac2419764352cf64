"""Matplotlib renderings that accompany the delimited outputs."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def trajectory_png(path, xs, ys, title: str = "", x_label="x1", y_label="x2") -> str:
    fig, ax = plt.subplots(figsize=(6, 6), dpi=120)
    ax.plot(np.asarray(xs), np.asarray(ys), lw=0.9, color="#1a4f8b")
    ax.set_xlabel(x_label)
    ax.set_ylabel(y_label)
    ax.set_title(title)
    ax.set_aspect("equal", adjustable="datalim")
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return path


def potential_png(path, xs, vs, title: str = "") -> str:
    fig, ax = plt.subplots(figsize=(7, 4.5), dpi=120)
    ax.plot(np.asarray(xs), np.asarray(vs), lw=1.2, color="#8b1a2f")
    ax.set_xlabel("x")
    ax.set_ylabel("V(x)")
    ax.set_title(title)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return path


def conserved_png(path, times, series: dict, title: str = "") -> str:
    fig, ax = plt.subplots(figsize=(7, 4.5), dpi=120)
    for key, values in series.items():
        values = np.asarray(values)
        ax.plot(times, values - values[0], lw=1.0, label=f"{key} - {key}(0)")
    ax.set_xlabel("t")
    ax.set_ylabel("deviation from t=0")
    ax.set_title(title)
    ax.legend(loc="best", fontsize=8)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return path
