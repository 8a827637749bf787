"""Render figures from a finished run directory.

Reads the CSV files a run produced and writes PNG files next to them:
time series panels (QFI gain and squeezing level), Wigner heatmaps with
a symmetric diverging scale, photon-number bars, and sweep overlays with
their threshold windows.  Purely a consumer of the CSV outputs; nothing
here feeds back into the computations.
"""

from __future__ import annotations

import glob
import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = ["render_run"]


def _read_csv(path: str) -> dict:
    """Tiny typed CSV reader: header names -> float column arrays."""
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
        columns: dict = {name: [] for name in header}
        for line in fh:
            parts = line.rstrip("\n").split(",")
            for name, token in zip(header, parts):
                try:
                    columns[name].append(float(token))
                except ValueError:
                    columns[name].append(np.nan)
    return {name: np.asarray(vals) for name, vals in columns.items()}


def _save(fig, path: str, dpi: int) -> str:
    fig.savefig(path, dpi=dpi, bbox_inches="tight")
    plt.close(fig)
    return path


def _render_timeseries(csv_path: str, out_path: str, dpi: int) -> str:
    data = _read_csv(csv_path)
    t = data["t"]
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(6.0, 5.0), sharex=True)
    ax1.plot(t, data["gq_db"], color="tab:blue", lw=1.5)
    ax1.axhline(0.0, color="0.6", lw=0.8, ls=":")
    ax1.set_ylabel("QFI gain (dB)")
    ax2.plot(t, data["s_db"], color="tab:red", lw=1.5)
    ax2.axhline(0.0, color="0.6", lw=0.8, ls=":")
    ax2.set_ylabel("squeezing (dB)")
    ax2.set_xlabel("time (units of drive rate)")
    if t[-1] > 0 and t[-1] / max(t[1], 1e-12) > 50:
        ax1.set_xscale("symlog", linthresh=max(t[1], 1e-3))
    for ax in (ax1, ax2):
        ax.grid(alpha=0.25)
    fig.tight_layout()
    return _save(fig, out_path, dpi)


def _render_wigner(csv_path: str, out_path: str, dpi: int) -> str:
    data = _read_csv(csv_path)
    x = np.unique(data["x"])
    p = np.unique(data["p"])
    w = data["w"].reshape(x.size, p.size)
    scale = max(abs(w.min()), abs(w.max())) or 1.0
    fig, ax = plt.subplots(figsize=(4.6, 4.0))
    mesh = ax.pcolormesh(
        x, p, w.T, cmap="RdBu_r", vmin=-scale, vmax=scale, shading="nearest"
    )
    fig.colorbar(mesh, ax=ax, label="W(x, p)")
    ax.set_xlabel("x")
    ax.set_ylabel("p")
    ax.set_aspect("equal")
    fig.tight_layout()
    return _save(fig, out_path, dpi)


def _render_pn(csv_path: str, out_path: str, dpi: int) -> str:
    data = _read_csv(csv_path)
    mask = data["p_n"] > 1e-12
    n_top = int(data["n"][mask].max()) + 2 if mask.any() else 10
    fig, ax = plt.subplots(figsize=(5.0, 3.2))
    ax.bar(data["n"][:n_top], data["p_n"][:n_top], color="tab:purple", width=0.8)
    ax.set_xlabel("photon number")
    ax.set_ylabel("population")
    fig.tight_layout()
    return _save(fig, out_path, dpi)


def _render_sweep(run_dir: str, out_path: str, dpi: int) -> str | None:
    sub_series = []
    for sub in sorted(glob.glob(os.path.join(run_dir, "*", "timeseries.csv"))):
        label = os.path.basename(os.path.dirname(sub))
        sub_series.append((label, _read_csv(sub)))
    if not sub_series:
        return None
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    cmap = plt.get_cmap("viridis")
    for i, (label, data) in enumerate(sub_series):
        color = cmap(i / max(1, len(sub_series) - 1))
        ax.plot(data["t"], data["gq_db"], lw=1.4, color=color, label=label)
    ax.axhline(0.0, color="0.6", lw=0.8, ls=":")
    ax.set_xlabel("time (units of drive rate)")
    ax.set_ylabel("QFI gain (dB)")
    ax.legend(fontsize=8)
    ax.grid(alpha=0.25)
    fig.tight_layout()
    return _save(fig, out_path, dpi)


def render_run(run_dir: str, dpi: int = 150) -> list:
    """Render every recognized CSV in run_dir; returns written PNG paths."""
    written = []
    ts = os.path.join(run_dir, "timeseries.csv")
    if os.path.exists(ts):
        written.append(
            _render_timeseries(ts, os.path.join(run_dir, "timeseries.png"), dpi)
        )
    for csv_path in sorted(glob.glob(os.path.join(run_dir, "wigner_t*.csv"))):
        stem = os.path.splitext(os.path.basename(csv_path))[0]
        written.append(
            _render_wigner(csv_path, os.path.join(run_dir, stem + ".png"), dpi)
        )
    for csv_path in sorted(glob.glob(os.path.join(run_dir, "pn_t*.csv"))):
        stem = os.path.splitext(os.path.basename(csv_path))[0]
        written.append(
            _render_pn(csv_path, os.path.join(run_dir, stem + ".png"), dpi)
        )
    if os.path.exists(os.path.join(run_dir, "windows.csv")):
        path = _render_sweep(run_dir, os.path.join(run_dir, "sweep.png"), dpi)
        if path:
            written.append(path)
    return written
