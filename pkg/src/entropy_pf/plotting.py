"""SVG line plots rendered from the CSVs of a run directory only.

Output is byte-reproducible: fixed hash salt, no timestamp metadata.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib
import numpy as np
from matplotlib.figure import Figure

from .artifacts import read_csv_columns

SVG_META = {"Date": None, "Creator": "entropy_pf"}


def _save(fig: Figure, path: Path):
    with matplotlib.rc_context({"svg.hashsalt": "entropy_pf", "svg.fonttype": "path"}):
        fig.savefig(path, format="svg", metadata=SVG_META)


def _pick_times(times, count=6):
    uniq = np.unique(times)
    if uniq.size <= count:
        return uniq
    idx = np.unique(np.round(np.linspace(0, uniq.size - 1, count)).astype(int))
    return uniq[idx]


def plot_snapshots(snap: dict, field: str, ylabel: str, path: Path):
    fig = Figure(figsize=(6.4, 4.0))
    ax = fig.add_subplot()
    for t in _pick_times(snap["t"]):
        m = snap["t"] == t
        ax.plot(snap["x"][m], snap[field][m], label=f"t = {t:.3g}")
    ax.set_xlabel("x")
    ax.set_ylabel(ylabel)
    ax.legend(fontsize="small")
    fig.tight_layout()
    _save(fig, path)


def plot_extrema(ts: dict, path: Path):
    fig = Figure(figsize=(6.4, 5.0))
    a1, a2 = fig.subplots(2, 1, sharex=True)
    a1.plot(ts["t"], ts["theta_min"], label="min theta")
    a1.plot(ts["t"], ts["theta_max"], label="max theta")
    a1.legend(fontsize="small")
    a2.plot(ts["t"], ts["chi_min"], label="min chi")
    a2.plot(ts["t"], ts["chi_max"], label="max chi")
    a2.legend(fontsize="small")
    a2.set_xlabel("t")
    fig.tight_layout()
    _save(fig, path)


def plot_norms(ts: dict, path: Path):
    fig = Figure(figsize=(6.4, 4.0))
    ax = fig.add_subplot()
    ax.plot(ts["t"], ts["theta_L2"], label="||theta||_L2")
    ax.plot(ts["t"], ts["chi_H1"], label="||chi||_H1")
    ax.set_xlabel("t")
    ax.legend(fontsize="small")
    fig.tight_layout()
    _save(fig, path)


def render_run(run_dir) -> list:
    """Write ``plots/*.svg`` for a run directory; returns the paths written."""
    run_dir = Path(run_dir)
    snap = read_csv_columns(run_dir / "snapshots.csv")
    ts = read_csv_columns(run_dir / "timeseries.csv")
    out = run_dir / "plots"
    out.mkdir(exist_ok=True)
    paths = [out / "theta.svg", out / "chi.svg", out / "extrema.svg", out / "norms.svg"]
    plot_snapshots(snap, "theta", "theta", paths[0])
    plot_snapshots(snap, "chi", "chi", paths[1])
    plot_extrema(ts, paths[2])
    plot_norms(ts, paths[3])
    return paths
