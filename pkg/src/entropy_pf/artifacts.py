"""CSV and key-value writers for one run directory, and their readers."""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .diagnostics import DiagnosticsReport
from .grid import norm_H1, norm_L2
from .monotone import MollifiedBeta
from .stepper import Trajectory

SNAPSHOT_HEADER = ("t", "x", "theta", "chi", "xi")
TIMESERIES_HEADER = (
    "t", "theta_min", "theta_max", "chi_min", "chi_max", "theta_L2", "chi_H1", "newton_chi", "newton_theta",
)


def _g(v) -> str:
    return format(float(v), ".17g")


def write_snapshots(traj: Trajectory, path: Path):
    """One row per node and stored time level; ``xi`` is ``beta_eps(theta)``."""
    spec = traj.spec
    beta = MollifiedBeta(spec.source.base_beta(), traj.cfg.eps, spec.length, spec.horizon, traj.cfg.quadrature_order)
    x = traj.grid.x
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SNAPSHOT_HEADER)
        for k in traj.snapshot_indices():
            t, th, ch = traj.times[k], traj.theta[k], traj.chi[k]
            xi = beta.beta_eps(x, t, th)
            for row in zip(x, th, ch, xi):
                w.writerow([_g(t)] + [_g(v) for v in row])


def write_timeseries(traj: Trajectory, path: Path):
    g = traj.grid
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TIMESERIES_HEADER)
        for k, t in enumerate(traj.times):
            th, ch = traj.theta[k], traj.chi[k]
            rep = traj.reports[k - 1] if k > 0 else None
            w.writerow([
                _g(t), _g(th.min()), _g(th.max()), _g(ch.min()), _g(ch.max()),
                _g(norm_L2(th, g)), _g(norm_H1(ch, g)),
                rep.chi_iterations if rep else 0, rep.theta_iterations if rep else 0,
            ])


def write_norms(report: DiagnosticsReport, path: Path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("row", "value"))
        for k, v in report.norms.items():
            w.writerow((k, _g(v)))


def write_run(run_dir: Path, traj: Trajectory, report: DiagnosticsReport, resolved_cfg: str):
    run_dir.mkdir(parents=True, exist_ok=True)
    write_snapshots(traj, run_dir / "snapshots.csv")
    write_timeseries(traj, run_dir / "timeseries.csv")
    write_norms(report, run_dir / "norms.csv")
    (run_dir / "report.txt").write_text(report.to_text())
    (run_dir / "resolved.cfg").write_text(resolved_cfg)


def read_csv_columns(path: Path) -> dict:
    """Columns of a numeric CSV with a header row, as float arrays."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ValueError(f"{path} is empty")
    header, body = rows[0], rows[1:]
    data = np.array(body, dtype=float).reshape(len(body), len(header))
    return {name: data[:, j] for j, name in enumerate(header)}
